#include "fssaudit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace fssaudit {

YearRange YearRange::intersect(const YearRange& other) const {
  return {std::max(first, other.first), std::min(last, other.last)};
}

YearRange YearRange::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("year range must look like Y0:Y1, got '" + std::string(text) + "'");
  }
  auto parse_int = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad year '" + std::string(s) + "' in range '" + std::string(text) + "'");
    }
    return v;
  };
  YearRange r{parse_int(text.substr(0, colon)), parse_int(text.substr(colon + 1))};
  if (r.empty()) throw std::invalid_argument("empty year range '" + std::string(text) + "'");
  return r;
}

std::string YearRange::to_string() const {
  return std::to_string(first) + ":" + std::to_string(last);
}

std::string_view to_string(Gender g) { return g == Gender::F ? "F" : "M"; }

std::string_view to_string(Rank r) {
  switch (r) {
    case Rank::Assistant: return "AST";
    case Rank::Associate: return "ASO";
    case Rank::Full: return "FUL";
  }
  return "?";
}

std::string_view to_string(BylineConvention c) {
  return c == BylineConvention::Alphabetical ? "ALPHA" : "CONTRIB";
}

YearRange Researcher::career(int horizon) const {
  return {career_start_year, career_end_year.value_or(horizon)};
}

bool Researcher::active_in(int year) const {
  return year >= career_start_year && (!career_end_year || year <= *career_end_year);
}

std::optional<Affiliation> Researcher::affiliation_in(int year) const {
  if (!active_in(year)) return std::nullopt;
  for (const auto& a : affiliations) {
    if (a.year == year) return a;
  }
  return Affiliation{year, university_id, sds_id};
}

bool Competition::is_winner(std::string_view key) const {
  return std::find(winners.begin(), winners.end(), key) != winners.end();
}

YearRange CorpusConfig::publication_range() const {
  if (publication_years) return *publication_years;
  return {std::min(productivity_window.first, collaboration_window.first),
          std::max(productivity_window.last, collaboration_window.last)};
}

CorpusError::CorpusError(Kind kind, std::string message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

std::string_view to_string(CorpusError::Kind k) {
  switch (k) {
    case CorpusError::Kind::MalformedRecord: return "MalformedRecord";
    case CorpusError::Kind::DanglingReference: return "DanglingReference";
    case CorpusError::Kind::DuplicateId: return "DuplicateId";
    case CorpusError::Kind::MissingInput: return "MissingInput";
  }
  return "CorpusError";
}

void Corpus::link() {
  researcher_by_id_.clear();
  sds_by_id_.clear();
  competition_by_id_.clear();

  auto index = [](auto& map, const std::string& id, std::size_t i, std::string_view what) {
    if (!map.emplace(id, i).second) {
      throw CorpusError(CorpusError::Kind::DuplicateId,
                        std::string(what) + " id '" + id + "' appears more than once");
    }
  };
  for (std::size_t i = 0; i < taxonomy.size(); ++i) index(sds_by_id_, taxonomy[i].sds_id, i, "sds");
  for (std::size_t i = 0; i < researchers.size(); ++i) index(researcher_by_id_, researchers[i].id, i, "researcher");
  for (std::size_t i = 0; i < competitions.size(); ++i) index(competition_by_id_, competitions[i].id, i, "competition");
  {
    std::set<std::string_view> seen;
    for (const auto& p : publications) {
      if (!seen.insert(p.id).second) {
        throw CorpusError(CorpusError::Kind::DuplicateId, "publication id '" + p.id + "' appears more than once");
      }
    }
  }

  pubs_by_researcher_.assign(researchers.size(), {});
  for (std::size_t p = 0; p < publications.size(); ++p) {
    for (const auto& entry : publications[p].byline) {
      auto it = researcher_by_id_.find(entry.author);
      if (it == researcher_by_id_.end()) continue;
      auto& list = pubs_by_researcher_[it->second];
      if (list.empty() || list.back() != p) list.push_back(p);
    }
  }
}

const Researcher* Corpus::find_researcher(std::string_view id) const {
  auto it = researcher_by_id_.find(std::string(id));
  return it == researcher_by_id_.end() ? nullptr : &researchers[it->second];
}

std::optional<std::size_t> Corpus::researcher_index(std::string_view id) const {
  auto it = researcher_by_id_.find(std::string(id));
  if (it == researcher_by_id_.end()) return std::nullopt;
  return it->second;
}

const Sds* Corpus::find_sds(std::string_view sds_id) const {
  auto it = sds_by_id_.find(std::string(sds_id));
  return it == sds_by_id_.end() ? nullptr : &taxonomy[it->second];
}

const Competition* Corpus::find_competition(std::string_view id) const {
  auto it = competition_by_id_.find(std::string(id));
  return it == competition_by_id_.end() ? nullptr : &competitions[it->second];
}

const std::vector<std::size_t>& Corpus::publications_of(std::size_t researcher_index) const {
  return pubs_by_researcher_.at(researcher_index);
}

std::vector<std::string> Corpus::udas() const {
  std::vector<std::string> out;
  for (const auto& s : taxonomy) {
    if (std::find(out.begin(), out.end(), s.uda_id) == out.end()) out.push_back(s.uda_id);
  }
  return out;
}

std::string normalize_family_name(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : name) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

ValidationReport validate_corpus(const Corpus& c) {
  ValidationReport report;
  auto flag = [&](std::string type, const std::string& id, std::string msg) {
    report.push_back({std::move(type), id, std::move(msg)});
  };

  std::map<std::string, int> sds_seen;
  for (const auto& s : c.taxonomy) {
    if (s.sds_id.empty()) flag("Sds", s.sds_id, "empty sds id");
    if (s.uda_id.empty()) flag("Sds", s.sds_id, "sds maps to no uda");
    if (++sds_seen[s.sds_id] == 2) flag("Sds", s.sds_id, "duplicate sds id");
  }
  std::map<std::string, int> cat_seen;
  for (const auto& cat : c.categories) {
    if (cat.id.empty()) flag("SubjectCategory", cat.id, "empty subject category id");
    if (++cat_seen[cat.id] == 2) flag("SubjectCategory", cat.id, "duplicate subject category id");
  }

  std::map<std::string, const Researcher*> by_id;
  for (const auto& r : c.researchers) {
    if (!by_id.emplace(r.id, &r).second) flag("Researcher", r.id, "duplicate researcher id");
    if (r.id.empty()) flag("Researcher", r.id, "empty researcher id");
    if (!c.find_sds(r.sds_id)) flag("Researcher", r.id, "unknown sds '" + r.sds_id + "'");
    if (r.career_end_year && *r.career_end_year < r.career_start_year) {
      flag("Researcher", r.id, "career ends before it starts");
    }
    std::set<int> years;
    for (const auto& a : r.affiliations) {
      if (!r.active_in(a.year)) {
        flag("Researcher", r.id, "affiliation year " + std::to_string(a.year) + " outside career interval");
      }
      if (!years.insert(a.year).second) {
        flag("Researcher", r.id, "conflicting affiliations in year " + std::to_string(a.year));
      }
      if (!c.find_sds(a.sds_id)) {
        flag("Researcher", r.id, "affiliation in unknown sds '" + a.sds_id + "'");
      }
    }
  }

  const YearRange pub_years = c.config.publication_range();
  std::set<std::string> cats;
  for (const auto& cat : c.categories) cats.insert(cat.id);
  std::set<std::string> pub_ids;
  for (const auto& p : c.publications) {
    if (!pub_ids.insert(p.id).second) flag("Publication", p.id, "duplicate publication id");
    if (p.byline.empty()) flag("Publication", p.id, "empty byline");
    if (p.citations < 0) flag("Publication", p.id, "negative citation count");
    if (!pub_years.contains(p.year)) {
      flag("Publication", p.id, "year " + std::to_string(p.year) + " outside corpus range " + pub_years.to_string());
    }
    if (!cats.empty() && !cats.count(p.subject_category)) {
      flag("Publication", p.id, "unknown subject category '" + p.subject_category + "'");
    }
  }

  std::set<std::string> comp_ids;
  for (const auto& comp : c.competitions) {
    if (!comp_ids.insert(comp.id).second) flag("Competition", comp.id, "duplicate competition id");
    if (!c.find_sds(comp.sds_id)) flag("Competition", comp.id, "unknown sds '" + comp.sds_id + "'");
    if (comp.members.size() != 4) {
      flag("Competition", comp.id,
           "committee size \xE2\x89\xA0 5 (" + std::to_string(comp.members.size() + 1) + " seated)");
    }
    std::vector<std::string> committee = comp.members;
    committee.insert(committee.begin(), comp.president);
    std::set<std::string> seated;
    for (const auto& m : committee) {
      if (!seated.insert(m).second) flag("Competition", comp.id, "committee member '" + m + "' seated twice");
      auto it = by_id.find(m);
      if (it == by_id.end()) {
        flag("Competition", comp.id, "committee member '" + m + "' is not a known researcher");
        continue;
      }
      if (it->second->rank != Rank::Full) flag("Competition", comp.id, "committee member '" + m + "' is not a full professor");
      if (it->second->sds_id != comp.sds_id) flag("Competition", comp.id, "committee member '" + m + "' is outside the competition sds");
    }
    std::set<std::string> keys;
    for (const auto& a : comp.applicants) {
      if (!keys.insert(a.key).second) flag("Competition", comp.id, "applicant '" + a.key + "' listed twice");
      if (!a.external && !by_id.count(a.key)) {
        flag("Competition", comp.id, "applicant '" + a.key + "' is not a known researcher");
      }
    }
    if (comp.winners.empty() || comp.winners.size() > 2) {
      flag("Competition", comp.id, "winner count " + std::to_string(comp.winners.size()) + " outside [1,2]");
    }
    std::set<std::string> won;
    for (const auto& w : comp.winners) {
      if (!keys.count(w)) flag("Competition", comp.id, "winner '" + w + "' is not among the applicants");
      if (!won.insert(w).second) flag("Competition", comp.id, "winner '" + w + "' listed twice");
    }
  }
  return report;
}

}  // namespace fssaudit
