#include "fssaudit/features.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "format.hpp"

namespace fssaudit {

bool is_eligible(const Researcher& r, const Competition& comp, const ScoreBook& scores, const EligibilityRule& rule) {
  return r.rank == Rank::Assistant && comp.year - r.career_start_year >= rule.min_career_years &&
         scores.find(r.id) != nullptr;
}

EligibleSet filter_eligible(const Corpus& corpus, const ScoreBook& scores, const EligibilityRule& rule) {
  EligibleSet out;
  for (const auto& comp : corpus.competitions) {
    auto& list = out.applicants[comp.id];
    bool winner = false, loser = false;
    for (const auto& a : comp.applicants) {
      if (a.external) continue;
      const Researcher* r = corpus.find_researcher(a.key);
      if (!r || !is_eligible(*r, comp, scores, rule)) continue;
      list.push_back(a.key);
      (comp.is_winner(a.key) ? winner : loser) = true;
    }
    if (winner && loser) out.retained.push_back(comp.id);
  }
  std::sort(out.retained.begin(), out.retained.end());
  return out;
}

int shared_affiliation_years(const Researcher& a, const Researcher& b, YearRange window, bool require_sds) {
  int years = 0;
  for (int y = window.first; y <= window.last; ++y) {
    auto fa = a.affiliation_in(y);
    auto fb = b.affiliation_in(y);
    if (!fa || !fb) continue;
    if (fa->university_id != fb->university_id) continue;
    if (require_sds && fa->sds_id != fb->sds_id) continue;
    ++years;
  }
  return years;
}

namespace {

std::vector<std::size_t> window_publications(const Corpus& corpus, std::size_t researcher, YearRange window) {
  std::vector<std::size_t> out;
  for (std::size_t p : corpus.publications_of(researcher)) {
    if (window.contains(corpus.publications[p].year)) out.push_back(p);
  }
  return out;  // ascending, inherited from publications_of
}

std::size_t shared_count(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

const Researcher& roster(const Corpus& corpus, const std::string& id) {
  const Researcher* r = corpus.find_researcher(id);
  if (!r) throw CorpusError(CorpusError::Kind::DanglingReference, "unknown researcher '" + id + "'");
  return *r;
}

}  // namespace

std::vector<ApplicantFeatures> extract_features(const Competition& comp, const std::vector<std::string>& applicants,
                                                const Corpus& corpus, const ScoreBook& scores,
                                                const FeatureOptions& options) {
  const Researcher& president = roster(corpus, comp.president);
  std::vector<const Researcher*> members;
  for (const auto& m : comp.members) members.push_back(&roster(corpus, m));

  const auto president_pubs = window_publications(corpus, *corpus.researcher_index(president.id), options.window);
  std::vector<std::vector<std::size_t>> member_pubs;
  for (const auto* m : members) {
    member_pubs.push_back(window_publications(corpus, *corpus.researcher_index(m->id), options.window));
  }

  // Normalized family names of full professors at the hiring university.
  std::set<std::string> local_full_names;
  for (const auto& r : corpus.researchers) {
    if (r.rank != Rank::Full) continue;
    auto aff = r.affiliation_in(comp.year);
    if (aff && aff->university_id == comp.university_id) local_full_names.insert(normalize_family_name(r.family_name));
  }

  std::vector<ApplicantFeatures> rows;
  rows.reserve(applicants.size());
  for (const auto& id : applicants) {
    const Researcher& a = roster(corpus, id);
    ApplicantFeatures f;
    f.competition_id = comp.id;
    f.researcher_id = id;
    f.E = comp.is_winner(id) ? 1 : 0;
    f.G = a.gender == Gender::F ? 1 : 0;
    f.FSS = scores.at(id).percentile;
    f.NE = local_full_names.count(normalize_family_name(a.family_name)) ? 1 : 0;
    f.CP = shared_affiliation_years(a, president, options.window, options.overlap_requires_sds);
    for (const auto* m : members) f.CE += shared_affiliation_years(a, *m, options.window, options.overlap_requires_sds);

    const auto own = window_publications(corpus, *corpus.researcher_index(id), options.window);
    f.PP = president_pubs.empty()
               ? 0.0
               : 100.0 * static_cast<double>(shared_count(president_pubs, own)) /
                     static_cast<double>(president_pubs.size());
    for (const auto& mp : member_pubs) f.PE += shared_count(mp, own) > 0 ? 1 : 0;

    f.SP = a.gender == president.gender ? 1 : 0;
    int same = f.SP;
    for (const auto* m : members) same += m->gender == a.gender ? 1 : 0;
    f.SE = same >= 3 ? 1 : 0;
    rows.push_back(std::move(f));
  }
  return rows;
}

std::vector<ApplicantFeatures> build_feature_table(const Corpus& corpus, const ScoreBook& scores,
                                                   const EligibleSet& eligible, const FeatureOptions& options,
                                                   Execution exec) {
  std::vector<const Competition*> comps;
  for (const auto& c : corpus.competitions) comps.push_back(&c);
  std::sort(comps.begin(), comps.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<std::vector<ApplicantFeatures>> parts(comps.size());
  auto work = [&](std::size_t i) {
    auto it = eligible.applicants.find(comps[i]->id);
    if (it == eligible.applicants.end() || it->second.empty()) return;
    auto ids = it->second;
    std::sort(ids.begin(), ids.end());
    parts[i] = extract_features(*comps[i], ids, corpus, scores, options);
  };

  const auto n = static_cast<std::ptrdiff_t>(comps.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) work(i);
  } else {
    // exceptions must not escape the parallel region
    std::vector<std::exception_ptr> errors(comps.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<ApplicantFeatures> rows;
  for (auto& p : parts) rows.insert(rows.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return rows;
}

std::string features_csv(const std::vector<ApplicantFeatures>& rows) {
  std::ostringstream out;
  out << "competition_id,researcher_id,E,G,FSS,NE,CP,CE,PP,PE,SP,SE\n";
  for (const auto& f : rows) {
    out << csv::join({f.competition_id, f.researcher_id, std::to_string(f.E), std::to_string(f.G), fmt_real(f.FSS),
                      std::to_string(f.NE), std::to_string(f.CP), std::to_string(f.CE), fmt_real(f.PP),
                      std::to_string(f.PE), std::to_string(f.SP), std::to_string(f.SE)})
        << '\n';
  }
  return out.str();
}

}  // namespace fssaudit
