#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "fssaudit/corpus.hpp"

namespace fssaudit {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void malformed(const fs::path& file, std::size_t line, std::string_view field, std::string_view what) {
  std::ostringstream msg;
  msg << file.string() << ":" << line << ": field '" << field << "': " << what;
  throw CorpusError(CorpusError::Kind::MalformedRecord, msg.str());
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError(CorpusError::Kind::MissingInput, "cannot open input file " + path.string());
  return in;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

int parse_int(const fs::path& file, std::size_t line, std::string_view field, std::string_view text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    malformed(file, line, field, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

// Reads a headered CSV file, checking that every expected column exists.
// Calls `row(line_number, fields)` with fields ordered as `columns`.
template <typename Fn>
void read_csv(const fs::path& path, const std::vector<std::string>& columns,
              const std::set<std::string>& optional_columns, Fn&& row) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<int> position(columns.size(), -1);
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto fields = csv::split(line);
    if (!have_header) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        for (std::size_t f = 0; f < fields.size(); ++f) {
          if (fields[f] == columns[c]) position[c] = static_cast<int>(f);
        }
        if (position[c] < 0 && !optional_columns.count(columns[c])) {
          malformed(path, lineno, columns[c], "missing header column");
        }
      }
      have_header = true;
      continue;
    }
    std::vector<std::string> ordered(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (position[c] < 0) continue;
      if (static_cast<std::size_t>(position[c]) >= fields.size()) {
        if (optional_columns.count(columns[c])) continue;
        malformed(path, lineno, columns[c], "row has too few fields");
      }
      ordered[c] = fields[position[c]];
    }
    row(lineno, ordered);
  }
}

template <typename Fn>
void read_jsonl(const fs::path& path, Fn&& record) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(path, lineno, "<record>", e.what());
    }
    if (!j.is_object()) malformed(path, lineno, "<record>", "expected a JSON object");
    record(lineno, j);
  }
}

template <typename T>
T get_field(const fs::path& path, std::size_t line, const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) malformed(path, line, key, "missing");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    malformed(path, line, key, "wrong type");
  }
}

Gender parse_gender(const fs::path& f, std::size_t l, const std::string& s) {
  if (s == "F") return Gender::F;
  if (s == "M") return Gender::M;
  malformed(f, l, "gender", "expected F or M, got '" + s + "'");
}

Rank parse_rank(const fs::path& f, std::size_t l, const std::string& s) {
  if (s == "AST") return Rank::Assistant;
  if (s == "ASO") return Rank::Associate;
  if (s == "FUL") return Rank::Full;
  malformed(f, l, "rank", "expected AST, ASO or FUL, got '" + s + "'");
}

BylineConvention parse_convention(const fs::path& f, std::size_t l, const std::string& s) {
  if (s == "ALPHA") return BylineConvention::Alphabetical;
  if (s == "CONTRIB") return BylineConvention::ContributionOrdered;
  malformed(f, l, "byline_convention", "expected ALPHA or CONTRIB, got '" + s + "'");
}

std::vector<Affiliation> parse_history(const fs::path& f, std::size_t l, const std::string& text) {
  std::vector<Affiliation> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(';', start);
    if (end == std::string::npos) end = text.size();
    std::string triple = text.substr(start, end - start);
    auto c1 = triple.find(':');
    auto c2 = c1 == std::string::npos ? std::string::npos : triple.find(':', c1 + 1);
    if (c2 == std::string::npos) malformed(f, l, "affiliation_history", "expected year:university:sds, got '" + triple + "'");
    Affiliation a;
    a.year = parse_int(f, l, "affiliation_history", std::string_view(triple).substr(0, c1));
    a.university_id = triple.substr(c1 + 1, c2 - c1 - 1);
    a.sds_id = triple.substr(c2 + 1);
    out.push_back(std::move(a));
    start = end + 1;
  }
  return out;
}

}  // namespace

CorpusPaths CorpusPaths::in_directory(const fs::path& dir) {
  CorpusPaths p{dir / "researchers.csv", dir / "publications.jsonl", dir / "competitions.jsonl", dir / "taxonomy.csv",
                std::nullopt};
  if (fs::exists(dir / "categories.csv")) p.categories = dir / "categories.csv";
  return p;
}

Corpus load_corpus(const CorpusPaths& paths, const CorpusConfig& config) {
  for (const auto* p : {&paths.researchers, &paths.publications, &paths.competitions, &paths.taxonomy}) {
    if (!fs::exists(*p)) throw CorpusError(CorpusError::Kind::MissingInput, "input file not found: " + p->string());
  }

  Corpus c;
  c.config = config;

  read_csv(paths.taxonomy, {"sds_id", "uda_id", "byline_convention"}, {},
           [&](std::size_t l, const std::vector<std::string>& f) {
             if (f[0].empty()) malformed(paths.taxonomy, l, "sds_id", "empty");
             c.taxonomy.push_back({f[0], f[1], parse_convention(paths.taxonomy, l, f[2])});
           });

  if (paths.categories) {
    read_csv(*paths.categories, {"id", "description"}, {"description"},
             [&](std::size_t l, const std::vector<std::string>& f) {
               if (f[0].empty()) malformed(*paths.categories, l, "id", "empty");
               c.categories.push_back({f[0], f[1]});
             });
  }

  read_csv(paths.researchers,
           {"id", "gender", "family_name", "university_id", "sds_id", "rank", "career_start_year", "career_end_year",
            "affiliation_history"},
           {"career_end_year", "affiliation_history"}, [&](std::size_t l, const std::vector<std::string>& f) {
             const auto& file = paths.researchers;
             Researcher r;
             r.id = f[0];
             if (r.id.empty()) malformed(file, l, "id", "empty");
             r.gender = parse_gender(file, l, f[1]);
             r.family_name = f[2];
             r.university_id = f[3];
             r.sds_id = f[4];
             r.rank = parse_rank(file, l, f[5]);
             r.career_start_year = parse_int(file, l, "career_start_year", f[6]);
             if (!f[7].empty()) r.career_end_year = parse_int(file, l, "career_end_year", f[7]);
             r.affiliations = parse_history(file, l, f[8]);
             c.researchers.push_back(std::move(r));
           });

  read_jsonl(paths.publications, [&](std::size_t l, const json& j) {
    const auto& file = paths.publications;
    Publication p;
    p.id = get_field<std::string>(file, l, j, "id");
    p.year = get_field<int>(file, l, j, "year");
    p.subject_category = get_field<std::string>(file, l, j, "subject_category");
    p.citations = get_field<std::int64_t>(file, l, j, "citations");
    if (p.citations < 0) malformed(file, l, "citations", "negative");
    auto byline = j.find("byline");
    if (byline == j.end() || !byline->is_array()) malformed(file, l, "byline", "expected an array");
    if (byline->empty()) malformed(file, l, "byline", "empty");
    for (const auto& e : *byline) {
      if (!e.is_object()) malformed(file, l, "byline", "entries must be objects");
      BylineEntry b;
      b.author = get_field<std::string>(file, l, e, "author");
      if (auto u = e.find("university"); u != e.end() && !u->is_null()) {
        if (!u->is_string()) malformed(file, l, "byline.university", "wrong type");
        b.university = u->get<std::string>();
      }
      p.byline.push_back(std::move(b));
    }
    c.publications.push_back(std::move(p));
  });

  read_jsonl(paths.competitions, [&](std::size_t l, const json& j) {
    const auto& file = paths.competitions;
    Competition comp;
    comp.id = get_field<std::string>(file, l, j, "id");
    comp.sds_id = get_field<std::string>(file, l, j, "sds");
    comp.university_id = get_field<std::string>(file, l, j, "university");
    comp.year = get_field<int>(file, l, j, "year");
    comp.president = get_field<std::string>(file, l, j, "president");
    comp.members = get_field<std::vector<std::string>>(file, l, j, "members");
    comp.winners = get_field<std::vector<std::string>>(file, l, j, "winners");
    auto apps = j.find("applicants");
    if (apps == j.end() || !apps->is_array()) malformed(file, l, "applicants", "expected an array");
    for (const auto& a : *apps) {
      if (a.is_string()) {
        comp.applicants.push_back({a.get<std::string>(), false});
      } else if (a.is_object() && a.contains("external") && a["external"].is_string()) {
        comp.applicants.push_back({a["external"].get<std::string>(), true});
      } else {
        malformed(file, l, "applicants", "entries must be a researcher id or {\"external\": key}");
      }
    }
    c.competitions.push_back(std::move(comp));
  });

  if (!paths.categories) {
    std::set<std::string> seen;
    for (const auto& p : c.publications) {
      if (seen.insert(p.subject_category).second) c.categories.push_back({p.subject_category, ""});
    }
  }

  c.link();

  std::vector<std::string> dangling;
  auto need_sds = [&](const std::string& sds, const std::string& who) {
    if (!c.find_sds(sds)) dangling.push_back("sds '" + sds + "' referenced by " + who);
  };
  auto need_researcher = [&](const std::string& id, const std::string& who) {
    if (!c.find_researcher(id)) dangling.push_back("researcher '" + id + "' referenced by " + who);
  };
  for (const auto& r : c.researchers) {
    need_sds(r.sds_id, "researcher " + r.id);
    for (const auto& a : r.affiliations) need_sds(a.sds_id, "affiliation history of researcher " + r.id);
  }
  if (paths.categories) {
    std::set<std::string> cats;
    for (const auto& cat : c.categories) cats.insert(cat.id);
    for (const auto& p : c.publications) {
      if (!cats.count(p.subject_category)) {
        dangling.push_back("subject category '" + p.subject_category + "' referenced by publication " + p.id);
      }
    }
  }
  for (const auto& comp : c.competitions) {
    const std::string who = "competition " + comp.id;
    need_sds(comp.sds_id, who);
    need_researcher(comp.president, who + " (president)");
    for (const auto& m : comp.members) need_researcher(m, who + " (member)");
    for (const auto& a : comp.applicants) {
      if (!a.external) need_researcher(a.key, who + " (applicant)");
    }
  }
  if (!dangling.empty()) {
    std::string msg = dangling.front();
    if (dangling.size() > 1) msg += " (and " + std::to_string(dangling.size() - 1) + " more)";
    for (std::size_t i = 1; i < dangling.size(); ++i) msg += "\n  " + dangling[i];
    throw CorpusError(CorpusError::Kind::DanglingReference, msg);
  }
  return c;
}

void write_corpus(const Corpus& c, const fs::path& dir) {
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw CorpusError(CorpusError::Kind::MissingInput, "cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open("taxonomy.csv");
    out << "sds_id,uda_id,byline_convention\n";
    for (const auto& s : c.taxonomy) {
      out << csv::join({s.sds_id, s.uda_id, std::string(to_string(s.convention))}) << '\n';
    }
  }
  {
    auto out = open("categories.csv");
    out << "id,description\n";
    for (const auto& cat : c.categories) out << csv::join({cat.id, cat.description}) << '\n';
  }
  {
    auto out = open("researchers.csv");
    out << "id,gender,family_name,university_id,sds_id,rank,career_start_year,career_end_year,affiliation_history\n";
    for (const auto& r : c.researchers) {
      std::string history;
      for (const auto& a : r.affiliations) {
        if (!history.empty()) history += ';';
        history += std::to_string(a.year) + ":" + a.university_id + ":" + a.sds_id;
      }
      out << csv::join({r.id, std::string(to_string(r.gender)), r.family_name, r.university_id, r.sds_id,
                        std::string(to_string(r.rank)), std::to_string(r.career_start_year),
                        r.career_end_year ? std::to_string(*r.career_end_year) : "", history})
          << '\n';
    }
  }
  {
    auto out = open("publications.jsonl");
    for (const auto& p : c.publications) {
      json byline = json::array();
      for (const auto& b : p.byline) {
        json e = {{"author", b.author}};
        e["university"] = b.university ? json(*b.university) : json(nullptr);
        byline.push_back(std::move(e));
      }
      json j = {{"id", p.id},
                {"year", p.year},
                {"subject_category", p.subject_category},
                {"citations", p.citations},
                {"byline", std::move(byline)}};
      out << j.dump() << '\n';
    }
  }
  {
    auto out = open("competitions.jsonl");
    for (const auto& comp : c.competitions) {
      json applicants = json::array();
      for (const auto& a : comp.applicants) {
        applicants.push_back(a.external ? json{{"external", a.key}} : json(a.key));
      }
      json j = {{"id", comp.id},           {"sds", comp.sds_id},         {"university", comp.university_id},
                {"year", comp.year},       {"president", comp.president}, {"members", comp.members},
                {"applicants", applicants}, {"winners", comp.winners}};
      out << j.dump() << '\n';
    }
  }
}

}  // namespace fssaudit
