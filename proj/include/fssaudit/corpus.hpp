#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fssaudit {

// Closed interval of calendar years.
struct YearRange {
  int first = 0;
  int last = -1;

  bool empty() const { return last < first; }
  bool contains(int year) const { return year >= first && year <= last; }
  int length() const { return empty() ? 0 : last - first + 1; }
  YearRange intersect(const YearRange& other) const;

  static YearRange parse(std::string_view text);  // "Y0:Y1"
  std::string to_string() const;

  friend bool operator==(const YearRange&, const YearRange&) = default;
};

enum class Gender { F, M };
enum class Rank { Assistant, Associate, Full };
enum class BylineConvention { Alphabetical, ContributionOrdered };

std::string_view to_string(Gender g);
std::string_view to_string(Rank r);    // AST | ASO | FUL
std::string_view to_string(BylineConvention c);  // ALPHA | CONTRIB

struct SubjectCategory {
  std::string id;
  std::string description;
  friend bool operator==(const SubjectCategory&, const SubjectCategory&) = default;
};

struct Sds {
  std::string sds_id;
  std::string uda_id;
  BylineConvention convention = BylineConvention::Alphabetical;
  friend bool operator==(const Sds&, const Sds&) = default;
};

struct Affiliation {
  int year = 0;
  std::string university_id;
  std::string sds_id;
  friend bool operator==(const Affiliation&, const Affiliation&) = default;
};

struct Researcher {
  std::string id;
  Gender gender = Gender::M;
  std::string family_name;
  std::string university_id;
  std::string sds_id;
  Rank rank = Rank::Assistant;
  int career_start_year = 0;
  std::optional<int> career_end_year;
  // Explicit per-year records; career years without a record fall back to
  // (university_id, sds_id).
  std::vector<Affiliation> affiliations;

  // Career interval, open-ended careers clipped to `horizon`.
  YearRange career(int horizon) const;
  bool active_in(int year) const;
  // Affiliation held in `year`, or nullopt outside the career interval.
  std::optional<Affiliation> affiliation_in(int year) const;

  friend bool operator==(const Researcher&, const Researcher&) = default;
};

struct BylineEntry {
  std::string author;  // researcher id or opaque external key
  std::optional<std::string> university;
  friend bool operator==(const BylineEntry&, const BylineEntry&) = default;
};

struct Publication {
  std::string id;
  int year = 0;
  std::string subject_category;
  std::int64_t citations = 0;
  std::vector<BylineEntry> byline;
  friend bool operator==(const Publication&, const Publication&) = default;
};

// Applicants outside the researcher roster carry an opaque key only.
struct Applicant {
  std::string key;
  bool external = false;
  friend bool operator==(const Applicant&, const Applicant&) = default;
};

struct Competition {
  std::string id;
  std::string sds_id;
  std::string university_id;
  int year = 0;
  std::string president;
  std::vector<std::string> members;  // non-president members, 4 expected
  std::vector<Applicant> applicants;
  std::vector<std::string> winners;  // applicant keys

  bool is_winner(std::string_view key) const;
  friend bool operator==(const Competition&, const Competition&) = default;
};

struct CorpusConfig {
  YearRange productivity_window{2004, 2008};
  YearRange collaboration_window{2001, 2010};
  // Publications must fall in this range; defaults to the hull of both windows.
  std::optional<YearRange> publication_years;

  YearRange publication_range() const;
};

class CorpusError : public std::runtime_error {
 public:
  enum class Kind { MalformedRecord, DanglingReference, DuplicateId, MissingInput };

  CorpusError(Kind kind, std::string message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(CorpusError::Kind k);

// Immutable after construction. Lookup indices are built once by `link()`.
class Corpus {
 public:
  CorpusConfig config;
  std::vector<Sds> taxonomy;
  std::vector<SubjectCategory> categories;
  std::vector<Researcher> researchers;
  std::vector<Publication> publications;
  std::vector<Competition> competitions;

  // Builds lookup indices. Throws CorpusError::DuplicateId.
  void link();

  const Researcher* find_researcher(std::string_view id) const;
  const Sds* find_sds(std::string_view sds_id) const;
  const Competition* find_competition(std::string_view id) const;
  std::optional<std::size_t> researcher_index(std::string_view id) const;

  // Indices into `publications` of every publication whose byline names the
  // researcher, in file order.
  const std::vector<std::size_t>& publications_of(std::size_t researcher_index) const;

  // Distinct UDA ids in taxonomy order.
  std::vector<std::string> udas() const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.taxonomy == b.taxonomy && a.categories == b.categories &&
           a.researchers == b.researchers && a.publications == b.publications &&
           a.competitions == b.competitions;
  }

 private:
  std::unordered_map<std::string, std::size_t> researcher_by_id_;
  std::unordered_map<std::string, std::size_t> sds_by_id_;
  std::unordered_map<std::string, std::size_t> competition_by_id_;
  std::vector<std::vector<std::size_t>> pubs_by_researcher_;
};

struct CorpusPaths {
  std::filesystem::path researchers;
  std::filesystem::path publications;
  std::filesystem::path competitions;
  std::filesystem::path taxonomy;
  std::optional<std::filesystem::path> categories;

  // researchers.csv, publications.jsonl, competitions.jsonl, taxonomy.csv and
  // an optional categories.csv inside `dir`.
  static CorpusPaths in_directory(const std::filesystem::path& dir);
};

// Parses and cross-links all input files. Every unresolved reference is
// collected into a single DanglingReference error.
Corpus load_corpus(const CorpusPaths& paths, const CorpusConfig& config = {});

// Writes the same file set `load_corpus` reads.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

struct Violation {
  std::string type;
  std::string entity_id;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_corpus(const Corpus& corpus);

// Case-insensitive, trimmed, internal whitespace collapsed.
std::string normalize_family_name(std::string_view name);

}  // namespace fssaudit
