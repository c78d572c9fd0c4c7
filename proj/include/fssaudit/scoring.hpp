#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fssaudit/corpus.hpp"
#include "fssaudit/parallel.hpp"

namespace fssaudit {

// Mean citations of the cited publications in one (year, subject category)
// cell, kept as an exact integer ratio so that rescaling every citation count
// by an integer leaves normalized citations bit-identical.
struct BaselineCell {
  std::int64_t cited_sum = 0;
  std::int64_t cited_count = 0;

  double mean() const { return static_cast<double>(cited_sum) / static_cast<double>(cited_count); }
  double normalize(std::int64_t citations) const {
    return static_cast<double>(citations * cited_count) / static_cast<double>(cited_sum);
  }
};

class BaselineTable {
 public:
  using Key = std::pair<int, std::string>;

  void add(int year, const std::string& category, std::int64_t citations);
  const BaselineCell* find(int year, const std::string& category) const;
  std::optional<double> mean(int year, const std::string& category) const;
  std::size_t size() const { return cells_.size(); }
  const std::map<Key, BaselineCell>& cells() const { return cells_; }

 private:
  std::map<Key, BaselineCell> cells_;
};

// Cells exist only where at least one publication in the window has >= 1 citation.
BaselineTable compute_baselines(const Corpus& corpus, YearRange window);

class ScoringError : public std::runtime_error {
 public:
  enum class Kind { InvalidByline, NoCareerOverlap, MissingScore };
  ScoringError(Kind kind, std::string message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Weight rules for contribution-ordered bylines. Defaults follow the 40/20 and
// 30/15/10 schemes; the short-byline cases collapse unused slots onto the
// authors that exist.
struct ContributionScheme {
  double same_edge = 0.40;       // first and last, same university
  double split_edge = 0.30;      // first and last, different universities
  double split_inner = 0.15;     // second and second-to-last, different universities
};

// Weights for every byline position; sums to 1. Throws InvalidByline when empty.
std::vector<double> fractional_weights(std::span<const BylineEntry> byline, BylineConvention convention,
                                       const ContributionScheme& scheme = {});

double fractional_contribution(std::span<const BylineEntry> byline, std::size_t position,
                               BylineConvention convention, const ContributionScheme& scheme = {});

struct ProductivityScore {
  std::string researcher_id;
  std::string sds_id;
  Rank rank = Rank::Assistant;
  double fss = 0.0;
  int t = 0;
  int n_pubs = 0;
  double percentile = 0.0;
};

// Throws NoCareerOverlap when the researcher has no career year in the window.
ProductivityScore compute_fss(const Researcher& r, const Corpus& corpus, const BaselineTable& baselines,
                              YearRange window, const ContributionScheme& scheme = {});

// Sets percentile on every score: average rank over ascending FSS mapped to
// [0, 100]; a single-member cohort gets 100.
void percentile_rank(std::span<ProductivityScore> cohort);

// Median of raw FSS (midpoint average for even sizes).
double median_fss(std::span<const ProductivityScore> cohort);

// Scores for every researcher with a career year in the window, percentiles
// ranked within SDS x rank cohorts.
class ScoreBook {
 public:
  ScoreBook() = default;
  explicit ScoreBook(std::vector<ProductivityScore> scores);

  const std::vector<ProductivityScore>& scores() const { return scores_; }
  const ProductivityScore* find(std::string_view researcher_id) const;
  const ProductivityScore& at(std::string_view researcher_id) const;  // MissingScore
  std::optional<double> cohort_median(const std::string& sds_id, Rank rank) const;
  std::size_t cohort_size(const std::string& sds_id, Rank rank) const;

 private:
  std::vector<ProductivityScore> scores_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::pair<std::string, Rank>, std::pair<double, std::size_t>> cohorts_;
};

ScoreBook score_corpus(const Corpus& corpus, YearRange window, Execution exec = Execution::Parallel,
                       const ContributionScheme& scheme = {});

// Raw FSS for every researcher in corpus order; nullopt where t = 0.
std::vector<std::optional<ProductivityScore>> fss_kernel(const Corpus& corpus, const BaselineTable& baselines,
                                                         YearRange window, Execution exec,
                                                         const ContributionScheme& scheme = {});

}  // namespace fssaudit
