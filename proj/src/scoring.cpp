#include "fssaudit/scoring.hpp"

#include <algorithm>
#include <numeric>

namespace fssaudit {

void BaselineTable::add(int year, const std::string& category, std::int64_t citations) {
  if (citations < 1) return;
  auto& cell = cells_[{year, category}];
  cell.cited_sum += citations;
  cell.cited_count += 1;
}

const BaselineCell* BaselineTable::find(int year, const std::string& category) const {
  auto it = cells_.find({year, category});
  return it == cells_.end() ? nullptr : &it->second;
}

std::optional<double> BaselineTable::mean(int year, const std::string& category) const {
  if (const auto* cell = find(year, category)) return cell->mean();
  return std::nullopt;
}

BaselineTable compute_baselines(const Corpus& corpus, YearRange window) {
  BaselineTable table;
  for (const auto& p : corpus.publications) {
    if (window.contains(p.year)) table.add(p.year, p.subject_category, p.citations);
  }
  return table;
}

ScoringError::ScoringError(Kind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}

std::vector<double> fractional_weights(std::span<const BylineEntry> byline, BylineConvention convention,
                                       const ContributionScheme& scheme) {
  const std::size_t n = byline.size();
  if (n == 0) throw ScoringError(ScoringError::Kind::InvalidByline, "empty byline");
  if (convention == BylineConvention::Alphabetical || n <= 2) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
  }

  std::vector<double> w(n);
  const auto& first = byline.front().university;
  const auto& last = byline.back().university;
  const bool same_university = first && last && *first == *last;

  if (same_university) {
    w.front() = w.back() = scheme.same_edge;
    const double inner = (1.0 - 2.0 * scheme.same_edge) / static_cast<double>(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = inner;
    return w;
  }

  w.front() = w.back() = scheme.split_edge;
  const double residual = 1.0 - 2.0 * scheme.split_edge;
  if (n == 3) {
    // second and second-to-last coincide
    w[1] = residual;
  } else if (n == 4) {
    w[1] = w[2] = residual / 2.0;
  } else {
    w[1] = w[n - 2] = scheme.split_inner;
    const double rest = (residual - 2.0 * scheme.split_inner) / static_cast<double>(n - 4);
    for (std::size_t i = 2; i + 2 < n; ++i) w[i] = rest;
  }
  return w;
}

double fractional_contribution(std::span<const BylineEntry> byline, std::size_t position,
                               BylineConvention convention, const ContributionScheme& scheme) {
  auto w = fractional_weights(byline, convention, scheme);
  if (position >= w.size()) {
    throw ScoringError(ScoringError::Kind::InvalidByline,
                       "position " + std::to_string(position) + " outside byline of " + std::to_string(w.size()));
  }
  return w[position];
}

namespace {

BylineConvention convention_of(const Corpus& corpus, const Researcher& r) {
  const Sds* sds = corpus.find_sds(r.sds_id);
  return sds ? sds->convention : BylineConvention::Alphabetical;
}

std::optional<ProductivityScore> score_one(const Researcher& r, std::size_t index, const Corpus& corpus,
                                           const BaselineTable& baselines, YearRange window,
                                           const ContributionScheme& scheme) {
  const int t = r.career(window.last).intersect(window).length();
  if (t <= 0) return std::nullopt;

  const BylineConvention convention = convention_of(corpus, r);
  double sum = 0.0;
  int n_pubs = 0;
  for (std::size_t p : corpus.publications_of(index)) {
    const Publication& pub = corpus.publications[p];
    if (!window.contains(pub.year)) continue;
    ++n_pubs;
    const BaselineCell* cell = baselines.find(pub.year, pub.subject_category);
    if (!cell || pub.citations == 0) continue;
    const auto weights = fractional_weights(pub.byline, convention, scheme);
    double share = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (pub.byline[i].author == r.id) share += weights[i];
    }
    sum += cell->normalize(pub.citations) * share;
  }
  return ProductivityScore{r.id, r.sds_id, r.rank, sum / static_cast<double>(t), t, n_pubs, 0.0};
}

}  // namespace

ProductivityScore compute_fss(const Researcher& r, const Corpus& corpus, const BaselineTable& baselines,
                              YearRange window, const ContributionScheme& scheme) {
  auto index = corpus.researcher_index(r.id);
  if (!index) throw ScoringError(ScoringError::Kind::MissingScore, "researcher '" + r.id + "' is not in the corpus");
  auto score = score_one(r, *index, corpus, baselines, window, scheme);
  if (!score) {
    throw ScoringError(ScoringError::Kind::NoCareerOverlap,
                       "researcher '" + r.id + "' has no career year in " + window.to_string());
  }
  return *score;
}

std::vector<std::optional<ProductivityScore>> fss_kernel(const Corpus& corpus, const BaselineTable& baselines,
                                                         YearRange window, Execution exec,
                                                         const ContributionScheme& scheme) {
  const auto n = static_cast<std::ptrdiff_t>(corpus.researchers.size());
  std::vector<std::optional<ProductivityScore>> out(corpus.researchers.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = score_one(corpus.researchers[i], i, corpus, baselines, window, scheme);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = score_one(corpus.researchers[i], i, corpus, baselines, window, scheme);
    }
  }
  return out;
}

void percentile_rank(std::span<ProductivityScore> cohort) {
  const std::size_t n = cohort.size();
  if (n == 0) return;
  if (n == 1) {
    cohort[0].percentile = 100.0;
    return;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cohort[a].fss < cohort[b].fss; });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && cohort[order[j + 1]].fss == cohort[order[i]].fss) ++j;
    // ranks are 1-based; positions i..j share the average of i+1..j+1
    const double avg_rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    const double pct = 100.0 * (avg_rank - 1.0) / static_cast<double>(n - 1);
    for (std::size_t k = i; k <= j; ++k) cohort[order[k]].percentile = pct;
    i = j + 1;
  }
}

double median_fss(std::span<const ProductivityScore> cohort) {
  if (cohort.empty()) return 0.0;
  std::vector<double> v;
  v.reserve(cohort.size());
  for (const auto& s : cohort) v.push_back(s.fss);
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

ScoreBook::ScoreBook(std::vector<ProductivityScore> scores) : scores_(std::move(scores)) {
  std::map<std::pair<std::string, Rank>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    by_id_.emplace(scores_[i].researcher_id, i);
    groups[{scores_[i].sds_id, scores_[i].rank}].push_back(i);
  }
  for (auto& [key, members] : groups) {
    std::vector<ProductivityScore> cohort;
    cohort.reserve(members.size());
    for (auto i : members) cohort.push_back(scores_[i]);
    percentile_rank(cohort);
    for (std::size_t k = 0; k < members.size(); ++k) scores_[members[k]].percentile = cohort[k].percentile;
    cohorts_[key] = {median_fss(cohort), members.size()};
  }
}

const ProductivityScore* ScoreBook::find(std::string_view researcher_id) const {
  auto it = by_id_.find(std::string(researcher_id));
  return it == by_id_.end() ? nullptr : &scores_[it->second];
}

const ProductivityScore& ScoreBook::at(std::string_view researcher_id) const {
  if (const auto* s = find(researcher_id)) return *s;
  throw ScoringError(ScoringError::Kind::MissingScore, "no score for researcher '" + std::string(researcher_id) + "'");
}

std::optional<double> ScoreBook::cohort_median(const std::string& sds_id, Rank rank) const {
  auto it = cohorts_.find({sds_id, rank});
  if (it == cohorts_.end()) return std::nullopt;
  return it->second.first;
}

std::size_t ScoreBook::cohort_size(const std::string& sds_id, Rank rank) const {
  auto it = cohorts_.find({sds_id, rank});
  return it == cohorts_.end() ? 0 : it->second.second;
}

ScoreBook score_corpus(const Corpus& corpus, YearRange window, Execution exec, const ContributionScheme& scheme) {
  const auto baselines = compute_baselines(corpus, window);
  auto raw = fss_kernel(corpus, baselines, window, exec, scheme);
  std::vector<ProductivityScore> scores;
  scores.reserve(raw.size());
  for (auto& s : raw) {
    if (s) scores.push_back(std::move(*s));
  }
  return ScoreBook(std::move(scores));
}

}  // namespace fssaudit
