#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fssaudit/corpus.hpp"
#include "fssaudit/features.hpp"
#include "fssaudit/parallel.hpp"
#include "fssaudit/scoring.hpp"
#include "fssaudit/stats.hpp"

namespace fssaudit {

enum class BiasKind { Negative, Positive };

// Condition flags. N1..N3 are the three discrimination conditions, P1/P2 the
// two sufficient favoritism conditions.
enum Trigger : unsigned {
  kN1 = 1u << 0,  // >= threshold above the worst winner
  kN2 = 1u << 1,  // raw FSS not below the cohort median
  kN3 = 1u << 2,  // within threshold of the best candidate meeting N1 and N2
  kP1 = 1u << 3,  // >= threshold below the best non-winner
  kP2 = 1u << 4,  // raw FSS below the cohort median
};

std::string_view to_string(BiasKind k);
std::string triggers_to_string(unsigned triggers);  // e.g. "N-i;N-ii;N-iii"

struct Candidate {
  std::string researcher_id;
  bool winner = false;
  Gender gender = Gender::M;
  double percentile = 0.0;
  double fss = 0.0;
  double cohort_median = 0.0;  // median raw FSS of the candidate's SDS x assistant cohort
};

struct CompetitionView {
  std::string competition_id;
  std::string uda_id;
  std::vector<Candidate> candidates;  // eligible applicants only
};

struct BiasFinding {
  std::string competition_id;
  std::string researcher_id;
  BiasKind kind = BiasKind::Negative;
  double level = 0.0;  // D for Negative, F for Positive
  unsigned triggers = 0;

  friend bool operator==(const BiasFinding&, const BiasFinding&) = default;
};

// Findings are returned in candidate order.
std::vector<BiasFinding> detect_negative(const CompetitionView& comp, double threshold = 20.0);
std::vector<BiasFinding> detect_positive(const CompetitionView& comp, double threshold = 20.0);

// Views for the retained competitions, sorted by competition id.
std::vector<CompetitionView> competition_views(const Corpus& corpus, const ScoreBook& scores,
                                               const EligibleSet& eligible);

struct Findings {
  std::vector<BiasFinding> negative;
  std::vector<BiasFinding> positive;
};

Findings detect_all(const std::vector<CompetitionView>& views, double threshold = 20.0,
                    Execution exec = Execution::Parallel);

// Comma-separated export: competition_id,researcher_id,kind,level,triggers
std::string findings_csv(const Findings& f);

struct LevelStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;
  double max = 0.0;
};

struct GenderTest {
  std::optional<TestResult> test;  // absent when undefined
  std::string note;                // why undefined
};

struct BiasCell {
  std::size_t flagged_f = 0, flagged_m = 0;
  std::size_t applicants_f = 0, applicants_m = 0;
  std::optional<LevelStats> level_f, level_m, level_total;
  std::optional<CorrelationResult> corr_f, corr_m, corr_total;  // FSS percentile vs outcome
  GenderTest incidence;  // flagged indicator, female vs male
  GenderTest levels;     // levels, female vs male

  std::size_t flagged() const { return flagged_f + flagged_m; }
  std::size_t applicants() const { return applicants_f + applicants_m; }
};

struct BiasTable {
  BiasKind kind = BiasKind::Negative;
  std::vector<std::string> udas;  // row order
  std::map<std::string, BiasCell> rows;
  BiasCell total;
  // Per-UDA test families (corr_f, corr_m, corr_total, incidence, levels) and
  // their sizes: the number of UDA rows where the test is defined.
  std::map<std::string, std::size_t> bonferroni_families;
};

struct AggregateOptions {
  bool pooled = true;
  // Restrict favoritism level statistics to findings that satisfy P1.
  bool positive_levels_p1_only = false;
};

BiasTable aggregate_bias(BiasKind kind, const std::vector<BiasFinding>& findings,
                         const std::vector<CompetitionView>& views, const std::vector<std::string>& udas,
                         const AggregateOptions& options = {});

}  // namespace fssaudit
