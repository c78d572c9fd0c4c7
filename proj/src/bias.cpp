#include "fssaudit/bias.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "format.hpp"

namespace fssaudit {

std::string_view to_string(BiasKind k) { return k == BiasKind::Negative ? "negative" : "positive"; }

std::string triggers_to_string(unsigned t) {
  static constexpr std::pair<unsigned, const char*> names[] = {
      {kN1, "N-i"}, {kN2, "N-ii"}, {kN3, "N-iii"}, {kP1, "P-i"}, {kP2, "P-ii"}};
  std::string out;
  for (auto [bit, name] : names) {
    if (!(t & bit)) continue;
    if (!out.empty()) out += ';';
    out += name;
  }
  return out;
}

std::vector<BiasFinding> detect_negative(const CompetitionView& comp, double threshold) {
  std::optional<double> worst_winner;
  bool any_loser = false;
  for (const auto& c : comp.candidates) {
    if (c.winner) {
      worst_winner = worst_winner ? std::min(*worst_winner, c.percentile) : c.percentile;
    } else {
      any_loser = true;
    }
  }
  if (!worst_winner || !any_loser) return {};

  std::vector<const Candidate*> stage1;
  for (const auto& c : comp.candidates) {
    if (!c.winner && c.percentile - *worst_winner >= threshold && c.fss >= c.cohort_median) stage1.push_back(&c);
  }
  if (stage1.empty()) return {};

  double best = stage1.front()->percentile;
  for (const auto* c : stage1) best = std::max(best, c->percentile);

  std::vector<BiasFinding> out;
  for (const auto* c : stage1) {
    if (best - c->percentile > threshold) continue;
    out.push_back({comp.competition_id, c->researcher_id, BiasKind::Negative,
                   c->percentile - (*worst_winner + threshold), kN1 | kN2 | kN3});
  }
  return out;
}

std::vector<BiasFinding> detect_positive(const CompetitionView& comp, double threshold) {
  std::optional<double> best_loser;
  bool any_winner = false;
  for (const auto& c : comp.candidates) {
    if (c.winner) {
      any_winner = true;
    } else {
      best_loser = best_loser ? std::max(*best_loser, c.percentile) : c.percentile;
    }
  }
  if (!best_loser || !any_winner) return {};

  std::vector<BiasFinding> out;
  for (const auto& c : comp.candidates) {
    if (!c.winner) continue;
    unsigned t = 0;
    if (*best_loser - c.percentile >= threshold) t |= kP1;
    if (c.fss < c.cohort_median) t |= kP2;
    if (!t) continue;
    out.push_back({comp.competition_id, c.researcher_id, BiasKind::Positive,
                   *best_loser - (c.percentile + threshold), t});
  }
  return out;
}

std::vector<CompetitionView> competition_views(const Corpus& corpus, const ScoreBook& scores,
                                               const EligibleSet& eligible) {
  std::vector<CompetitionView> views;
  for (const auto& id : eligible.retained) {
    const Competition* comp = corpus.find_competition(id);
    if (!comp) continue;
    CompetitionView v;
    v.competition_id = id;
    const Sds* sds = corpus.find_sds(comp->sds_id);
    v.uda_id = sds ? sds->uda_id : "";
    for (const auto& rid : eligible.applicants.at(id)) {
      const Researcher* r = corpus.find_researcher(rid);
      const ProductivityScore& s = scores.at(rid);
      Candidate c;
      c.researcher_id = rid;
      c.winner = comp->is_winner(rid);
      c.gender = r->gender;
      c.percentile = s.percentile;
      c.fss = s.fss;
      c.cohort_median = scores.cohort_median(s.sds_id, s.rank).value_or(0.0);
      v.candidates.push_back(std::move(c));
    }
    views.push_back(std::move(v));
  }
  std::sort(views.begin(), views.end(),
            [](const auto& a, const auto& b) { return a.competition_id < b.competition_id; });
  return views;
}

Findings detect_all(const std::vector<CompetitionView>& views, double threshold, Execution exec) {
  std::vector<std::vector<BiasFinding>> neg(views.size()), pos(views.size());
  const auto n = static_cast<std::ptrdiff_t>(views.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      neg[i] = detect_negative(views[i], threshold);
      pos[i] = detect_positive(views[i], threshold);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      neg[i] = detect_negative(views[i], threshold);
      pos[i] = detect_positive(views[i], threshold);
    }
  }
  Findings f;
  for (std::size_t i = 0; i < views.size(); ++i) {
    f.negative.insert(f.negative.end(), neg[i].begin(), neg[i].end());
    f.positive.insert(f.positive.end(), pos[i].begin(), pos[i].end());
  }
  return f;
}

std::string findings_csv(const Findings& f) {
  std::ostringstream out;
  out << "competition_id,researcher_id,kind,level,triggers\n";
  for (const auto* list : {&f.negative, &f.positive}) {
    for (const auto& b : *list) {
      out << csv::join({b.competition_id, b.researcher_id, std::string(to_string(b.kind)), fmt_real(b.level),
                        triggers_to_string(b.triggers)})
          << '\n';
    }
  }
  return out.str();
}

namespace {

std::optional<LevelStats> level_stats(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  const Summary s = summarize(v);
  return LevelStats{s.n, s.mean, s.sd, s.max};
}

std::optional<CorrelationResult> try_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return pearson(x, y);
  } catch (const StatsError&) {
    return std::nullopt;
  }
}

GenderTest try_t(const std::vector<double>& f, const std::vector<double>& m, bool pooled) {
  if (f.size() < 2 || m.size() < 2) return {std::nullopt, "fewer than two observations in a gender group"};
  try {
    return {two_sample_t(f, m, pooled), ""};
  } catch (const StatsError& e) {
    return {std::nullopt, e.what()};
  }
}

struct Accumulator {
  std::vector<double> pct_f, pct_m, out_f, out_m;       // FSS percentile and outcome per applicant
  std::vector<double> flag_f, flag_m;                   // flagged indicator per applicant
  std::vector<double> level_f, level_m;                 // levels of flagged candidates

  BiasCell cell(bool pooled) const {
    BiasCell c;
    c.applicants_f = pct_f.size();
    c.applicants_m = pct_m.size();
    for (double v : flag_f) c.flagged_f += v > 0 ? 1 : 0;
    for (double v : flag_m) c.flagged_m += v > 0 ? 1 : 0;
    c.level_f = level_stats(level_f);
    c.level_m = level_stats(level_m);
    std::vector<double> all = level_f;
    all.insert(all.end(), level_m.begin(), level_m.end());
    c.level_total = level_stats(all);
    c.corr_f = try_pearson(pct_f, out_f);
    c.corr_m = try_pearson(pct_m, out_m);
    std::vector<double> pct = pct_f, out = out_f;
    pct.insert(pct.end(), pct_m.begin(), pct_m.end());
    out.insert(out.end(), out_m.begin(), out_m.end());
    c.corr_total = try_pearson(pct, out);
    if (c.flagged() == 0) {
      c.incidence = {std::nullopt, "no flagged candidates"};
      c.levels = {std::nullopt, "no flagged candidates"};
    } else {
      c.incidence = try_t(flag_f, flag_m, pooled);
      c.levels = try_t(level_f, level_m, pooled);
    }
    return c;
  }
};

template <typename Get>
void apply_bonferroni(BiasTable& table, const std::string& family, Get get) {
  std::vector<TestResult*> tests;
  for (auto& [uda, cell] : table.rows) {
    if (TestResult* t = get(cell)) tests.push_back(t);
  }
  table.bonferroni_families[family] = tests.size();
  for (auto* t : tests) t->p_bonferroni = std::min(1.0, static_cast<double>(tests.size()) * t->p_two_sided);
}

}  // namespace

BiasTable aggregate_bias(BiasKind kind, const std::vector<BiasFinding>& findings,
                         const std::vector<CompetitionView>& views, const std::vector<std::string>& udas,
                         const AggregateOptions& options) {
  std::map<std::pair<std::string, std::string>, const BiasFinding*> flagged;
  for (const auto& f : findings) {
    if (f.kind == kind) flagged[{f.competition_id, f.researcher_id}] = &f;
  }

  std::map<std::string, Accumulator> acc;
  Accumulator total;
  for (const auto& v : views) {
    auto& a = acc[v.uda_id];
    for (const auto& c : v.candidates) {
      const bool female = c.gender == Gender::F;
      auto it = flagged.find({v.competition_id, c.researcher_id});
      const bool is_flagged = it != flagged.end();
      for (Accumulator* target : {&a, &total}) {
        (female ? target->pct_f : target->pct_m).push_back(c.percentile);
        (female ? target->out_f : target->out_m).push_back(c.winner ? 1.0 : 0.0);
        (female ? target->flag_f : target->flag_m).push_back(is_flagged ? 1.0 : 0.0);
        if (is_flagged) {
          const bool counted = !(kind == BiasKind::Positive && options.positive_levels_p1_only) ||
                               (it->second->triggers & kP1);
          if (counted) (female ? target->level_f : target->level_m).push_back(it->second->level);
        }
      }
    }
  }

  BiasTable table;
  table.kind = kind;
  table.udas = udas;
  for (const auto& [uda, a] : acc) {
    if (std::find(table.udas.begin(), table.udas.end(), uda) == table.udas.end()) table.udas.push_back(uda);
  }
  for (const auto& uda : table.udas) {
    auto it = acc.find(uda);
    table.rows[uda] = it == acc.end() ? Accumulator{}.cell(options.pooled) : it->second.cell(options.pooled);
  }
  table.total = total.cell(options.pooled);

  auto test_of = [](std::optional<CorrelationResult>& c) -> TestResult* { return c ? &c->test : nullptr; };
  apply_bonferroni(table, "corr_f", [&](BiasCell& c) { return test_of(c.corr_f); });
  apply_bonferroni(table, "corr_m", [&](BiasCell& c) { return test_of(c.corr_m); });
  apply_bonferroni(table, "corr_total", [&](BiasCell& c) { return test_of(c.corr_total); });
  apply_bonferroni(table, "incidence", [](BiasCell& c) { return c.incidence.test ? &*c.incidence.test : nullptr; });
  apply_bonferroni(table, "levels", [](BiasCell& c) { return c.levels.test ? &*c.levels.test : nullptr; });
  return table;
}

}  // namespace fssaudit
