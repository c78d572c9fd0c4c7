#include "fssaudit/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fssaudit/bias.hpp"
#include "fssaudit/features.hpp"
#include "fssaudit/report.hpp"
#include "fssaudit/scoring.hpp"
#include "fssaudit/stats.hpp"

namespace fssaudit {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ConfigError(ConfigError::Kind::InvalidConfig, what); }

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) invalid("cannot write " + path.string());
  out << content;
}

Corpus load(const RunConfig& cfg) {
  if (cfg.input_dir.empty()) invalid("--input-dir is required");
  if (!fs::is_directory(cfg.input_dir)) {
    throw CorpusError(CorpusError::Kind::MissingInput, "input directory not found: " + cfg.input_dir.string());
  }
  CorpusConfig cc;
  cc.productivity_window = cfg.window_fss;
  cc.collaboration_window = cfg.window_collab;
  return load_corpus(CorpusPaths::in_directory(cfg.input_dir), cc);
}

const char* kCaveats[] = {
    "Bias flags rest on a bibliometric productivity proxy and a fixed percentile threshold; they mark merit gaps, "
    "not intent, and call for cautious interpretation.",
    "Citation baselines and percentile cohorts are computed from the loaded corpus only, not from a national "
    "reference population.",
    "Worst winner and best non-winner are taken over eligible applicants only.",
};

}  // namespace

void RunConfig::validate() const {
  if (window_fss.empty()) invalid("--window-fss must be a nonempty year range");
  if (window_collab.empty()) invalid("--window-collab must be a nonempty year range");
  if (!(threshold > 0.0)) invalid("--threshold must be > 0");
  if (clusters != "competition") invalid("--clusters supports only 'competition'");
}

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  GenConfig g = cfg.gen;
  g.productivity_window = cfg.window_fss;
  g.collaboration_window = cfg.window_collab;
  const Generated gen = generate(g);
  write_corpus(gen.corpus, cfg.out_dir);
  write_ground_truth(gen.truth, cfg.out_dir / "ground_truth.jsonl");
  std::size_t injected = 0;
  for (const auto& t : gen.truth.competitions) injected += t.injected_bias ? 1 : 0;
  out << "seed " << g.seed << ": " << gen.corpus.researchers.size() << " researchers, "
      << gen.corpus.publications.size() << " publications, " << gen.corpus.competitions.size() << " competitions ("
      << injected << " with selected winners differing from merit winners) written to " << cfg.out_dir.string()
      << '\n';
  return kExitOk;
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  const Corpus corpus = load(cfg);
  const ScoreBook scores = score_corpus(corpus, cfg.window_fss);
  write_file(cfg.out_dir / "scores.csv", scores_csv(scores));
  write_file(cfg.out_dir / "scores_meta.json", scores_metadata(scores, cfg.window_fss).dump(2) + "\n");
  out << "scored " << scores.scores().size() << " of " << corpus.researchers.size() << " researchers over "
      << cfg.window_fss.to_string() << " -> " << (cfg.out_dir / "scores.csv").string() << '\n';
  return kExitOk;
}

int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Corpus corpus = load(cfg);
  const ScoreBook scores = score_corpus(corpus, cfg.window_fss);
  const EligibleSet eligible = filter_eligible(corpus, scores);
  const auto views = competition_views(corpus, scores, eligible);
  if (views.empty()) err << "warning: no competition has both an eligible winner and an eligible non-winner\n";

  const Findings findings = detect_all(views, cfg.threshold);
  AggregateOptions agg;
  agg.pooled = !cfg.welch;
  agg.positive_levels_p1_only = cfg.positive_levels_p1_only;
  const auto udas = corpus.udas();

  Json audit;
  audit["threshold"] = cfg.threshold;
  audit["retained_competitions"] = views.size();
  audit["test"] = cfg.welch ? "welch" : "pooled";
  audit["positive_levels"] = cfg.positive_levels_p1_only ? "p-i" : "all";
  audit["negative"] = bias_table_json(aggregate_bias(BiasKind::Negative, findings.negative, views, udas, agg));
  audit["positive"] = bias_table_json(aggregate_bias(BiasKind::Positive, findings.positive, views, udas, agg));
  Json notes = Json::array();
  for (const char* n : kCaveats) notes.push_back(n);
  audit["notes"] = std::move(notes);

  write_file(cfg.out_dir / "findings.csv", findings_csv(findings));
  write_file(cfg.out_dir / "audit.json", audit.dump(2) + "\n");
  RenderOptions ro;
  ro.one_sided = cfg.one_sided;
  const std::string text = render_audit(audit, ro);
  write_file(cfg.out_dir / "audit.txt", text);
  out << text;
  return kExitOk;
}

int cmd_regress(const RunConfig& cfg, std::ostream& out) {
  const Corpus corpus = load(cfg);
  const ScoreBook scores = score_corpus(corpus, cfg.window_fss);
  const EligibleSet eligible = filter_eligible(corpus, scores);
  FeatureOptions fo;
  fo.window = cfg.window_collab;
  fo.overlap_requires_sds = cfg.overlap_requires_sds;
  const auto rows = build_feature_table(corpus, scores, eligible, fo);
  write_file(cfg.out_dir / "features.csv", features_csv(rows));

  Json reg;
  reg["descriptives"] = descriptives_json(rows);
  reg["correlations"] = correlations_json(rows);
  reg["regression"] = regression_json(fit_logit(design_from_features(rows)));
  write_file(cfg.out_dir / "regression.json", reg.dump(2) + "\n");
  RenderOptions ro;
  ro.one_sided = cfg.one_sided;
  const std::string text = render_regression(reg, ro);
  write_file(cfg.out_dir / "regression.txt", text);
  out << text;
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Productivity scoring and recruitment bias audit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string window_fss = cfg.window_fss.to_string(), window_collab = cfg.window_collab.to_string();
  std::string input_dir, out_dir = ".";

  auto common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) sub->add_option("--input-dir", input_dir, "Directory holding the corpus files")->required();
    sub->add_option("--out-dir", out_dir, "Directory for outputs");
    sub->add_option("--window-fss", window_fss, "Productivity window Y0:Y1");
    sub->add_option("--window-collab", window_collab, "Collaboration window Y0:Y1");
  };
  auto analysis = [&](CLI::App* sub) {
    sub->add_option("--threshold", cfg.threshold, "Bias threshold in percentile points");
    sub->add_option("--clusters", cfg.clusters, "Cluster variable")->check(CLI::IsMember({"competition"}));
    sub->add_flag("--welch", cfg.welch, "Welch instead of pooled-variance t-tests");
    sub->add_flag("--one-sided", cfg.one_sided, "Significance stars from one-sided p values");
    sub->add_flag("--favoritism-p1-levels", cfg.positive_levels_p1_only,
                  "Restrict favoritism level statistics to condition P-i findings");
    sub->add_flag("!--overlap-university-only", cfg.overlap_requires_sds,
                  "CP/CE overlap counts matching university only, ignoring SDS");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus with ground truth");
  common(gen, false);
  auto& g = cfg.gen;
  gen->add_option("--seed", g.seed, "Random seed");
  gen->add_option("--n-sds", g.n_sds);
  gen->add_option("--n-udas", g.n_udas);
  gen->add_option("--n-universities", g.n_universities);
  gen->add_option("--researchers-per-sds", g.researchers_per_sds);
  gen->add_option("--competitions-per-sds", g.competitions_per_sds);
  gen->add_option("--winners", g.winners_per_competition);
  gen->add_option("--min-applicants", g.min_applicants);
  gen->add_option("--max-applicants", g.max_applicants);
  gen->add_option("--female-share", g.female_share);
  gen->add_option("--w-merit", g.weights.merit);
  gen->add_option("--w-cp", g.weights.cp);
  gen->add_option("--w-ce", g.weights.ce);
  gen->add_option("--w-pp", g.weights.pp);
  gen->add_option("--w-ne", g.weights.ne);
  gen->add_option("--w-sp", g.weights.sp);
  gen->add_option("--noise-sd", g.weights.noise_sd);

  auto* score = app.add_subcommand("score", "Compute FSS and percentile ranks");
  common(score, true);
  auto* audit = app.add_subcommand("audit", "Detect negative and positive bias and aggregate by gender and UDA");
  common(audit, true);
  analysis(audit);
  auto* regress = app.add_subcommand("regress", "Descriptives, correlations and the clustered logit model");
  common(regress, true);
  analysis(regress);
  auto* report = app.add_subcommand("report", "Run score, audit and regress");
  common(report, true);
  analysis(report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    cfg.input_dir = input_dir;
    cfg.out_dir = out_dir;
    cfg.window_fss = YearRange::parse(window_fss);
    cfg.window_collab = YearRange::parse(window_collab);
    cfg.validate();

    if (gen->parsed()) return cmd_gen(cfg, out);
    if (score->parsed()) return cmd_score(cfg, out);
    if (audit->parsed()) return cmd_audit(cfg, out, err);
    if (regress->parsed()) return cmd_regress(cfg, out);
    if (report->parsed()) {
      cmd_score(cfg, out);
      cmd_audit(cfg, out, err);
      return cmd_regress(cfg, out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CorpusError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ScoringError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const StatsError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace fssaudit
