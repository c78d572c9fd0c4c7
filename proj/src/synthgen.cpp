#include "fssaudit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "fssaudit/features.hpp"
#include "fssaudit/scoring.hpp"

namespace fssaudit {

ConfigError::ConfigError(Kind kind, std::string message)
    : std::runtime_error((kind == Kind::InfeasibleConfig ? "InfeasibleConfig: " : "InvalidConfig: ") + message),
      kind_(kind) {}

namespace {

[[noreturn]] void infeasible(const std::string& what) { throw ConfigError(ConfigError::Kind::InfeasibleConfig, what); }

int rank_count(int total, double share) { return static_cast<int>(std::lround(total * share)); }

std::string pad(int v, int width) {
  std::string s = std::to_string(v);
  return std::string(width > static_cast<int>(s.size()) ? width - s.size() : 0, '0') + s;
}

// Deterministic pseudo-surname for pool slot k; distinct for every k.
std::string surname(int k) {
  static constexpr const char* head[] = {"Ba", "Be", "Ca", "Co", "De", "Fa", "Ga", "Lo",
                                         "Ma", "Mo", "Pe", "Ri", "Sa", "To", "Va", "Zu"};
  static constexpr const char* mid[] = {"r", "l", "n", "s", "t", "nt", "rd", "ss"};
  static constexpr const char* tail[] = {"ini", "etti", "oni", "ari", "elli", "ucci", "ese", "otti"};
  std::string s = std::string(head[k % 16]) + mid[(k / 16) % 8] + tail[(k / 128) % 8];
  if (k >= 1024) s += std::to_string(k / 1024);
  return s;
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine); }
  bool bernoulli(double p) { return uniform() < p; }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  int poisson(double mean) { return mean <= 0 ? 0 : std::poisson_distribution<int>(mean)(engine); }
  double gamma(double shape, double scale) { return std::gamma_distribution<double>(shape, scale)(engine); }
  double normal(double sd) { return sd <= 0 ? 0.0 : std::normal_distribution<double>(0.0, sd)(engine); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }
};

std::vector<std::string> top_k(const std::map<std::string, double>& score, int k) {
  std::vector<std::pair<std::string, double>> v(score.begin(), score.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  for (int i = 0; i < k && i < static_cast<int>(v.size()); ++i) out.push_back(v[i].first);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void GenConfig::validate() const {
  if (n_sds < 1) infeasible("n_sds must be >= 1");
  if (n_udas < 1) infeasible("n_udas must be >= 1");
  if (n_udas > n_sds) infeasible("n_udas must not exceed n_sds");
  if (n_universities < 1) infeasible("n_universities must be >= 1");
  if (researchers_per_sds < 1) infeasible("researchers_per_sds must be >= 1");
  if (competitions_per_sds < 1) infeasible("competitions_per_sds must be >= 1");
  if (categories_per_sds < 1) infeasible("categories_per_sds must be >= 1");
  if (surname_pool < 1) infeasible("surname_pool must be >= 1");
  for (double share : {female_share, full_share, associate_share, colleague_share, mobility, local_applicant_share,
                       internal_president_share}) {
    if (!(share >= 0.0 && share <= 1.0)) infeasible("shares must lie in [0,1]");
  }
  if (full_share + associate_share > 1.0) infeasible("full_share + associate_share exceeds 1");
  if (weights.noise_sd < 0) infeasible("noise_sd must be >= 0");
  if (winners_per_competition < 1 || winners_per_competition > 2) infeasible("winners_per_competition must be 1 or 2");
  if (min_applicants < winners_per_competition + 1) infeasible("min_applicants must exceed winners_per_competition");
  if (max_applicants < min_applicants) infeasible("max_applicants must be >= min_applicants");
  if (pubs_per_year < 0 || coauthors_mean < 0 || citation_mean <= 0 || citation_shape <= 0 ||
      external_applicant_rate < 0) {
    infeasible("rates must be nonnegative (citation mean and shape positive)");
  }
  const int full = rank_count(researchers_per_sds, full_share);
  if (full < 5) {
    infeasible("researchers_per_sds * full_share gives " + std::to_string(full) +
               " full professors per SDS; a committee needs 5");
  }
  const int assistants =
      researchers_per_sds - full - rank_count(researchers_per_sds, associate_share);
  if (assistants < max_applicants) {
    infeasible("only " + std::to_string(assistants) + " assistant professors per SDS for up to " +
               std::to_string(max_applicants) + " applicants");
  }
  if (productivity_window.empty() || collaboration_window.empty()) infeasible("observation windows must be nonempty");
}

Generated generate(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Generated out;
  Corpus& c = out.corpus;
  c.config.productivity_window = cfg.productivity_window;
  c.config.collaboration_window = cfg.collaboration_window;
  const YearRange pub_years = c.config.publication_range();

  // Taxonomy and subject categories.
  for (int s = 0; s < cfg.n_sds; ++s) {
    const std::string sds = "SDS" + pad(s + 1, 2);
    c.taxonomy.push_back({sds, "UDA" + pad(s % cfg.n_udas + 1, 2),
                          s % 2 == 0 ? BylineConvention::Alphabetical : BylineConvention::ContributionOrdered});
    for (int k = 0; k < cfg.categories_per_sds; ++k) {
      c.categories.push_back({sds + "-SC" + std::to_string(k + 1), "subject category " + std::to_string(k + 1) + " of " + sds});
    }
  }
  std::vector<std::string> universities;
  for (int u = 0; u < cfg.n_universities; ++u) universities.push_back("UNI" + pad(u + 1, 2));

  std::vector<double> zipf(cfg.surname_pool);
  for (int k = 0; k < cfg.surname_pool; ++k) zipf[k] = 1.0 / std::pow(k + 1.0, cfg.surname_zipf);
  std::discrete_distribution<int> surname_draw(zipf.begin(), zipf.end());

  // Researchers.
  std::vector<double> talent;
  const int n_full = rank_count(cfg.researchers_per_sds, cfg.full_share);
  const int n_assoc = rank_count(cfg.researchers_per_sds, cfg.associate_share);
  int serial = 0;
  for (const auto& sds : c.taxonomy) {
    for (int i = 0; i < cfg.researchers_per_sds; ++i) {
      Researcher r;
      r.id = "R" + pad(++serial, 5);
      r.gender = rng.bernoulli(cfg.female_share) ? Gender::F : Gender::M;
      r.family_name = surname(surname_draw(rng.engine));
      r.sds_id = sds.sds_id;
      if (i < n_full) {
        r.rank = Rank::Full;
        r.career_start_year = rng.integer(1975, 1995);
      } else if (i < n_full + n_assoc) {
        r.rank = Rank::Associate;
        r.career_start_year = rng.integer(1985, 2000);
      } else {
        r.rank = Rank::Assistant;
        r.career_start_year = rng.integer(cfg.competition_year - 12, cfg.competition_year - 1);
      }
      const std::string home = rng.pick(universities);
      r.university_id = home;
      if (cfg.n_universities > 1 && rng.bernoulli(cfg.mobility)) {
        const int first = std::max(r.career_start_year, pub_years.first);
        if (first < pub_years.last) {
          const int move = rng.integer(first + 1, pub_years.last);
          std::string previous = home;
          while (previous == home) previous = rng.pick(universities);
          for (int y = first; y < move; ++y) r.affiliations.push_back({y, previous, sds.sds_id});
        }
      }
      talent.push_back(std::exp(rng.normal(0.5)));
      c.researchers.push_back(std::move(r));
    }
  }

  // Colleagues by (university, sds, year).
  std::map<std::tuple<std::string, std::string, int>, std::vector<std::size_t>> units;
  for (std::size_t i = 0; i < c.researchers.size(); ++i) {
    for (int y = pub_years.first; y <= pub_years.last; ++y) {
      if (auto a = c.researchers[i].affiliation_in(y)) units[{a->university_id, a->sds_id, y}].push_back(i);
    }
  }

  // Publications, lead-authored by each roster researcher.
  int pub_serial = 0, external_serial = 0;
  for (std::size_t i = 0; i < c.researchers.size(); ++i) {
    const Researcher& lead = c.researchers[i];
    const Sds* sds = &c.taxonomy[i / static_cast<std::size_t>(cfg.researchers_per_sds)];
    for (int y = pub_years.first; y <= pub_years.last; ++y) {
      auto aff = lead.affiliation_in(y);
      if (!aff) continue;
      const int count = rng.poisson(cfg.pubs_per_year * talent[i]);
      for (int k = 0; k < count; ++k) {
        Publication p;
        p.id = "P" + pad(++pub_serial, 7);
        p.year = y;
        p.subject_category = sds->sds_id + "-SC" + std::to_string(rng.integer(1, cfg.categories_per_sds));
        const double age_factor = std::max(0.2, (pub_years.last + 1 - y) / 5.0);
        const double lambda = rng.gamma(cfg.citation_shape, cfg.citation_mean * talent[i] * age_factor / cfg.citation_shape);
        p.citations = rng.poisson(lambda);

        std::vector<BylineEntry> others;
        std::set<std::size_t> used{i};
        const int n_coauthors = std::min(24, rng.poisson(cfg.coauthors_mean));
        const auto& unit = units[{aff->university_id, aff->sds_id, y}];
        for (int a = 0; a < n_coauthors; ++a) {
          if (rng.bernoulli(cfg.colleague_share) && unit.size() > used.size()) {
            std::size_t pick = unit[static_cast<std::size_t>(rng.integer(0, static_cast<int>(unit.size()) - 1))];
            if (used.insert(pick).second) {
              others.push_back({c.researchers[pick].id, aff->university_id});
              continue;
            }
          }
          others.push_back({"X" + pad(++external_serial, 7), rng.pick(universities)});
        }
        std::shuffle(others.begin(), others.end(), rng.engine);
        BylineEntry self{lead.id, aff->university_id};
        if (rng.bernoulli(0.5)) {
          others.insert(others.begin(), self);
        } else {
          others.push_back(self);
        }
        p.byline = std::move(others);
        c.publications.push_back(std::move(p));
      }
    }
  }

  c.link();
  const ScoreBook scores = score_corpus(c, cfg.productivity_window, Execution::Serial);

  // Competitions.
  FeatureOptions fopts;
  fopts.window = cfg.collaboration_window;
  int comp_serial = 0, ext_applicant_serial = 0;
  for (int s = 0; s < cfg.n_sds; ++s) {
    const std::string& sds = c.taxonomy[s].sds_id;
    std::vector<std::size_t> fulls, assistants;
    for (std::size_t i = static_cast<std::size_t>(s) * cfg.researchers_per_sds;
         i < static_cast<std::size_t>(s + 1) * cfg.researchers_per_sds; ++i) {
      if (c.researchers[i].rank == Rank::Full) fulls.push_back(i);
      if (c.researchers[i].rank == Rank::Assistant) assistants.push_back(i);
    }

    for (int k = 0; k < cfg.competitions_per_sds; ++k) {
      Competition comp;
      comp.id = "C" + pad(++comp_serial, 4);
      comp.sds_id = sds;
      comp.university_id = rng.pick(universities);
      comp.year = cfg.competition_year;

      auto at_university = [&](const std::vector<std::size_t>& pool) {
        std::vector<std::size_t> out;
        for (auto i : pool) {
          auto a = c.researchers[i].affiliation_in(comp.year);
          if (a && a->university_id == comp.university_id) out.push_back(i);
        }
        return out;
      };

      std::vector<std::size_t> committee_pool = fulls;
      std::shuffle(committee_pool.begin(), committee_pool.end(), rng.engine);
      const auto local_fulls = at_university(fulls);
      std::size_t president = committee_pool.front();
      if (!local_fulls.empty() && rng.bernoulli(cfg.internal_president_share)) president = rng.pick(local_fulls);
      comp.president = c.researchers[president].id;
      for (auto i : committee_pool) {
        if (comp.members.size() == 4) break;
        if (i != president) comp.members.push_back(c.researchers[i].id);
      }

      // Eligible applicants first so every competition has a winner and a
      // non-winner among them, then the rest from the whole assistant pool.
      std::vector<std::size_t> eligible_pool, local_pool;
      for (auto i : assistants) {
        if (is_eligible(c.researchers[i], comp, scores)) eligible_pool.push_back(i);
      }
      for (auto i : at_university(assistants)) local_pool.push_back(i);
      if (static_cast<int>(eligible_pool.size()) < cfg.winners_per_competition + 1) {
        infeasible("SDS " + sds + " has too few eligible assistant professors to fill a competition");
      }
      const int n_applicants = rng.integer(cfg.min_applicants, cfg.max_applicants);
      std::set<std::size_t> chosen;
      std::vector<std::size_t> order;
      auto take = [&](std::size_t i) {
        if (chosen.insert(i).second) order.push_back(i);
      };
      while (static_cast<int>(chosen.size()) < cfg.winners_per_competition + 1) take(rng.pick(eligible_pool));
      while (static_cast<int>(chosen.size()) < n_applicants) {
        if (!local_pool.empty() && rng.bernoulli(cfg.local_applicant_share)) {
          take(rng.pick(local_pool));
        } else {
          take(rng.pick(assistants));
        }
      }
      for (auto i : order) comp.applicants.push_back({c.researchers[i].id, false});
      for (int e = rng.poisson(cfg.external_applicant_rate); e > 0; --e) {
        comp.applicants.push_back({"EXT" + pad(++ext_applicant_serial, 5), true});
      }

      std::vector<std::string> eligible_ids;
      for (auto i : order) {
        if (is_eligible(c.researchers[i], comp, scores)) eligible_ids.push_back(c.researchers[i].id);
      }
      std::sort(eligible_ids.begin(), eligible_ids.end());
      const auto features = extract_features(comp, eligible_ids, c, scores, fopts);

      CompetitionTruth truth;
      truth.competition_id = comp.id;
      std::map<std::string, double> merit;
      const auto& w = cfg.weights;
      for (const auto& f : features) {
        merit[f.researcher_id] = f.FSS;
        double latent = w.merit * f.FSS + w.cp * f.CP + w.ce * f.CE + w.pp * f.PP + w.ne * f.NE + w.sp * f.SP;
        latent += rng.normal(w.noise_sd);
        truth.latent[f.researcher_id] = latent;
      }
      truth.merit_winners = top_k(merit, cfg.winners_per_competition);
      truth.selected_winners = top_k(truth.latent, cfg.winners_per_competition);
      truth.injected_bias = truth.merit_winners != truth.selected_winners;
      comp.winners = truth.selected_winners;
      c.competitions.push_back(std::move(comp));
      out.truth.competitions.push_back(std::move(truth));
    }
  }
  c.link();
  return out;
}

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError(ConfigError::Kind::InvalidConfig, "cannot write " + file.string());
  for (const auto& t : truth.competitions) {
    nlohmann::json j = {{"competition_id", t.competition_id},
                        {"merit_winners", t.merit_winners},
                        {"selected_winners", t.selected_winners},
                        {"injected_bias", t.injected_bias},
                        {"latent", t.latent}};
    out << j.dump() << '\n';
  }
}

Eigen::VectorXd reference_coefficients() {
  Eigen::VectorXd b(18);
  b << -3.282, 0.404, 0.012, 0.004, 0.127, 0.983, 0.188, -0.028, 0.067, -0.085, 0.024, 0.020, 0.435, 0.533, 0.691,
      -0.646, -0.032, 0.011;
  return b;
}

DesignMatrix generate_logit_sample(const LogitSampleConfig& cfg) {
  if (cfg.beta.size() != 18) throw ConfigError(ConfigError::Kind::InvalidConfig, "logit sample needs 18 coefficients");
  Rng rng(cfg.seed);
  std::vector<ApplicantFeatures> rows(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    auto& f = rows[i];
    f.competition_id = "K" + pad(static_cast<int>(i / std::max<std::size_t>(1, cfg.cluster_size)), 6);
    f.researcher_id = "A" + pad(static_cast<int>(i), 6);
    f.G = rng.bernoulli(0.3);
    f.FSS = 100.0 * rng.uniform();
    f.NE = rng.bernoulli(0.05);
    f.CP = rng.bernoulli(0.3) ? rng.integer(1, 10) : 0;
    f.CE = rng.bernoulli(0.2) ? rng.integer(1, 20) : 0;
    f.PP = rng.bernoulli(0.2) ? 50.0 * rng.uniform() : 0.0;
    f.PE = rng.bernoulli(0.1) ? rng.integer(1, 3) : 0;
    f.SP = rng.bernoulli(f.G ? 0.3 : 0.85);
    f.SE = rng.bernoulli(f.G ? 0.2 : 0.9);
  }
  DesignMatrix d = design_from_features(rows);
  const Eigen::VectorXd eta = d.x * cfg.beta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-eta[i]));
    d.y[i] = rng.bernoulli(p) ? 1.0 : 0.0;
  }
  return d;
}

}  // namespace fssaudit
