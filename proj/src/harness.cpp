#include "sqrs/harness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqrs/information.hpp"
#include "sqrs/stats.hpp"

namespace sqrs {

namespace {

/// Accumulates normalized grids into a running mean-mass curve.
class CurveAccumulator {
 public:
  explicit CurveAccumulator(int bins) : sums_(static_cast<std::size_t>(bins), 0.0) {}

  void add(const LikelihoodGrid& grid) {
    for (int k = 0; k < grid.size(); ++k) sums_[k] += grid.mass(k);
    ++count_;
  }

  std::vector<double> mean_masses() const {
    std::vector<double> out(sums_);
    if (count_ > 0) {
      for (double& v : out) v /= static_cast<double>(count_);
    }
    return out;
  }

  LikelihoodGrid mean_grid(const GridConfig& cfg) const {
    std::vector<double> logv(sums_.size());
    for (std::size_t i = 0; i < sums_.size(); ++i) {
      logv[i] = sums_[i] > 0.0 ? std::log(sums_[i])
                               : -std::numeric_limits<double>::infinity();
    }
    return LikelihoodGrid::from_log_values(cfg, std::move(logv), true);
  }

 private:
  std::vector<double> sums_;
  std::uint64_t count_ = 0;
};

/// Mean spread over trials where the spread is defined; exactly symmetric
/// posteriors have a vanishing resultant and are tallied separately.
struct SpreadStat {
  RunningStat stat;
  std::uint64_t undefined = 0;

  void add(double nu) {
    if (std::isfinite(nu)) {
      stat.add(nu);
    } else {
      ++undefined;
    }
  }
  double undefined_rate(std::uint64_t trials) const {
    return trials > 0 ? static_cast<double>(undefined) / static_cast<double>(trials)
                      : 0.0;
  }
};

double circular_se(const std::vector<double>& wrapped_diffs) {
  RunningStat stat;
  for (double d : wrapped_diffs) stat.add(d);
  return stat.standard_error();
}

struct RowBuilder {
  AggregateResult& result;

  void keys(std::vector<double> k) { result.keys.push_back(std::move(k)); }
  void stats(std::vector<std::pair<double, double>> s) {
    result.stats.push_back(std::move(s));
  }
};

AggregateResult run_fig2(const ExperimentConfig& cfg) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"restriction"};
  result.stat_names = {"n_major_peaks", "map"};
  const std::array<std::array<double, 4>, 3> probs = {{
      {0.5, 0.5, 0.0, 0.0},   // x eigenstates only
      {0.0, 0.0, 0.5, 0.5},   // y eigenstates only
      {0.25, 0.25, 0.25, 0.25},
  }};
  const std::array<const char*, 3> curve_names = {"x_only", "y_only", "both"};
  int sid = scenario_id(cfg.scenario);
  for (int r = 0; r < 3; ++r) {
    CurveAccumulator acc(cfg.grid_k);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      Rng rng(derive_seed(cfg.master_seed, sid, r, t));
      CountVector counts = draw_counts(rng, cfg.true_phi, cfg.mu, 1, probs[r]);
      acc.add(likelihood_from_counts(counts, result.grid));
    }
    LikelihoodGrid mean = acc.mean_grid(result.grid);
    auto peaks = local_maxima(mean, 0.5);
    result.keys.push_back({static_cast<double>(r)});
    result.stats.push_back({{static_cast<double>(peaks.size()), 0.0},
                            {map_estimate(mean), 0.0}});
    result.curves.emplace_back(curve_names[r], mean.masses_copy());
  }
  return result;
}

AggregateResult run_fig3_fig4(const ExperimentConfig& cfg, bool bias_mode) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"phi", "mu"};
  result.stat_names = bias_mode
                          ? std::vector<std::string>{"bias", "nu_mean", "nu_undefined_rate"}
                          : std::vector<std::string>{"nu_mean", "nu_undefined_rate"};
  std::vector<double> phis = cfg.phi_list;
  if (phis.empty()) {
    for (int i = 0; i < 24; ++i) phis.push_back(two_pi * i / 24.0);
  }
  std::vector<std::uint64_t> mus = cfg.mu_list;
  if (mus.empty()) mus = {25, 100, 400};

  int sid = scenario_id(cfg.scenario);
  std::uint64_t sweep = 0;
  for (std::uint64_t m : mus) {
    for (double phi : phis) {
      SpreadStat nu_stat;
      std::vector<double> maps;
      maps.reserve(cfg.trials);
      for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        Rng rng(derive_seed(cfg.master_seed, sid, sweep, t));
        CountVector counts = draw_counts(rng, phi, m, 1);
        LikelihoodGrid grid = likelihood_from_counts(counts, result.grid);
        nu_stat.add(circular_summary(grid).circ_std);
        if (bias_mode) maps.push_back(map_estimate(grid));
      }
      result.keys.push_back({phi, static_cast<double>(m)});
      std::pair<double, double> undef{nu_stat.undefined_rate(cfg.trials), 0.0};
      if (bias_mode) {
        double bias = estimator_bias(phi, maps);
        std::vector<double> diffs;
        diffs.reserve(maps.size());
        for (double est : maps) diffs.push_back(wrap_signed(est - phi));
        result.stats.push_back({{bias, circular_se(diffs)},
                                {nu_stat.stat.mean(), nu_stat.stat.standard_error()},
                                undef});
      } else {
        result.stats.push_back(
            {{nu_stat.stat.mean(), nu_stat.stat.standard_error()}, undef});
      }
      ++sweep;
    }
  }
  return result;
}

AggregateResult run_fig5(const ExperimentConfig& cfg) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"multipass"};
  result.stat_names = {"nu_combined", "nu_single_baseline", "nu_single_half"};
  CurveAccumulator acc_single(cfg.grid_k), acc_multi(cfg.grid_k),
      acc_combined(cfg.grid_k), acc_baseline(cfg.grid_k);
  SpreadStat nu_c, nu_b, nu_s;
  int sid = scenario_id(cfg.scenario);
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    Rng rng(derive_seed(cfg.master_seed, sid, 0, t));
    CountVector c_single = draw_counts(rng, cfg.true_phi, cfg.n_single, 1);
    CountVector c_multi = draw_counts(rng, cfg.true_phi, cfg.n_multi, cfg.multipass);
    CountVector c_base = draw_counts(rng, cfg.true_phi, cfg.n_baseline, 1);
    LikelihoodGrid g_single = likelihood_from_counts(c_single, result.grid);
    LikelihoodGrid g_multi = likelihood_from_counts(c_multi, result.grid);
    LikelihoodGrid g_comb = combine(g_single, g_multi);
    LikelihoodGrid g_base = likelihood_from_counts(c_base, result.grid);
    nu_s.add(circular_summary(g_single).circ_std);
    nu_c.add(circular_summary(g_comb).circ_std);
    nu_b.add(circular_summary(g_base).circ_std);
    acc_single.add(g_single);
    acc_multi.add(g_multi);
    acc_combined.add(g_comb);
    acc_baseline.add(g_base);
  }
  result.keys.push_back({static_cast<double>(cfg.multipass)});
  result.stats.push_back({{nu_c.stat.mean(), nu_c.stat.standard_error()},
                          {nu_b.stat.mean(), nu_b.stat.standard_error()},
                          {nu_s.stat.mean(), nu_s.stat.standard_error()}});
  result.curves.emplace_back("single_half", acc_single.mean_grid(result.grid).masses_copy());
  result.curves.emplace_back("multipass_half", acc_multi.mean_grid(result.grid).masses_copy());
  result.curves.emplace_back("combined", acc_combined.mean_grid(result.grid).masses_copy());
  result.curves.emplace_back("single_baseline",
                             acc_baseline.mean_grid(result.grid).masses_copy());
  return result;
}

AggregateResult run_fig6(const ExperimentConfig& cfg) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"passes"};
  result.stat_names = {"nu_mean", "nu_undefined_rate"};
  int sid = scenario_id(cfg.scenario);
  for (std::uint64_t m = 1; m <= cfg.max_passes; ++m) {
    SpreadStat nu_stat;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      Rng rng(derive_seed(cfg.master_seed, sid, m, t));
      double phi = rng.uniform() * two_pi;
      CountVector c_single = draw_counts(rng, phi, cfg.qubits_per_test, 1);
      CountVector c_multi = draw_counts(rng, phi, cfg.qubits_per_test, m);
      LikelihoodGrid g = combine(likelihood_from_counts(c_single, result.grid),
                                 likelihood_from_counts(c_multi, result.grid));
      nu_stat.add(circular_summary(g).circ_std);
    }
    result.keys.push_back({static_cast<double>(m)});
    result.stats.push_back({{nu_stat.stat.mean(), nu_stat.stat.standard_error()},
                            {nu_stat.undefined_rate(cfg.trials), 0.0}});
  }
  return result;
}

AggregateResult run_fig7(const ExperimentConfig& cfg) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"kbar"};
  result.stat_names = {"ratio_bb84", "ratio_sqrs"};
  std::vector<double> kbars = cfg.kbar_list;
  if (kbars.empty()) {
    for (int i = 1; i <= 50; ++i) kbars.push_back(0.1 * i);
  }
  for (double kbar : kbars) {
    result.keys.push_back({kbar});
    result.stats.push_back({{splitting_ratio_bb84(kbar), 0.0},
                            {splitting_ratio_sqrs(kbar, 0.25), 0.0}});
  }
  return result;
}

AggregateResult run_fig8(const ExperimentConfig& cfg) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"p", "mu"};
  result.stat_names = {"alice_map_offset", "eve_maxmin",    "abort_rate",
                       "suspicious_rate",  "alice_info",    "eve_info"};
  std::vector<double> ps = cfg.p_list;
  if (ps.empty()) ps = {0.8, 0.9, 0.95};
  int sid = scenario_id(cfg.scenario);
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    double p = ps[ip];
    auto mu = static_cast<std::uint64_t>(std::llround(mitm_mu_for_unit_info(p)));
    auto k_eve = static_cast<std::uint64_t>(
        std::llround(mitm_eve_measurements(static_cast<double>(mu), p)));
    CurveAccumulator acc_alice(cfg.grid_k), acc_eve(cfg.grid_k);
    RunningStat abort_stat, suspicious_stat;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      Rng rng(derive_seed(cfg.master_seed, sid, ip, t));
      AliceConfig alice = cfg.alice_config();
      BobConfig bob = cfg.bob_config(1);
      bob.p_test = p;
      if (cfg.secrets_random) {
        alice.epsilon = rng.uniform() * two_pi;
        alice.epsilon_tilde = rng.uniform() * two_pi;
        bob.epsilon = alice.epsilon;
        bob.epsilon_tilde = alice.epsilon_tilde;
      }
      AttackStrategy strategy;
      strategy.kind = AttackKind::MitmRelabel;
      strategy.attack_count = k_eve;
      AttackedSession session = run_attacked_session(alice, bob, cfg.true_phi, mu,
                                                     strategy, rng);
      abort_stat.add(session.transcript.aborted() ? 1.0 : 0.0);
      suspicious_stat.add(detector_distribution_test(session.transcript, p, 3.0) ==
                                  DistributionVerdict::Suspicious
                              ? 1.0
                              : 0.0);
      if (!session.transcript.aborted()) {
        acc_alice.add(alice_likelihood(session.transcript, alice, bob, result.grid,
                                       RecordFilter::TrueD1));
        acc_eve.add(eve_accumulate(session.transcript, session.eve, EveModel{},
                                   result.grid));
      }
    }
    LikelihoodGrid alice_mean = acc_alice.mean_grid(result.grid);
    LikelihoodGrid eve_mean = acc_eve.mean_grid(result.grid);
    double mass_min = std::numeric_limits<double>::infinity(), mass_max = 0.0;
    for (int k = 0; k < eve_mean.size(); ++k) {
      mass_min = std::min(mass_min, eve_mean.mass(k));
      mass_max = std::max(mass_max, eve_mean.mass(k));
    }
    result.keys.push_back({p, static_cast<double>(mu)});
    result.stats.push_back(
        {{angular_distance(map_estimate(alice_mean), cfg.true_phi), 0.0},
         {mass_min > 0.0 ? mass_max / mass_min
                         : std::numeric_limits<double>::infinity(),
          0.0},
         {abort_stat.mean(), abort_stat.standard_error()},
         {suspicious_stat.mean(), suspicious_stat.standard_error()},
         {mitm_alice_info(static_cast<double>(mu), p), 0.0},
         {(1.0 - p) * static_cast<double>(k_eve), 0.0}});
    std::string suffix = std::to_string(ip);
    result.curves.emplace_back("alice_" + suffix, alice_mean.masses_copy());
    result.curves.emplace_back("eve_" + suffix, eve_mean.masses_copy());
  }
  return result;
}

AggregateResult run_eq12(const ExperimentConfig& cfg) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"mu", "p"};
  result.stat_names = {"detection_rate", "predicted_meancount", "predicted_perqubit"};
  std::vector<std::uint64_t> mus = cfg.mu_list;
  std::vector<double> ps = cfg.p_list;
  if (mus.empty() || ps.empty()) {
    mus = {20, 100, 100};
    ps = {0.5, 0.5, 0.9};
  }
  if (mus.size() != ps.size()) {
    throw std::invalid_argument("mu_list and p_list must have matching lengths");
  }
  int sid = scenario_id(cfg.scenario);
  for (std::size_t i = 0; i < mus.size(); ++i) {
    std::uint64_t mu = mus[i];
    double p = ps[i];
    AliceConfig alice = cfg.alice_config();
    BobConfig bob = cfg.bob_config(1);
    bob.p_test = p;
    AttackStrategy strategy;
    strategy.kind = AttackKind::MeasureResend;
    RunningStat detect;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      Rng rng(derive_seed(cfg.master_seed, sid, i, t));
      AttackedSession session =
          run_attacked_session(alice, bob, cfg.true_phi, mu, strategy, rng);
      detect.add(session.transcript.aborted() ? 1.0 : 0.0);
    }
    double mean_count_form = 1.0 - std::pow(0.75, static_cast<double>(mu) * p / 2.0);
    double per_qubit_form = 1.0 - std::pow(1.0 - p / 8.0, static_cast<double>(mu));
    result.keys.push_back({static_cast<double>(mu), p});
    result.stats.push_back({{detect.mean(), detect.standard_error()},
                            {mean_count_form, 0.0},
                            {per_qubit_form, 0.0}});
  }
  return result;
}

AggregateResult run_custom(const ExperimentConfig& cfg) {
  AggregateResult result;
  result.grid = GridConfig{cfg.grid_k, cfg.theta0};
  result.key_names = {"passes"};
  result.stat_names = {"nu_mean", "bias"};
  int sid = scenario_id(cfg.scenario);
  for (std::size_t i = 0; i < cfg.passes.size(); ++i) {
    std::uint64_t m = cfg.passes[i];
    SpreadStat nu_stat;
    std::vector<double> maps;
    maps.reserve(cfg.trials);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      Rng rng(derive_seed(cfg.master_seed, sid, i, t));
      CountVector counts = draw_counts(rng, cfg.true_phi, cfg.mu, m);
      LikelihoodGrid grid = likelihood_from_counts(counts, result.grid);
      nu_stat.add(circular_summary(grid).circ_std);
      maps.push_back(map_estimate(grid));
    }
    std::vector<double> diffs;
    diffs.reserve(maps.size());
    for (double est : maps) diffs.push_back(wrap_signed(est - cfg.true_phi));
    result.keys.push_back({static_cast<double>(m)});
    result.stats.push_back({{nu_stat.stat.mean(), nu_stat.stat.standard_error()},
                            {estimator_bias(cfg.true_phi, maps), circular_se(diffs)}});
  }
  return result;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "custom",          "fig2-identifiability", "fig3-circ-std",
      "fig4-bias",       "fig5-multipass",       "fig6-pass-sweep",
      "fig7-splitting",  "fig8-mitm",            "eq12-detection"};
  return names;
}

int scenario_id(const std::string& name) {
  const auto& names = scenario_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown scenario: " + name);
}

void ExperimentConfig::validate() const {
  scenario_id(scenario);
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (grid_k < 1000) throw std::invalid_argument("grid needs at least 1000 bins");
  if (passes.empty()) throw std::invalid_argument("passes list must not be empty");
  alice_config().validate();
  bob_config(1).validate();
}

AliceConfig ExperimentConfig::alice_config() const {
  AliceConfig alice;
  alice.epsilon = epsilon;
  alice.epsilon_tilde = epsilon_tilde;
  alice.eta = eta;
  return alice;
}

BobConfig ExperimentConfig::bob_config(std::uint64_t pass_count) const {
  BobConfig bob;
  bob.p_test = p_test;
  bob.passes = pass_count;
  bob.epsilon = epsilon;
  bob.epsilon_tilde = epsilon_tilde;
  return bob;
}

AggregateResult run(const ExperimentConfig& config) {
  config.validate();
  switch (scenario_id(config.scenario)) {
    case 0: return run_custom(config);
    case 1: return run_fig2(config);
    case 2: return run_fig3_fig4(config, false);
    case 3: return run_fig3_fig4(config, true);
    case 4: return run_fig5(config);
    case 5: return run_fig6(config);
    case 6: return run_fig7(config);
    case 7: return run_fig8(config);
    case 8: return run_eq12(config);
  }
  throw std::logic_error("unreachable scenario");
}

LikelihoodGrid mean_likelihood(std::span<const LikelihoodGrid> grids) {
  if (grids.empty()) throw std::invalid_argument("nothing to average");
  const auto& first = grids.front();
  CurveAccumulator acc(first.size());
  for (const auto& g : grids) {
    if (g.size() != first.size() || g.theta0() != first.theta0()) {
      throw std::invalid_argument("grid geometry mismatch in mean_likelihood");
    }
    acc.add(g);
  }
  return acc.mean_grid(GridConfig{first.size(), first.theta0()});
}

AggregateResult attack_summary(const ExperimentConfig& config) {
  config.validate();
  AggregateResult result;
  result.grid = GridConfig{config.grid_k, config.theta0};
  result.key_names = {"mu", "p"};
  result.stat_names = {"abort_rate", "suspicious_rate", "mean_fails", "mean_captures"};
  AliceConfig alice = config.alice_config();
  BobConfig bob = config.bob_config(config.passes.front());
  RunningStat abort_stat, suspicious_stat, fail_stat, capture_stat;
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    Rng rng(derive_seed(config.master_seed, 100, 0, t));
    AttackedSession session =
        run_attacked_session(alice, bob, config.true_phi, config.mu, config.attack, rng);
    abort_stat.add(session.transcript.aborted() ? 1.0 : 0.0);
    suspicious_stat.add(
        detector_distribution_test(session.transcript, bob.p_test, 3.0) ==
                DistributionVerdict::Suspicious
            ? 1.0
            : 0.0);
    std::uint64_t fails = 0;
    for (const auto& r : session.transcript.records) {
      if (r.check == CheckResult::Fail) ++fails;
    }
    fail_stat.add(static_cast<double>(fails));
    capture_stat.add(static_cast<double>(session.eve.captures.size()));
  }
  result.keys.push_back({static_cast<double>(config.mu), config.p_test});
  result.stats.push_back({{abort_stat.mean(), abort_stat.standard_error()},
                          {suspicious_stat.mean(), suspicious_stat.standard_error()},
                          {fail_stat.mean(), fail_stat.standard_error()},
                          {capture_stat.mean(), capture_stat.standard_error()}});
  return result;
}

}  // namespace sqrs
