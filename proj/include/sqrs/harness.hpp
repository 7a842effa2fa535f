#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqrs/adversary.hpp"
#include "sqrs/estimation.hpp"
#include "sqrs/protocol.hpp"

namespace sqrs {

/// Named Monte Carlo scenarios. Stable ids (used in seed derivation):
/// custom=0, fig2-identifiability=1, fig3-circ-std=2, fig4-bias=3,
/// fig5-multipass=4, fig6-pass-sweep=5, fig7-splitting=6, fig8-mitm=7,
/// eq12-detection=8.
const std::vector<std::string>& scenario_names();
int scenario_id(const std::string& name);

struct ExperimentConfig {
  std::string scenario = "custom";
  double true_phi = 0.4 * pi;
  std::uint64_t mu = 100;
  double p_test = 0.5;
  std::vector<std::uint64_t> passes = {1};
  AttackStrategy attack;
  double kbar = 0.1;
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 42;
  int grid_k = 2048;
  double theta0 = 0.0;

  // protocol parameters for session-driven scenarios
  double epsilon = 0.0;
  double epsilon_tilde = 0.0;
  double eta = 0.0;
  bool secrets_random = true;  // fig8: draw shared secrets per trial

  // sweep lists; empty means the scenario default
  std::vector<double> phi_list;
  std::vector<std::uint64_t> mu_list;
  std::vector<double> p_list;
  std::vector<double> kbar_list;

  // multipass scenario sizes
  std::uint64_t qubits_per_test = 25;  // fig6
  std::uint64_t max_passes = 10;       // fig6
  std::uint64_t multipass = 4;         // fig5
  std::uint64_t n_single = 30;         // fig5
  std::uint64_t n_multi = 30;          // fig5
  std::uint64_t n_baseline = 60;       // fig5

  void validate() const;
  AliceConfig alice_config() const;
  BobConfig bob_config(std::uint64_t pass_count) const;
};

/// Sweep table plus optional mean-likelihood curves. Standard errors come
/// from independent trials; analytic entries carry zero error.
struct AggregateResult {
  std::vector<std::string> key_names;
  std::vector<std::string> stat_names;
  std::vector<std::vector<double>> keys;                          // per row
  std::vector<std::vector<std::pair<double, double>>> stats;      // (value, se)
  std::vector<std::pair<std::string, std::vector<double>>> curves;  // bin masses
  GridConfig grid;
};

/// Run a scenario; deterministic under (config, master_seed).
AggregateResult run(const ExperimentConfig& config);

/// Pointwise arithmetic mean of normalized bin masses, renormalized.
LikelihoodGrid mean_likelihood(std::span<const LikelihoodGrid> grids);

/// Multi-session attack statistics at a single operating point: abort
/// frequency, mean checked/failed counts, interceptor capture counts, and the
/// declared-distribution verdict rate.
AggregateResult attack_summary(const ExperimentConfig& config);

}  // namespace sqrs
