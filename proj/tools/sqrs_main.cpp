// Command-line front end: scenario runs, single sessions, attack statistics,
// posterior summaries and analytic information quantities.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error,
// 3 session aborted (eavesdropper detected) -- distinct so scripts can react
// to the security event.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqrs/adversary.hpp"
#include "sqrs/harness.hpp"
#include "sqrs/information.hpp"
#include "sqrs/io.hpp"
#include "sqrs/photonics.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file (sectioned key = value)");
  cmd->add_option("--out", opts.out_dir, "output directory (default $SQRS_OUT_DIR or .)");
  cmd->add_option("--format", opts.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opts.seed, "master seed override");
}

std::string resolve_out_dir(const CommonOpts& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (const char* env = std::getenv("SQRS_OUT_DIR")) return env;
  return ".";
}

sqrs::ExperimentConfig base_config(const CommonOpts& opts) {
  sqrs::ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = sqrs::load_config_file(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  return cfg;
}

sqrs::AttackKind parse_attack(const std::string& name) {
  sqrs::ExperimentConfig probe = sqrs::parse_config_text("[attack]\nkind = " + name);
  return probe.attack.kind;
}

int cmd_figure(const CommonOpts& opts, const std::string& scenario,
               std::optional<std::uint64_t> trials, std::optional<double> phi,
               std::optional<std::uint64_t> mu, std::optional<double> p,
               std::optional<int> grid_k, const std::string& replay_path) {
  sqrs::ExperimentConfig cfg;
  if (!replay_path.empty()) {
    auto summary = nlohmann::json::parse(sqrs::read_file(replay_path));
    cfg = sqrs::config_from_json(summary.at("config"));
  } else {
    cfg = base_config(opts);
    if (!scenario.empty()) cfg.scenario = scenario;
  }
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (trials) cfg.trials = *trials;
  if (phi) cfg.true_phi = *phi;
  if (mu) cfg.mu = *mu;
  if (p) cfg.p_test = *p;
  if (grid_k) cfg.grid_k = *grid_k;

  sqrs::AggregateResult result = sqrs::run(cfg);
  auto files = sqrs::emit(cfg, result, resolve_out_dir(opts), cfg.scenario, opts.format);
  for (const auto& path : files.paths) std::cout << path << '\n';
  return 0;
}

int cmd_session(const CommonOpts& opts, const std::string& attack,
                std::optional<std::uint64_t> mu, std::optional<double> p,
                std::optional<double> phi, std::optional<std::uint64_t> passes,
                std::optional<double> epsilon, std::optional<double> epsilon_tilde,
                std::optional<double> eta, bool public_view,
                const std::string& transcript_name) {
  sqrs::ExperimentConfig cfg = base_config(opts);
  if (!attack.empty()) cfg.attack.kind = parse_attack(attack);
  if (mu) cfg.mu = *mu;
  if (p) cfg.p_test = *p;
  if (phi) cfg.true_phi = *phi;
  if (passes) cfg.passes = {*passes};
  if (epsilon) cfg.epsilon = *epsilon;
  if (epsilon_tilde) cfg.epsilon_tilde = *epsilon_tilde;
  if (eta) cfg.eta = *eta;
  cfg.validate();

  sqrs::Rng rng(sqrs::derive_seed(cfg.master_seed, 200));
  sqrs::AliceConfig alice = cfg.alice_config();
  sqrs::BobConfig bob = cfg.bob_config(cfg.passes.front());

  sqrs::SessionTranscript transcript;
  if (cfg.attack.kind == sqrs::AttackKind::ImpersonateAlice) {
    transcript = sqrs::impersonate_alice_session(bob, cfg.true_phi, cfg.mu, rng).transcript;
  } else if (cfg.attack.kind == sqrs::AttackKind::ImpersonateBob) {
    sqrs::BobConfig eve_view = bob;
    eve_view.epsilon = cfg.attack.eve_epsilon;
    eve_view.epsilon_tilde = cfg.attack.eve_epsilon_tilde;
    transcript = sqrs::impersonate_bob_session(alice, bob, eve_view, cfg.mu, rng);
  } else {
    transcript =
        sqrs::run_attacked_session(alice, bob, cfg.true_phi, cfg.mu, cfg.attack, rng)
            .transcript;
  }

  std::string path = resolve_out_dir(opts) + "/" + transcript_name;
  sqrs::write_file(path, sqrs::format_transcript(transcript, public_view));
  std::cout << path << '\n';
  if (transcript.aborted()) {
    std::cerr << "session aborted at qubit " << transcript.abort->qubit_id << ": "
              << transcript.abort->reason << '\n';
    return 3;
  }
  return 0;
}

int cmd_attack(const CommonOpts& opts, const std::string& attack,
               std::optional<std::uint64_t> sessions, std::optional<std::uint64_t> mu,
               std::optional<double> p, std::optional<double> phi) {
  sqrs::ExperimentConfig cfg = base_config(opts);
  if (!attack.empty()) cfg.attack.kind = parse_attack(attack);
  if (sessions) cfg.trials = *sessions;
  if (mu) cfg.mu = *mu;
  if (p) cfg.p_test = *p;
  if (phi) cfg.true_phi = *phi;
  cfg.validate();

  sqrs::AggregateResult result = sqrs::attack_summary(cfg);
  auto files = sqrs::emit(cfg, result, resolve_out_dir(opts), "attack", opts.format);
  for (const auto& path : files.paths) std::cout << path << '\n';
  return 0;
}

int cmd_estimate(const CommonOpts& opts, const std::vector<std::uint64_t>& counts,
                 std::uint64_t passes, int grid_k, double offset) {
  if (counts.size() != 8) {
    throw std::invalid_argument("--counts needs exactly eight values n1..n8");
  }
  sqrs::CountVector cv;
  for (int i = 0; i < 8; ++i) cv.n[i] = counts[i];
  cv.passes = passes;
  sqrs::GridConfig grid{grid_k, 0.0};
  sqrs::LikelihoodGrid g = sqrs::likelihood_from_counts(cv, grid, offset);
  sqrs::CircularSummary summary = sqrs::circular_summary(g);

  ordered_json j;
  j["map"] = sqrs::map_estimate(g);
  j["mean_direction"] = summary.mean_direction;
  j["resultant_length"] = summary.resultant_length;
  j["circ_std"] = summary.circ_std;
  j["direction_defined"] = summary.direction_defined;
  std::cout << j.dump(2) << '\n';
  (void)opts;
  return 0;
}

int cmd_info(const std::vector<double>& cfi, const std::vector<double>& crb,
             const std::vector<double>& bounds, const std::vector<double>& posterior) {
  ordered_json j;
  if (!cfi.empty()) {
    if (cfi.size() != 3) throw std::invalid_argument("--cfi needs alpha,gamma,zeta");
    j["cfi"] = sqrs::general_cfi(cfi[0], cfi[1], cfi[2]);
  }
  if (!crb.empty()) {
    if (crb.size() != 2) throw std::invalid_argument("--crb needs fisher,mu");
    j["cramer_rao"] =
        sqrs::cramer_rao(crb[0], static_cast<std::uint64_t>(crb[1]));
  }
  if (!bounds.empty()) {
    double kbar = bounds[0];
    double fe = bounds.size() > 1 ? bounds[1] : 0.25;
    j["ratio_bb84"] = sqrs::splitting_ratio_bb84(kbar);
    j["ratio_sqrs"] = sqrs::splitting_ratio_sqrs(kbar, fe);
  }
  if (!posterior.empty()) {
    if (posterior.size() != 2) {
      throw std::invalid_argument("--eve-posterior needs delta,gamma");
    }
    auto post = sqrs::eve_posterior(posterior[0], posterior[1], +1);
    j["posterior_given_plus"] = {post.x_plus, post.x_minus, post.y_plus, post.y_minus};
    sqrs::BlochVector r = sqrs::eve_split_bloch(posterior[0], posterior[1], 0.0);
    sqrs::BlochVector dr{-r.ry, r.rx, 0.0};
    j["split_copy_qfi"] = sqrs::qfi_qubit(r, dr);
  }
  if (j.empty()) throw std::invalid_argument("info: nothing requested");
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and analysis toolkit for entanglement-free secure "
               "quantum remote sensing"};
  app.require_subcommand(1);

  CommonOpts opts;

  // figure
  auto* figure = app.add_subcommand("figure", "run a named Monte Carlo scenario");
  add_common(figure, opts);
  std::string scenario;
  std::string replay_path;
  std::optional<std::uint64_t> trials, f_mu;
  std::optional<double> f_phi, f_p;
  std::optional<int> f_k;
  figure->add_option("--scenario", scenario, "scenario name");
  figure->add_option("--replay", replay_path, "re-run the config echoed in a summary.json");
  figure->add_option("--trials", trials, "trial count override");
  figure->add_option("--phi", f_phi, "true phase");
  figure->add_option("--mu", f_mu, "measurement count");
  figure->add_option("--p", f_p, "test-path probability");
  figure->add_option("--k", f_k, "grid bins");

  // session
  auto* session = app.add_subcommand("session", "run one protocol session");
  add_common(session, opts);
  std::string attack_name;
  std::optional<std::uint64_t> s_mu, s_passes;
  std::optional<double> s_p, s_phi, s_eps, s_eps_tilde, s_eta;
  bool public_view = false;
  std::string transcript_name = "transcript.tsv";
  session->add_option("--attack", attack_name, "attack kind");
  session->add_option("--mu", s_mu, "qubits in the session");
  session->add_option("--p", s_p, "test-path probability");
  session->add_option("--phi", s_phi, "true phase");
  session->add_option("--passes", s_passes, "phase-gate passes at D1");
  session->add_option("--epsilon", s_eps, "shared test secret");
  session->add_option("--epsilon-tilde", s_eps_tilde, "shared phase-path secret");
  session->add_option("--eta", s_eta, "sender operating-point shift");
  session->add_flag("--public", public_view, "redact the state labels");
  session->add_option("--transcript", transcript_name, "transcript file name");

  // attack
  auto* attack = app.add_subcommand("attack", "attack statistics over many sessions");
  add_common(attack, opts);
  std::string atk_name;
  std::optional<std::uint64_t> a_sessions, a_mu;
  std::optional<double> a_p, a_phi;
  attack->add_option("--attack", atk_name, "attack kind")->required();
  attack->add_option("--sessions", a_sessions, "session count");
  attack->add_option("--mu", a_mu, "qubits per session");
  attack->add_option("--p", a_p, "test-path probability");
  attack->add_option("--phi", a_phi, "true phase");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "posterior summary from counts");
  add_common(estimate, opts);
  std::vector<std::uint64_t> counts;
  std::uint64_t e_passes = 1;
  int e_k = 2048;
  double e_offset = 0.0;
  estimate->add_option("--counts", counts, "outcome counts n1..n8")
      ->required()
      ->delimiter(',');
  estimate->add_option("--passes", e_passes, "pass count");
  estimate->add_option("--k", e_k, "grid bins");
  estimate->add_option("--offset", e_offset, "model azimuth offset");

  // info
  auto* info = app.add_subcommand("info", "analytic information quantities");
  std::vector<double> i_cfi, i_crb, i_bounds, i_post;
  info->add_option("--cfi", i_cfi, "alpha,gamma,zeta")->delimiter(',');
  info->add_option("--crb", i_crb, "fisher,mu")->delimiter(',');
  info->add_option("--bounds", i_bounds, "kbar[,f_e]")->delimiter(',');
  info->add_option("--eve-posterior", i_post, "delta,gamma")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return (code == 0) ? 0 : 1;
  }

  try {
    if (figure->parsed()) {
      return cmd_figure(opts, scenario, trials, f_phi, f_mu, f_p, f_k, replay_path);
    }
    if (session->parsed()) {
      return cmd_session(opts, attack_name, s_mu, s_p, s_phi, s_passes, s_eps,
                         s_eps_tilde, s_eta, public_view, transcript_name);
    }
    if (attack->parsed()) {
      return cmd_attack(opts, atk_name, a_sessions, a_mu, a_p, a_phi);
    }
    if (estimate->parsed()) {
      return cmd_estimate(opts, counts, e_passes, e_k, e_offset);
    }
    if (info->parsed()) {
      return cmd_info(i_cfi, i_crb, i_bounds, i_post);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
