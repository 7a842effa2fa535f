#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "sqrs/adversary.hpp"
#include "sqrs/protocol.hpp"
#include "sqrs/stats.hpp"

using namespace sqrs;
using sqrs::testing::approx_abs;

TEST_CASE("prepared states sit on the shifted alphabet") {
  AliceConfig canonical;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto [label, state] = alice_prepare(rng, canonical);
    CHECK(state.alpha() == doctest::Approx(half_pi));
    CHECK(state.beta() == doctest::Approx(base_beta(label.tag)));
  }
  AliceConfig shifted;
  shifted.epsilon = pi / 5.0;
  shifted.eta = 0.3;
  for (int i = 0; i < 100; ++i) {
    auto [label, state] = alice_prepare(rng, shifted);
    double want = wrap_angle(base_beta(label.tag) + pi / 5.0 - 0.3);
    CHECK(state.beta() == doctest::Approx(want));
  }
}

TEST_CASE("alphabet draw frequencies are uniform") {
  AliceConfig cfg;
  Rng rng(2);
  const int n = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < n; ++i) {
    auto [label, state] = alice_prepare(rng, cfg);
    ++counts[static_cast<int>(label.tag)];
  }
  for (int t = 0; t < 4; ++t) {
    CHECK(static_cast<double>(counts[t]) / n ==
          approx_abs(0.25, 3.0 * binomial_sigma(0.25, n)));
  }
}

TEST_CASE("config validation") {
  AliceConfig bad;
  bad.state_probabilities = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  BobConfig edge;
  edge.p_test = 1.0;
  CHECK_THROWS_AS(edge.validate(), std::invalid_argument);
  edge.p_test = 0.0;
  CHECK_THROWS_AS(edge.validate(), std::invalid_argument);
  edge.p_test = 0.5;
  edge.passes = 0;
  CHECK_THROWS_AS(edge.validate(), std::invalid_argument);
}

TEST_CASE("routing frequencies follow the test fraction") {
  BobConfig bob;
  bob.p_test = 0.5;
  Rng rng(3);
  const int n = 100000;
  std::map<Route, int> counts;
  for (int i = 0; i < n; ++i) ++counts[bob_route(rng, bob)];
  CHECK(static_cast<double>(counts[Route::D1]) / n ==
        approx_abs(0.5, 3.0 * binomial_sigma(0.5, n)));
  CHECK(static_cast<double>(counts[Route::D2]) / n ==
        approx_abs(0.25, 3.0 * binomial_sigma(0.25, n)));
  CHECK(static_cast<double>(counts[Route::D3]) / n ==
        approx_abs(0.25, 3.0 * binomial_sigma(0.25, n)));
}

TEST_CASE("detector measurements") {
  BobConfig bob;
  Rng rng(4);
  // matched test detectors are deterministic
  AliceConfig alice;
  for (int i = 0; i < 50; ++i) {
    CHECK(bob_measure(Route::D3, StateLabel{Tag::XPlus, 0.0}.state(), 1.23, bob, rng) ==
          +1);
    CHECK(bob_measure(Route::D2, StateLabel{Tag::YPlus, 0.0}.state(), 1.23, bob, rng) ==
          +1);
    CHECK(bob_measure(Route::D3, StateLabel{Tag::XMinus, 0.0}.state(), 1.23, bob, rng) ==
          -1);
  }
  // phase path: X+ at phi = pi/6 hits the 3/4 row probability
  const int n = 100000;
  int plus = 0;
  for (int i = 0; i < n; ++i) {
    if (bob_measure(Route::D1, StateLabel{Tag::XPlus, 0.0}.state(), pi / 6.0, bob, rng) >
        0) {
      ++plus;
    }
  }
  CHECK(static_cast<double>(plus) / n ==
        approx_abs(0.75, 3.0 * binomial_sigma(0.75, n)));
  (void)alice;
}

TEST_CASE("check semantics: pass, fail, uninformative, ordering") {
  AliceConfig alice;
  BobConfig bob;
  QubitRecord record;
  record.label = StateLabel{Tag::XPlus, 0.0};
  record.declared_outcome = +1;

  SUBCASE("reveal must precede checking") {
    CHECK_THROWS_AS(alice_check(record, alice, bob), std::logic_error);
  }
  SUBCASE("matched basis, expected outcome") {
    record.declared_route = Route::D3;
    CHECK(alice_check(record, alice, bob) == CheckResult::Pass);
    record.declared_outcome = -1;
    CHECK(alice_check(record, alice, bob) == CheckResult::Fail);
  }
  SUBCASE("mismatched basis is uninformative") {
    record.declared_route = Route::D2;
    CHECK(alice_check(record, alice, bob) == CheckResult::Uninformative);
  }
  SUBCASE("phase path is uninformative") {
    record.declared_route = Route::D1;
    CHECK(alice_check(record, alice, bob) == CheckResult::Uninformative);
  }
  SUBCASE("private shift moves the state off the test bases") {
    AliceConfig shifted = alice;
    shifted.eta = 0.4;
    QubitRecord r2;
    r2.label = StateLabel{Tag::XPlus, -0.4};
    r2.declared_route = Route::D3;
    r2.declared_outcome = -1;
    CHECK(alice_check(r2, shifted, bob) == CheckResult::Uninformative);
  }
}

TEST_CASE("clean sessions never fail, for any secrets") {
  Rng rng(5);
  for (int rep = 0; rep < 4; ++rep) {
    AliceConfig alice;
    alice.epsilon = rng.uniform() * two_pi;
    alice.epsilon_tilde = rng.uniform() * two_pi;
    alice.eta = rng.uniform() * two_pi;
    BobConfig bob;
    bob.p_test = 0.3 + 0.4 * rng.uniform();
    bob.epsilon = alice.epsilon;
    bob.epsilon_tilde = alice.epsilon_tilde;
    SessionTranscript t = run_session(alice, bob, rng.uniform() * two_pi, 10000, rng);
    CHECK_FALSE(t.aborted());
    CHECK(t.records.size() == 10000);
    for (const auto& r : t.records) CHECK(r.check != CheckResult::Fail);
  }
}

TEST_CASE("message ordering invariant holds on randomized runs") {
  Rng rng(6);
  AliceConfig alice;
  BobConfig bob;
  AttackStrategy attack;
  attack.kind = AttackKind::MeasureResend;
  attack.fraction = 0.5;
  AttackedSession session = run_attacked_session(alice, bob, 1.0, 500, attack, rng);
  std::map<std::uint64_t, int> stage;
  for (const auto& msg : session.transcript.messages) {
    int want = stage[msg.qubit_id];
    CHECK(static_cast<int>(msg.kind) == want);
    stage[msg.qubit_id] = want + 1;
  }
  for (auto& [id, count] : stage) CHECK(count == 3);
}

TEST_CASE("abort stops the transcript at the failing qubit") {
  Rng rng(7);
  AliceConfig alice;
  BobConfig bob;
  AttackStrategy attack;
  attack.kind = AttackKind::MeasureResend;
  int aborted = 0;
  for (int rep = 0; rep < 50; ++rep) {
    AttackedSession session = run_attacked_session(alice, bob, 1.0, 200, attack, rng);
    if (session.transcript.aborted()) {
      ++aborted;
      CHECK(session.transcript.records.back().id ==
            session.transcript.abort->qubit_id);
      CHECK(session.transcript.records.back().check == CheckResult::Fail);
      for (std::size_t i = 0; i + 1 < session.transcript.records.size(); ++i) {
        CHECK(session.transcript.records[i].check != CheckResult::Fail);
      }
    }
  }
  CHECK(aborted > 40);  // full interception at mu=200, p=0.5 is all but certain
}

TEST_CASE("interception happens before routing") {
  // the channel hook fires for every qubit, including those later routed to
  // the phase path: the interceptor cannot target test qubits selectively
  Rng rng(8);
  AliceConfig alice;
  BobConfig bob;
  std::vector<std::uint64_t> touched;
  SessionHooks hooks;
  hooks.channel = [&](std::uint64_t id, const QubitState& s, Rng&) -> ChannelResult {
    touched.push_back(id);
    return {s, false};
  };
  SessionTranscript t = run_session(alice, bob, 0.5, 300, hooks, rng);
  CHECK(touched.size() == t.records.size());
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    CHECK(touched[i] == t.records[i].id);
  }
}

TEST_CASE("detection frequency for full interception matches the per-qubit model") {
  // per attacked qubit: wrong basis (1/2) x matched detector (p/2) x wrong
  // outcome (1/2) = p/8; sessions abort with 1 - (1 - p/8)^mu
  Rng rng(9);
  AliceConfig alice;
  BobConfig bob;
  bob.p_test = 0.5;
  AttackStrategy attack;
  attack.kind = AttackKind::MeasureResend;
  const int sessions = 4000;
  int aborted = 0;
  for (int s = 0; s < sessions; ++s) {
    if (run_attacked_session(alice, bob, 1.0, 20, attack, rng).transcript.aborted()) {
      ++aborted;
    }
  }
  double want = 1.0 - std::pow(1.0 - 0.5 / 8.0, 20.0);
  CHECK(static_cast<double>(aborted) / sessions ==
        approx_abs(want, 3.0 * binomial_sigma(want, sessions)));
}

TEST_CASE("single attacked qubit fails a matching test a quarter of the time") {
  Rng rng(10);
  AliceConfig alice;
  BobConfig bob;
  const int n = 40000;
  int fails = 0;
  for (int i = 0; i < n; ++i) {
    auto [label, state] = alice_prepare(rng, alice);
    double basis = rng.bernoulli(0.5) ? 0.0 : half_pi;
    ResendResult res = measure_resend(state, rng, basis);
    // route to the detector matching the original eigenbasis
    Route matching = same_basis(label.tag, Tag::XPlus) ? Route::D3 : Route::D2;
    QubitRecord record;
    record.label = label;
    record.declared_route = matching;
    record.declared_outcome = bob_measure(matching, res.resent, 0.0, bob, rng);
    if (alice_check(record, alice, bob) == CheckResult::Fail) ++fails;
  }
  CHECK(static_cast<double>(fails) / n ==
        approx_abs(0.25, 3.0 * binomial_sigma(0.25, n)));
}

TEST_CASE("declared test-count statistics") {
  Rng rng(11);
  AliceConfig alice;
  BobConfig bob;
  bob.p_test = 0.9;
  SUBCASE("clean sessions read consistent") {
    int consistent = 0;
    const int sessions = 200;
    RunningStat test_counts;
    for (int s = 0; s < sessions; ++s) {
      SessionTranscript t = run_session(alice, bob, 0.3, 10000, rng);
      if (detector_distribution_test(t, 0.9, 3.0) == DistributionVerdict::Consistent) {
        ++consistent;
      }
      std::uint64_t tests = 0;
      for (const auto& r : t.records) {
        if (r.declared_route != std::optional<Route>(Route::D1)) ++tests;
      }
      test_counts.add(static_cast<double>(tests));
    }
    CHECK(consistent >= 197);  // 3-sigma two-sided: ~99.7% expected
    // declared counts behave binomially: mean mu*p, variance mu*p*(1-p)
    double want_mean = 10000 * 0.9, want_var = 10000 * 0.9 * 0.1;
    CHECK(test_counts.mean() ==
          approx_abs(want_mean, 4.0 * std::sqrt(want_var / sessions)));
    CHECK(test_counts.variance() / want_var == doctest::Approx(1.0).epsilon(0.35));
  }
  SUBCASE("a five-sigma relabeling shift is flagged") {
    const std::uint64_t mu = 900;
    double sigma = std::sqrt(900 * 0.9 * 0.1);  // = 9
    auto shift = static_cast<std::uint64_t>(5.0 * sigma);
    SessionTranscript t = run_session(alice, bob, 0.3, mu, rng);
    std::uint64_t moved = 0;
    for (auto& r : t.records) {
      if (moved < shift && r.declared_route != Route::D1) {
        r.declared_route = Route::D1;
        ++moved;
      }
    }
    CHECK(moved == shift);
    CHECK(detector_distribution_test(t, 0.9, 3.0) == DistributionVerdict::Suspicious);
  }
}

TEST_CASE("test-path statistics are invariant under the shared secret") {
  // joint (route, outcome) distribution on the test paths at eps = pi/5
  // matches eps = 0; chi-square homogeneity at 1e5 qubits each
  auto cells = [](double eps, std::uint64_t seed) {
    AliceConfig alice;
    alice.epsilon = eps;
    BobConfig bob;
    bob.epsilon = eps;
    bob.p_test = 0.5;
    Rng rng(seed);
    std::array<std::uint64_t, 4> out{};
    SessionTranscript t = run_session(alice, bob, 0.77, 100000, rng);
    for (const auto& r : t.records) {
      if (r.route == Route::D1) continue;
      int idx = (r.route == Route::D2 ? 0 : 2) + (r.outcome > 0 ? 0 : 1);
      ++out[idx];
    }
    return out;
  };
  auto a = cells(0.0, 42);
  auto b = cells(pi / 5.0, 43);
  double p = chi2_homogeneity_pvalue(std::span<const std::uint64_t>(a),
                                     std::span<const std::uint64_t>(b));
  CHECK(p > 0.01);
}

TEST_CASE("phase-path distribution depends only on the secret combination") {
  // P(+1 | label, D1) is a function of phi + eps - eta - eps_tilde alone
  auto d1_prob = [](double phi, double eps, double eps_tilde, double eta, Tag tag) {
    AliceConfig alice;
    alice.epsilon = eps;
    alice.epsilon_tilde = eps_tilde;
    alice.eta = eta;
    BobConfig bob;
    bob.epsilon = eps;
    bob.epsilon_tilde = eps_tilde;
    StateLabel label{tag, eps - eta};
    QubitState enc = encode_phase(label.state(), phi, 1);
    return outcome_probability(enc, detector_basis(Route::D1, bob), +1);
  };
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    double phi = rng.uniform() * two_pi;
    double eps = rng.uniform() * two_pi;
    double eps_tilde = rng.uniform() * two_pi;
    double eta = rng.uniform() * two_pi;
    Tag tag = static_cast<Tag>(rng.uniform_int(4));
    double combo = phi + eps - eta - eps_tilde;
    CHECK(d1_prob(phi, eps, eps_tilde, eta, tag) ==
          approx_abs(d1_prob(combo, 0.0, 0.0, 0.0, tag), 1e-12));
  }
}

TEST_CASE("public phase-path outcomes are balanced regardless of the phase") {
  Rng rng(13);
  AliceConfig alice;
  BobConfig bob;
  bob.p_test = 0.2;
  for (double phi : {0.0, pi / 4.0, half_pi, pi}) {
    std::uint64_t plus = 0, total = 0;
    SessionTranscript t = run_session(alice, bob, phi, 100000, rng);
    for (const auto& r : t.records) {
      if (r.route != Route::D1) continue;
      ++total;
      if (r.outcome > 0) ++plus;
    }
    double freq = static_cast<double>(plus) / static_cast<double>(total);
    CHECK(freq == approx_abs(0.5, 3.0 * binomial_sigma(0.5, static_cast<double>(total))));
  }
}

TEST_CASE("transcript export and count extraction") {
  Rng rng(14);
  AliceConfig alice;
  BobConfig bob;
  SessionTranscript t = run_session(alice, bob, 1.0, 50, rng);
  std::string private_view = format_transcript(t, false);
  std::string public_view = format_transcript(t, true);
  CHECK(private_view.find("X+") != std::string::npos);
  CHECK(public_view.find("X+") == std::string::npos);
  CHECK(public_view.find("\t-\t") != std::string::npos);

  CountVector counts = counts_from_transcript(t, bob);
  std::uint64_t d1 = 0;
  for (const auto& r : t.records) {
    if (r.declared_route == std::optional<Route>(Route::D1)) ++d1;
  }
  CHECK(counts.total() == d1);
  CHECK(counts.passes == bob.passes);
}

TEST_CASE("the sender's posterior recovers the phase through her secrets") {
  Rng rng(15);
  AliceConfig alice;
  alice.epsilon = 1.1;
  alice.epsilon_tilde = 2.3;
  alice.eta = 0.4;
  BobConfig bob;
  bob.epsilon = 1.1;
  bob.epsilon_tilde = 2.3;
  bob.p_test = 0.2;
  const double phi = 0.4 * pi;
  SessionTranscript t = run_session(alice, bob, phi, 4000, rng);
  LikelihoodGrid g = alice_likelihood(t, alice, bob, GridConfig{2048, 0.0});
  CHECK(angular_distance(map_estimate(g), phi) < 0.1);
}
