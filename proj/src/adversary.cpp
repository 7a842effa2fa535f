#include "sqrs/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqrs/information.hpp"
#include "sqrs/photonics.hpp"

namespace sqrs {

namespace {

constexpr double kAzimuthTol = 1e-9;

Tag nearest_tag(double azimuth, double assumed_shift) {
  double rel = wrap_angle(azimuth - assumed_shift);
  int quadrant = static_cast<int>(std::floor(rel / half_pi + 0.5)) % 4;
  switch (quadrant) {
    case 0: return Tag::XPlus;
    case 1: return Tag::YPlus;
    case 2: return Tag::XMinus;
    default: return Tag::YMinus;
  }
}

bool equatorial_basis_match(double state_beta, double basis_azimuth) {
  double d = angular_distance(state_beta, basis_azimuth);
  return d < kAzimuthTol || std::fabs(d - pi) < kAzimuthTol;
}

}  // namespace

bool EveKnowledge::relabeled(std::uint64_t id) const {
  return std::find(relabeled_ids.begin(), relabeled_ids.end(), id) !=
         relabeled_ids.end();
}

ResendResult measure_resend(const QubitState& state, Rng& rng, double basis_azimuth,
                            double assumed_shift) {
  MeasurementBasis basis(half_pi, basis_azimuth);
  int outcome = sample_outcome(state, basis, rng);
  double resent_azimuth = wrap_angle(basis_azimuth + (outcome > 0 ? 0.0 : pi));
  return ResendResult{QubitState(half_pi, resent_azimuth), outcome, resent_azimuth,
                      nearest_tag(resent_azimuth, assumed_shift),
                      equatorial_basis_match(state.beta(), basis_azimuth)};
}

SessionTranscript spoof_flip(const SessionTranscript& transcript) {
  SessionTranscript out = transcript;
  for (auto& record : out.records) {
    if (record.declared_route && *record.declared_route == Route::D1) {
      record.declared_outcome = -record.declared_outcome;
    }
  }
  for (auto& message : out.messages) {
    if (message.kind != MessageKind::Result) continue;
    std::uint64_t id = message.qubit_id;
    if (id < out.records.size() &&
        out.records[id].declared_route == std::optional<Route>(Route::D1)) {
      message.outcome = -message.outcome;
    }
  }
  return out;
}

AttackedSession run_attacked_session(const AliceConfig& alice, const BobConfig& bob,
                                     double phi, std::uint64_t mu,
                                     const AttackStrategy& strategy, Rng& rng) {
  AttackedSession session;
  EveKnowledge& eve = session.eve;
  SessionHooks hooks;

  switch (strategy.kind) {
    case AttackKind::None:
      break;

    case AttackKind::MeasureResend: {
      hooks.channel = [&](std::uint64_t id, const QubitState& state,
                          Rng& r) -> ChannelResult {
        if (strategy.fraction < 1.0 && !r.bernoulli(strategy.fraction)) {
          return {state, false};
        }
        double basis = strategy.eve_epsilon + (r.bernoulli(0.5) ? half_pi : 0.0);
        ResendResult res = measure_resend(state, r, basis, strategy.eve_epsilon);
        eve.basis_azimuth_by_id[id] = basis;
        EveCapture capture;
        capture.qubit_id = id;
        capture.kind = EveCapture::Kind::KnownState;
        capture.azimuth = res.resent_azimuth;
        capture.guessed_tag = res.guessed_tag;
        capture.basis_matched = res.basis_matched;
        eve.captures.push_back(capture);
        ++eve.attacked;
        return {res.resent, true};
      };
      break;
    }

    case AttackKind::PhotonSplit: {
      // Session qubits are delivered pulses; splitting exposure follows the
      // photon statistics conditioned on delivery. Passive: states untouched.
      double p1 = -std::expm1(-strategy.kbar);  // P(k >= 1)
      double p2 = poisson_pmf(strategy.kbar, 2) / p1;
      double p3 = (p1 - poisson_pmf(strategy.kbar, 1) - poisson_pmf(strategy.kbar, 2)) / p1;
      hooks.channel = [&, p2, p3](std::uint64_t id, const QubitState& state,
                                  Rng& r) -> ChannelResult {
        double u = r.uniform();
        if (u < p2) {
          MeasurementBasis projector(strategy.eve_delta, strategy.eve_gamma);
          EveCapture capture;
          capture.qubit_id = id;
          capture.kind = EveCapture::Kind::SoftCopy;
          capture.delta = strategy.eve_delta;
          capture.gamma = strategy.eve_gamma;
          capture.copy_outcome = sample_outcome(state, projector, r);
          eve.captures.push_back(capture);
          ++eve.attacked;
        } else if (u < p2 + p3) {
          EveCapture capture;
          capture.qubit_id = id;
          capture.kind = EveCapture::Kind::KnownState;
          capture.azimuth = state.beta();
          eve.captures.push_back(capture);
          ++eve.attacked;
        }
        return {state, false};
      };
      break;
    }

    case AttackKind::SpoofFlip: {
      if (strategy.flip_pre_reveal) {
        hooks.on_result = [](std::uint64_t, int outcome) { return -outcome; };
      }
      break;
    }

    case AttackKind::MitmRelabel: {
      std::uint64_t k = strategy.attack_count;
      if (k == 0) {
        k = static_cast<std::uint64_t>(
            std::llround(mitm_eve_measurements(static_cast<double>(mu), bob.p_test)));
      }
      hooks.channel = [&, k](std::uint64_t id, const QubitState& state,
                             Rng& r) -> ChannelResult {
        if (id >= k) return {state, false};
        double basis = strategy.eve_epsilon + (r.bernoulli(0.5) ? half_pi : 0.0);
        ResendResult res = measure_resend(state, r, basis, strategy.eve_epsilon);
        eve.basis_azimuth_by_id[id] = basis;
        EveCapture capture;
        capture.qubit_id = id;
        capture.kind = EveCapture::Kind::KnownState;
        capture.azimuth = res.resent_azimuth;
        capture.guessed_tag = res.guessed_tag;
        capture.basis_matched = res.basis_matched;
        eve.captures.push_back(capture);
        ++eve.attacked;
        return {res.resent, true};
      };
      hooks.on_reveal = [&, strategy](std::uint64_t id, Route route) -> Route {
        if (route == Route::D1) return route;
        auto it = eve.basis_azimuth_by_id.find(id);
        if (it == eve.basis_azimuth_by_id.end()) return route;
        if (strategy.relabel_swap23) {
          // Hide only the dangerous case: the revealed test detector measures
          // in a different basis than she did, so the record could fail a
          // matched-basis check. Swapping test labels keeps the route counts
          // unchanged.
          bool eve_x_basis = angular_distance(it->second, 0.0) < kAzimuthTol ||
                             angular_distance(it->second, pi) < kAzimuthTol;
          bool detector_x_basis = (route == Route::D3);
          if (eve_x_basis != detector_x_basis) {
            eve.relabeled_ids.push_back(id);
            return (route == Route::D2) ? Route::D3 : Route::D2;
          }
          return route;
        }
        if (eve.relabeled_ids.size() < strategy.relabel_budget) {
          eve.relabeled_ids.push_back(id);
          return Route::D1;
        }
        return route;
      };
      break;
    }

    case AttackKind::ImpersonateAlice:
    case AttackKind::ImpersonateBob:
      throw std::invalid_argument("impersonation uses its dedicated session driver");
  }

  session.transcript = run_session(alice, bob, phi, mu, hooks, rng);

  if (strategy.kind == AttackKind::SpoofFlip && !strategy.flip_pre_reveal) {
    session.transcript = spoof_flip(session.transcript);
  }
  return session;
}

AttackedSession impersonate_alice_session(const BobConfig& bob, double phi,
                                          std::uint64_t mu, Rng& rng) {
  AliceConfig eve_as_alice;  // canonical alphabet, no secrets
  AttackedSession session;
  session.transcript = run_session(eve_as_alice, bob, phi, mu, rng);
  for (const auto& record : session.transcript.records) {
    EveCapture capture;
    capture.qubit_id = record.id;
    capture.kind = EveCapture::Kind::KnownState;
    capture.azimuth = record.label.beta();
    capture.guessed_tag = record.label.tag;
    capture.basis_matched = true;
    session.eve.captures.push_back(capture);
  }
  session.eve.attacked = session.transcript.records.size();
  return session;
}

SessionTranscript impersonate_bob_session(const AliceConfig& alice,
                                          const BobConfig& expected_bob,
                                          const BobConfig& eve_view, std::uint64_t mu,
                                          Rng& rng) {
  alice.validate();
  expected_bob.validate();
  eve_view.validate();
  if (mu == 0) throw std::invalid_argument("mu must be at least 1");

  SessionTranscript transcript;
  for (std::uint64_t id = 0; id < mu; ++id) {
    QubitRecord record;
    record.id = id;
    auto [label, state] = alice_prepare(rng, alice);
    record.label = label;
    record.attacked = true;

    record.route = bob_route(rng, eve_view);
    // No phase is available to the impostor; her "phase path" measures the
    // bare state in her guessed basis.
    record.outcome = bob_measure(record.route, state, 0.0, eve_view, rng);
    record.declared_outcome = record.outcome;
    record.declared_route = record.route;

    transcript.messages.push_back({id, MessageKind::Result, record.outcome, Route::D1});
    transcript.messages.push_back({id, MessageKind::Ack, 0, Route::D1});
    transcript.messages.push_back({id, MessageKind::DetectorReveal, 0, record.route});

    record.check = alice_check(record, alice, expected_bob);
    transcript.records.push_back(record);
    if (record.check == CheckResult::Fail) {
      transcript.abort = AbortEvent{id, "fidelity check disagreement"};
      break;
    }
  }
  return transcript;
}

LikelihoodGrid eve_accumulate(const SessionTranscript& transcript,
                              const EveKnowledge& eve, const EveModel& model,
                              const GridConfig& grid) {
  std::vector<double> logv(static_cast<std::size_t>(grid.k_bins), 0.0);
  const std::uint64_t m_axis = model.over_secret_residual ? 1 : model.passes;

  for (const auto& capture : eve.captures) {
    if (capture.qubit_id >= transcript.records.size()) continue;
    const auto& record = transcript.records[capture.qubit_id];
    if (!record.declared_route || *record.declared_route != Route::D1) continue;
    if (eve.relabeled(capture.qubit_id)) continue;  // she planted those herself
    double o = (record.declared_outcome > 0) ? 1.0 : -1.0;

    if (capture.kind == EveCapture::Kind::KnownState) {
      // P(o | state) = (1 + o cos(az + m*theta - pi/2 - eps_tilde)) / 2
      double phase = capture.azimuth - half_pi -
                     (model.over_secret_residual ? 0.0 : model.assumed_epsilon_tilde);
      add_cosine_log_factor(logv, grid, 1.0, o, m_axis, phase);
    } else {
      // Exact Bayes over the alphabet collapses to a single cosine:
      // P(o | copy outcome e) = (1 + o e sin(d)/2 * cos(g + m*theta - pi/2 - et)) / 2
      double amplitude = o * capture.copy_outcome * 0.5 * std::sin(capture.delta);
      double phase = capture.gamma - half_pi -
                     (model.over_secret_residual ? 0.0 : model.assumed_epsilon_tilde);
      add_cosine_log_factor(logv, grid, 1.0, amplitude, m_axis, phase);
    }
  }
  return LikelihoodGrid::from_log_values(grid, std::move(logv), true);
}

LikelihoodGrid marginal_over_secret(
    const std::vector<std::pair<std::uint64_t, LikelihoodGrid>>& u_grids,
    const GridConfig& grid) {
  if (u_grids.empty()) throw std::invalid_argument("no grids to marginalize");
  const int k = grid.k_bins;
  std::vector<std::vector<double>> masses;
  masses.reserve(u_grids.size());
  for (const auto& [m, g] : u_grids) {
    if (g.size() != k) throw std::invalid_argument("grid geometry mismatch");
    std::vector<double> w(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) w[i] = g.mass(i);
    masses.push_back(std::move(w));
  }
  std::vector<double> logv(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      double prod = 1.0;
      for (std::size_t g = 0; g < u_grids.size(); ++g) {
        std::uint64_t mi = u_grids[g].first;
        // index of u = m_i * phi_i - eps_tilde_j on the shared circular grid
        std::uint64_t idx =
            (mi * static_cast<std::uint64_t>(i) + static_cast<std::uint64_t>(k - j)) %
            static_cast<std::uint64_t>(k);
        prod *= masses[g][idx];
        if (prod == 0.0) break;
      }
      sum += prod;
    }
    logv[i] = (sum > 0.0) ? std::log(sum) : -std::numeric_limits<double>::infinity();
  }
  return LikelihoodGrid::from_log_values(grid, std::move(logv), true);
}

double mitm_mu_for_unit_info(double p_test) {
  double q = 1.0 - p_test;
  return p_test / (q * q * q);
}

double mitm_eve_measurements(double mu, double p_test) {
  return std::sqrt(mu * (1.0 - p_test) / p_test);
}

double mitm_alice_info(double mu, double p_test) {
  return mu * (1.0 - p_test);
}

}  // namespace sqrs
