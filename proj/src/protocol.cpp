#include "sqrs/protocol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sqrs {

namespace {

constexpr double kBasisMatchTol = 1e-9;

}  // namespace

void AliceConfig::validate() const {
  double sum = 0.0;
  for (double p : state_probabilities) {
    if (p < 0.0) throw std::invalid_argument("state probabilities must be nonnegative");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("state probabilities must sum to 1");
  }
}

void BobConfig::validate() const {
  if (!(p_test > 0.0 && p_test < 1.0)) {
    throw std::invalid_argument("p_test must lie strictly between 0 and 1");
  }
  if (passes == 0) throw std::invalid_argument("passes must be at least 1");
}

std::pair<StateLabel, QubitState> alice_prepare(Rng& rng, const AliceConfig& config) {
  config.validate();
  Tag tag = static_cast<Tag>(rng.categorical4(config.state_probabilities));
  StateLabel label{tag, config.epsilon - config.eta};
  return {label, label.state()};
}

Route bob_route(Rng& rng, const BobConfig& config) {
  double u = rng.uniform();
  if (u < 1.0 - config.p_test) return Route::D1;
  if (u < 1.0 - config.p_test / 2.0) return Route::D2;
  return Route::D3;
}

MeasurementBasis detector_basis(Route route, const BobConfig& config) {
  switch (route) {
    case Route::D1: return MeasurementBasis(half_pi, half_pi + config.epsilon_tilde);
    case Route::D2: return MeasurementBasis(half_pi, config.epsilon + half_pi);
    case Route::D3: return MeasurementBasis(half_pi, config.epsilon);
  }
  throw std::logic_error("unreachable route");
}

int bob_measure(Route route, const QubitState& state, double phi,
                const BobConfig& config, Rng& rng) {
  if (route == Route::D1) {
    QubitState encoded = encode_phase(state, phi, config.passes);
    return sample_outcome(encoded, detector_basis(route, config), rng);
  }
  return sample_outcome(state, detector_basis(route, config), rng);
}

CheckResult alice_check(const QubitRecord& record,
                        [[maybe_unused]] const AliceConfig& alice,
                        const BobConfig& bob) {
  if (!record.declared_route.has_value()) {
    throw std::logic_error("detector reveal not received for this qubit");
  }
  Route declared = *record.declared_route;
  if (declared == Route::D1) return CheckResult::Uninformative;

  // The sent state is an eigenstate of the declared detector only when the
  // azimuth residual is 0 or pi; anything else gives a 50/50-ish outcome and
  // carries no deterministic expectation.
  double detector_azimuth = detector_basis(declared, bob).epsilon_m();
  double residual = angular_distance(record.label.beta(), detector_azimuth);
  int expected;
  if (residual < kBasisMatchTol) {
    expected = +1;
  } else if (std::fabs(residual - pi) < kBasisMatchTol) {
    expected = -1;
  } else {
    return CheckResult::Uninformative;
  }
  return (record.declared_outcome == expected) ? CheckResult::Pass : CheckResult::Fail;
}

SessionTranscript run_session(const AliceConfig& alice, const BobConfig& bob,
                              double phi, std::uint64_t mu, const SessionHooks& hooks,
                              Rng& rng) {
  alice.validate();
  bob.validate();
  if (mu == 0) throw std::invalid_argument("mu must be at least 1");

  SessionTranscript transcript;
  transcript.records.reserve(mu);

  for (std::uint64_t id = 0; id < mu; ++id) {
    QubitRecord record;
    record.id = id;

    auto [label, state] = alice_prepare(rng, alice);
    record.label = label;

    // Interception happens in flight, before the routing draw: the
    // interceptor cannot select qubits by destination.
    QubitState received = state;
    if (hooks.channel) {
      ChannelResult touched = hooks.channel(id, state, rng);
      received = touched.state;
      record.attacked = touched.attacked;
    }

    record.route = bob_route(rng, bob);
    record.outcome = bob_measure(record.route, received, phi, bob, rng);

    // Result -> Ack -> DetectorReveal; the declared values pass through the
    // classical hooks stage by stage.
    record.declared_outcome =
        hooks.on_result ? hooks.on_result(id, record.outcome) : record.outcome;
    transcript.messages.push_back(
        {id, MessageKind::Result, record.declared_outcome, Route::D1});
    transcript.messages.push_back({id, MessageKind::Ack, 0, Route::D1});
    Route declared_route =
        hooks.on_reveal ? hooks.on_reveal(id, record.route) : record.route;
    record.declared_route = declared_route;
    transcript.messages.push_back(
        {id, MessageKind::DetectorReveal, 0, declared_route});

    record.check = alice_check(record, alice, bob);
    transcript.records.push_back(record);

    if (record.check == CheckResult::Fail) {
      transcript.abort = AbortEvent{id, "fidelity check disagreement"};
      break;
    }
  }
  return transcript;
}

SessionTranscript run_session(const AliceConfig& alice, const BobConfig& bob,
                              double phi, std::uint64_t mu, Rng& rng) {
  return run_session(alice, bob, phi, mu, SessionHooks{}, rng);
}

DistributionVerdict detector_distribution_test(const SessionTranscript& transcript,
                                               double p_test,
                                               double significance_sigma) {
  double mu = static_cast<double>(transcript.records.size());
  double observed = 0.0;
  for (const auto& record : transcript.records) {
    if (record.declared_route.has_value() && *record.declared_route != Route::D1) {
      observed += 1.0;
    }
  }
  double expected = mu * p_test;
  double sigma = std::sqrt(mu * p_test * (1.0 - p_test));
  return (std::fabs(observed - expected) > significance_sigma * sigma)
             ? DistributionVerdict::Suspicious
             : DistributionVerdict::Consistent;
}

CountVector counts_from_transcript(const SessionTranscript& transcript,
                                   const BobConfig& bob, RecordFilter filter) {
  CountVector counts;
  counts.passes = bob.passes;
  for (const auto& record : transcript.records) {
    bool include = (filter == RecordFilter::DeclaredD1)
                       ? (record.declared_route.has_value() &&
                          *record.declared_route == Route::D1)
                       : (record.route == Route::D1);
    if (!include) continue;
    ++counts.n[count_index(record.label.tag, record.declared_outcome)];
  }
  return counts;
}

double alice_phase_offset(const AliceConfig& alice, const BobConfig& bob) {
  return alice.epsilon - alice.eta - bob.epsilon_tilde;
}

LikelihoodGrid alice_likelihood(const SessionTranscript& transcript,
                                const AliceConfig& alice, const BobConfig& bob,
                                const GridConfig& grid, RecordFilter filter) {
  CountVector counts = counts_from_transcript(transcript, bob, filter);
  return likelihood_from_counts(counts, grid, alice_phase_offset(alice, bob));
}

std::string to_string(Route route) {
  switch (route) {
    case Route::D1: return "D1";
    case Route::D2: return "D2";
    case Route::D3: return "D3";
  }
  return "?";
}

std::string to_string(Tag tag) {
  switch (tag) {
    case Tag::XPlus: return "X+";
    case Tag::XMinus: return "X-";
    case Tag::YPlus: return "Y+";
    case Tag::YMinus: return "Y-";
  }
  return "?";
}

std::string format_transcript(const SessionTranscript& transcript, bool public_view) {
  std::ostringstream out;
  out << "id\tlabel\troute\toutcome\tattacked\n";
  for (const auto& record : transcript.records) {
    out << record.id << '\t'
        << (public_view ? std::string("-") : to_string(record.label.tag)) << '\t'
        << (record.declared_route ? to_string(*record.declared_route)
                                  : std::string("-"))
        << '\t' << (record.declared_outcome > 0 ? "+1" : "-1") << '\t'
        << (record.attacked ? 1 : 0) << '\n';
  }
  if (transcript.abort) {
    out << "abort\t" << transcript.abort->qubit_id << '\t' << transcript.abort->reason
        << '\n';
  }
  return out.str();
}

}  // namespace sqrs
