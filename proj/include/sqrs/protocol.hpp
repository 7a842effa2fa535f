#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sqrs/estimation.hpp"
#include "sqrs/qubit.hpp"
#include "sqrs/rng.hpp"

namespace sqrs {

/// Sender-side parameters. epsilon is the shared test-path secret, applied as
/// an azimuth offset to every state; epsilon_tilde is the shared phase-path
/// detector secret; eta is the sender's private operating-point shift (states
/// rotate by -eta). State probabilities default to the uniform alphabet.
struct AliceConfig {
  double epsilon = 0.0;
  double epsilon_tilde = 0.0;
  double eta = 0.0;
  std::array<double, 4> state_probabilities = {0.25, 0.25, 0.25, 0.25};

  void validate() const;
};

/// Receiver-side parameters. p_test is the probability of routing a qubit to
/// a fidelity-check detector (split evenly between D2 and D3); the remainder
/// goes to the phase path at D1, which applies `passes` phase-gate passes.
/// The secrets must match the sender's for an honest session.
struct BobConfig {
  double p_test = 0.5;
  std::uint64_t passes = 1;
  double epsilon = 0.0;
  double epsilon_tilde = 0.0;

  void validate() const;
};

enum class Route : int { D1 = 1, D2 = 2, D3 = 3 };

enum class MessageKind : int { Result = 0, Ack = 1, DetectorReveal = 2 };

/// One classical message. Per qubit the transcript order is
/// Result -> Ack -> DetectorReveal: the detector identity stays hidden until
/// the sender has acknowledged the outcome.
struct ClassicalMessage {
  std::uint64_t qubit_id = 0;
  MessageKind kind = MessageKind::Result;
  int outcome = 0;               // Result only
  Route detector = Route::D1;    // DetectorReveal only
};

enum class CheckResult : int { Pass = 0, Fail = 1, Uninformative = 2 };

/// Ground truth plus the (possibly tampered) declared view of one qubit.
struct QubitRecord {
  std::uint64_t id = 0;
  StateLabel label;
  bool attacked = false;
  Route route = Route::D1;                    // true route drawn by the receiver
  int outcome = 0;                            // true measurement outcome
  int declared_outcome = 0;                   // as seen on the classical channel
  std::optional<Route> declared_route;        // set once the reveal message arrives
  CheckResult check = CheckResult::Uninformative;
};

struct AbortEvent {
  std::uint64_t qubit_id = 0;
  std::string reason;
};

struct SessionTranscript {
  std::vector<QubitRecord> records;
  std::vector<ClassicalMessage> messages;
  std::optional<AbortEvent> abort;

  bool aborted() const { return abort.has_value(); }
};

/// Interception hooks. The channel hook runs strictly before the routing
/// draw, and the classical hooks see the result before the reveal, matching
/// the message ordering of the protocol.
struct ChannelResult {
  QubitState state;
  bool attacked = false;
};

struct SessionHooks {
  std::function<ChannelResult(std::uint64_t id, const QubitState&, Rng&)> channel;
  std::function<int(std::uint64_t id, int outcome)> on_result;
  std::function<Route(std::uint64_t id, Route route)> on_reveal;
};

/// Draw a label and prepare its state: alpha = pi/2,
/// beta = base(tag) + epsilon - eta (mod 2*pi).
std::pair<StateLabel, QubitState> alice_prepare(Rng& rng, const AliceConfig& config);

/// Categorical routing draw: D1 with probability 1-p, D2 and D3 with p/2 each.
Route bob_route(Rng& rng, const BobConfig& config);

/// Detector bases. D1 sits at azimuth pi/2 + epsilon_tilde (the sigma_y
/// baseline plus the shared secret), D2 at epsilon + pi/2, D3 at epsilon.
MeasurementBasis detector_basis(Route route, const BobConfig& config);

/// Measure a received state at the routed detector; D1 encodes the phase
/// (m passes) first.
int bob_measure(Route route, const QubitState& state, double phi,
                const BobConfig& config, Rng& rng);

/// Classify a completed record: Fail iff the declared detector's basis
/// matches the sent label's eigenbasis and the declared outcome contradicts
/// the deterministic expectation; Uninformative for D1 or mismatched bases.
/// Throws std::logic_error if the detector reveal has not arrived.
CheckResult alice_check(const QubitRecord& record, const AliceConfig& alice,
                        const BobConfig& bob);

/// Run a session of mu qubits, stopping at the first failed check.
SessionTranscript run_session(const AliceConfig& alice, const BobConfig& bob,
                              double phi, std::uint64_t mu, const SessionHooks& hooks,
                              Rng& rng);
SessionTranscript run_session(const AliceConfig& alice, const BobConfig& bob,
                              double phi, std::uint64_t mu, Rng& rng);

enum class DistributionVerdict : int { Consistent = 0, Suspicious = 1 };

/// Compare the declared test-path count against Binomial(mu, p): suspicious
/// iff |observed - mu*p| > significance_sigma * sqrt(mu*p*(1-p)).
DistributionVerdict detector_distribution_test(const SessionTranscript& transcript,
                                               double p_test, double significance_sigma);

enum class RecordFilter : int { DeclaredD1 = 0, TrueD1 = 1 };

/// Tally phase-path records into a CountVector (passes taken from BobConfig).
CountVector counts_from_transcript(const SessionTranscript& transcript,
                                   const BobConfig& bob,
                                   RecordFilter filter = RecordFilter::DeclaredD1);

/// Azimuth offset that folds the session secrets into the canonical count
/// model: the phase-path outcome distribution depends on the encoded angle
/// only through m*phi + (epsilon - eta - epsilon_tilde).
double alice_phase_offset(const AliceConfig& alice, const BobConfig& bob);

/// Sender-side posterior over phi from a transcript, using her full knowledge
/// of labels and secrets.
LikelihoodGrid alice_likelihood(const SessionTranscript& transcript,
                                const AliceConfig& alice, const BobConfig& bob,
                                const GridConfig& grid,
                                RecordFilter filter = RecordFilter::DeclaredD1);

/// Line-delimited transcript export: one record per line
/// (id, label, route, outcome, attacked), with the label redacted in the
/// public view; an aborted session ends with an abort line.
std::string format_transcript(const SessionTranscript& transcript, bool public_view);

std::string to_string(Route route);
std::string to_string(Tag tag);

}  // namespace sqrs
