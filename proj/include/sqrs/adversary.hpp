#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sqrs/estimation.hpp"
#include "sqrs/protocol.hpp"
#include "sqrs/qubit.hpp"
#include "sqrs/rng.hpp"

namespace sqrs {

enum class AttackKind : int {
  None = 0,
  MeasureResend = 1,
  PhotonSplit = 2,
  SpoofFlip = 3,
  MitmRelabel = 4,
  ImpersonateAlice = 5,
  ImpersonateBob = 6,
};

/// Parameters for a pluggable interceptor strategy. Fields are read per kind;
/// unused ones are ignored.
struct AttackStrategy {
  AttackKind kind = AttackKind::None;
  double fraction = 1.0;        // MeasureResend: per-qubit interception probability
  double eve_epsilon = 0.0;     // interceptor's guess of the test secret
  double eve_epsilon_tilde = 0.0;  // interceptor's guess of the phase-path secret
  double eve_delta = half_pi;   // PhotonSplit projector polar angle
  double eve_gamma = 0.0;       // PhotonSplit projector azimuth
  double kbar = 0.1;            // PhotonSplit source intensity
  std::uint64_t attack_count = 0;  // MitmRelabel: qubits measured (0 = from formula)
  std::uint64_t relabel_budget = UINT64_MAX;  // MitmRelabel: max reveal edits
  bool relabel_swap23 = false;  // MitmRelabel: swap test labels instead of hiding as D1
  bool flip_pre_reveal = false;  // SpoofFlip: flip results in flight (tests included)
};

/// One piece of per-qubit knowledge the interceptor holds.
///  - KnownState: she knows the azimuth of the state the receiver measured
///    (her resent state, or a split copy with full information).
///  - SoftCopy: she measured one split copy with projector (delta, gamma) and
///    kept the binary outcome.
struct EveCapture {
  std::uint64_t qubit_id = 0;
  enum class Kind : int { KnownState = 0, SoftCopy = 1 } kind = Kind::KnownState;
  double azimuth = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  int copy_outcome = 0;
  Tag guessed_tag = Tag::XPlus;
  bool basis_matched = false;
};

struct EveKnowledge {
  std::vector<EveCapture> captures;
  std::vector<std::uint64_t> relabeled_ids;
  std::unordered_map<std::uint64_t, double> basis_azimuth_by_id;
  std::uint64_t attacked = 0;

  bool relabeled(std::uint64_t id) const;
};

struct ResendResult {
  QubitState resent;
  int outcome = 0;
  double resent_azimuth = 0.0;
  Tag guessed_tag = Tag::XPlus;
  bool basis_matched = false;
};

/// Measure an in-flight equatorial state in the basis at `basis_azimuth` and
/// forward the outcome eigenstate. basis_matched records whether the chosen
/// basis coincides with the state's own eigenbasis (then the resend is exact);
/// the guessed tag decodes (azimuth, outcome) under the interceptor's assumed
/// alphabet offset.
ResendResult measure_resend(const QubitState& state, Rng& rng, double basis_azimuth,
                            double assumed_shift = 0.0);

/// Worst-case spoof on stored classical data: flip every declared outcome of
/// declared phase-path records. Checks are untouched, the posterior rotates
/// by pi.
SessionTranscript spoof_flip(const SessionTranscript& transcript);

struct AttackedSession {
  SessionTranscript transcript;
  EveKnowledge eve;
};

/// Run one session under the given strategy (None, MeasureResend, PhotonSplit,
/// SpoofFlip or MitmRelabel; impersonation has dedicated drivers below).
AttackedSession run_attacked_session(const AliceConfig& alice, const BobConfig& bob,
                                     double phi, std::uint64_t mu,
                                     const AttackStrategy& strategy, Rng& rng);

/// Interceptor plays the sender: she transmits her own canonical alphabet,
/// the honest receiver encodes and measures with his true secrets, and she
/// keeps exact knowledge of every state she sent.
AttackedSession impersonate_alice_session(const BobConfig& bob, double phi,
                                          std::uint64_t mu, Rng& rng);

/// Interceptor plays the receiver with guessed secrets: measurements happen
/// in her bases (no phase available), while the sender checks against the
/// true shared secrets.
SessionTranscript impersonate_bob_session(const AliceConfig& alice,
                                          const BobConfig& expected_bob,
                                          const BobConfig& eve_view, std::uint64_t mu,
                                          Rng& rng);

/// Interceptor model assumptions used when turning captures into a posterior.
struct EveModel {
  std::uint64_t passes = 1;
  double assumed_epsilon_tilde = 0.0;
  /// When set, the grid axis is u = m*phi - epsilon_tilde (the detector-secret
  /// residual) rather than phi itself.
  bool over_secret_residual = false;
};

/// Interceptor posterior from public declared phase-path outcomes plus her
/// captures. Records she relabeled herself are excluded (she knows they are
/// fakes); with no usable captures the grid is exactly uniform.
LikelihoodGrid eve_accumulate(const SessionTranscript& transcript,
                              const EveKnowledge& eve, const EveModel& model,
                              const GridConfig& grid);

/// Exact marginal over a uniformly distributed detector secret: given
/// positive grids G_i over u_i = m_i*phi - eps_tilde, returns
/// M(phi_k) = (1/K) sum_j prod_i G_i[(m_i k - j) mod K], normalized.
LikelihoodGrid marginal_over_secret(
    const std::vector<std::pair<std::uint64_t, LikelihoodGrid>>& u_grids,
    const GridConfig& grid);

/// Man-in-the-middle budget arithmetic: number of states for one successful
/// hidden measurement, mu = p/(1-p)^3; the interceptor measures
/// sqrt(mu(1-p)/p) qubits; the sender keeps mu(1-p) informative ones.
double mitm_mu_for_unit_info(double p_test);
double mitm_eve_measurements(double mu, double p_test);
double mitm_alice_info(double mu, double p_test);

}  // namespace sqrs
