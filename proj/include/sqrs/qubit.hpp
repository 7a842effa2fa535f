#pragma once

#include <cstdint>

#include "sqrs/angles.hpp"
#include "sqrs/rng.hpp"

namespace sqrs {

/// Pure single-qubit state cos(alpha/2)|0> + sin(alpha/2) e^{i beta}|1>,
/// parameterized by Bloch angles. Normalization is implicit and exact;
/// phase arithmetic is modular addition on beta.
class QubitState {
 public:
  QubitState(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

 private:
  double alpha_;  // polar angle in [0, pi]
  double beta_;   // azimuth, stored reduced to [0, 2*pi)
};

/// Projective measurement basis
///   |+1> = cos(gamma/2)|0> + sin(gamma/2) e^{i eps}|1>
///   |-1> = sin(gamma/2)|0> - cos(gamma/2) e^{i eps}|1>.
class MeasurementBasis {
 public:
  MeasurementBasis(double gamma, double epsilon_m);

  double gamma() const { return gamma_; }
  double epsilon_m() const { return epsilon_m_; }

 private:
  double gamma_;
  double epsilon_m_;
};

/// The four-state equatorial alphabet. Base azimuths before any shift:
/// X+ -> 0, X- -> pi, Y+ -> pi/2, Y- -> 3*pi/2, all with alpha = pi/2.
enum class Tag : int { XPlus = 0, XMinus = 1, YPlus = 2, YMinus = 3 };

double base_beta(Tag tag);

/// Sign of the eigenvalue the tag represents (+1 for X+/Y+, -1 for X-/Y-).
int tag_sign(Tag tag);

/// True when both tags belong to the same eigenbasis (X or Y).
bool same_basis(Tag a, Tag b);

/// A sender-side label: which alphabet state was chosen plus the operational
/// azimuth offset applied on top of the base position.
struct StateLabel {
  Tag tag = Tag::XPlus;
  double shift = 0.0;

  double beta() const { return wrap_angle(base_beta(tag) + shift); }
  QubitState state() const { return QubitState(half_pi, beta()); }
};

/// Apply the phase gate `passes` times: beta' = beta + passes*phi (mod 2*pi).
QubitState encode_phase(const QubitState& state, double phi, std::uint64_t passes);

/// Outcome probability of measuring `state` in `basis`:
///   P(+-1) = (1 +- cos(a)cos(g) +- sin(a)sin(g)cos(beta - eps)) / 2.
/// Total over the two outcomes is exactly 1 in the analytic model.
double outcome_probability(const QubitState& state, const MeasurementBasis& basis,
                           int outcome);

/// Bernoulli draw of +-1 with outcome_probability; deterministic under seed.
int sample_outcome(const QubitState& state, const MeasurementBasis& basis, Rng& rng);

}  // namespace sqrs
