#include "sqrs/qubit.hpp"

#include <cmath>
#include <stdexcept>

namespace sqrs {

namespace {

double checked_polar(double alpha, const char* what) {
  // Tolerate round-off at the poles, reject genuinely out-of-range input.
  constexpr double slack = 1e-12;
  if (alpha < -slack || alpha > pi + slack) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, pi]");
  }
  if (alpha < 0.0) return 0.0;
  if (alpha > pi) return pi;
  return alpha;
}

}  // namespace

QubitState::QubitState(double alpha, double beta)
    : alpha_(checked_polar(alpha, "alpha")), beta_(wrap_angle(beta)) {}

MeasurementBasis::MeasurementBasis(double gamma, double epsilon_m)
    : gamma_(checked_polar(gamma, "gamma")), epsilon_m_(wrap_angle(epsilon_m)) {}

double base_beta(Tag tag) {
  switch (tag) {
    case Tag::XPlus: return 0.0;
    case Tag::XMinus: return pi;
    case Tag::YPlus: return half_pi;
    case Tag::YMinus: return 3.0 * half_pi;
  }
  throw std::logic_error("unreachable tag");
}

int tag_sign(Tag tag) {
  return (tag == Tag::XPlus || tag == Tag::YPlus) ? +1 : -1;
}

bool same_basis(Tag a, Tag b) {
  auto is_x = [](Tag t) { return t == Tag::XPlus || t == Tag::XMinus; };
  return is_x(a) == is_x(b);
}

QubitState encode_phase(const QubitState& state, double phi, std::uint64_t passes) {
  return QubitState(state.alpha(), state.beta() + static_cast<double>(passes) * phi);
}

double outcome_probability(const QubitState& state, const MeasurementBasis& basis,
                           int outcome) {
  double zeta = state.beta() - basis.epsilon_m();
  double c = std::cos(state.alpha()) * std::cos(basis.gamma()) +
             std::sin(state.alpha()) * std::sin(basis.gamma()) * std::cos(zeta);
  double p = 0.5 * (1.0 + (outcome >= 0 ? c : -c));
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

int sample_outcome(const QubitState& state, const MeasurementBasis& basis, Rng& rng) {
  return rng.bernoulli(outcome_probability(state, basis, +1)) ? +1 : -1;
}

}  // namespace sqrs
