#include "sqrs/information.hpp"

#include <cmath>
#include <stdexcept>

#include "sqrs/angles.hpp"

namespace sqrs {

namespace {

constexpr double kDegenerateProb = 1e-9;

double fisher_from_terms(double p_plus, double dp_plus) {
  double p_minus = 1.0 - p_plus;
  double out = 0.0;
  for (auto [p, dp] : {std::pair{p_plus, dp_plus}, std::pair{p_minus, -dp_plus}}) {
    if (std::fabs(dp) < 1e-15) continue;  // zero-derivative outcomes contribute nothing
    if (p < kDegenerateProb) {
      throw std::domain_error(
          "degenerate outcome probability: P < 1e-9 with nonzero derivative");
    }
    out += dp * dp / p;
  }
  return out;
}

}  // namespace

double classical_fisher_binary(const std::function<double(double)>& p_plus, double phi,
                               double step) {
  double dp = (p_plus(phi + step) - p_plus(phi - step)) / (2.0 * step);
  return fisher_from_terms(p_plus(phi), dp);
}

double classical_fisher_binary(const QubitState& state, const MeasurementBasis& basis,
                               double phi) {
  QubitState encoded = encode_phase(state, phi, 1);
  double p = outcome_probability(encoded, basis, +1);
  double zeta = state.beta() + phi - basis.epsilon_m();
  double dp = -0.5 * std::sin(state.alpha()) * std::sin(basis.gamma()) * std::sin(zeta);
  return fisher_from_terms(p, dp);
}

double general_cfi(double alpha, double gamma, double zeta) {
  double c = std::cos(alpha) * std::cos(gamma) +
             std::sin(alpha) * std::sin(gamma) * std::cos(zeta);
  double denom = 1.0 - c * c;
  if (denom <= 1e-12) {
    throw std::domain_error("degenerate denominator: outcome is deterministic");
  }
  double sa = std::sin(alpha), sg = std::sin(gamma), sz = std::sin(zeta);
  return sa * sa * sg * sg * sz * sz / denom;
}

double cramer_rao(double fisher, std::uint64_t mu) {
  if (!(fisher > 0.0)) throw std::invalid_argument("fisher information must be positive");
  if (mu == 0) throw std::invalid_argument("mu must be at least 1");
  return 1.0 / std::sqrt(static_cast<double>(mu) * fisher);
}

double qfi_qubit(const BlochVector& r, const BlochVector& dr) {
  double n2 = r.norm2();
  if (n2 > 1.0 + 1e-12) throw std::invalid_argument("Bloch vector norm exceeds 1");
  double rdr = r.dot(dr);
  if (n2 >= 1.0 - 1e-12) {
    if (std::fabs(rdr) > 1e-9) {
      throw std::invalid_argument("pure state requires r.dr = 0");
    }
    return dr.norm2();
  }
  return dr.norm2() + rdr * rdr / (1.0 - n2);
}

BlochVector eve_split_bloch(double delta, double gamma, double phi) {
  double a = 0.5 * std::sin(delta);
  return BlochVector{a * std::cos(phi + gamma), a * std::sin(phi + gamma), 0.0};
}

AlphabetPosterior eve_posterior(double delta, double gamma, int outcome) {
  double s = (outcome >= 0 ? 1.0 : -1.0) * std::sin(delta);
  return AlphabetPosterior{0.25 * (1.0 + s * std::cos(gamma)),
                           0.25 * (1.0 - s * std::cos(gamma)),
                           0.25 * (1.0 + s * std::sin(gamma)),
                           0.25 * (1.0 - s * std::sin(gamma))};
}

double splitting_ratio_bb84(double kbar) {
  if (!(kbar > 0.0)) throw std::invalid_argument("kbar must be positive");
  double em1 = std::expm1(kbar);
  return (em1 - kbar) / em1;
}

double splitting_ratio_sqrs(double kbar, double f_e) {
  if (!(kbar > 0.0)) throw std::invalid_argument("kbar must be positive");
  if (f_e < 0.0 || f_e > 1.0) throw std::invalid_argument("f_e must lie in [0, 1]");
  double em1 = std::expm1(kbar);
  return (em1 - kbar - 0.5 * (1.0 - f_e) * kbar * kbar) / em1;
}

}  // namespace sqrs
