#pragma once

#include <cstdint>
#include <functional>

#include "sqrs/qubit.hpp"

namespace sqrs {

/// Bloch vector of a (possibly mixed) single-qubit density matrix
/// rho = (I + r . sigma) / 2.
struct BlochVector {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;

  double norm2() const { return rx * rx + ry * ry + rz * rz; }
  double dot(const BlochVector& o) const { return rx * o.rx + ry * o.ry + rz * o.rz; }
};

/// Classical Fisher information of a binary outcome model,
///   I(phi) = sum_i (dP(i|phi)/dphi)^2 / P(i|phi),
/// with the derivative taken by a central finite difference of `p_plus`.
/// Throws std::domain_error when an outcome probability is below 1e-9 while
/// its derivative contribution is nonzero.
double classical_fisher_binary(const std::function<double(double)>& p_plus, double phi,
                               double step = 1e-6);

/// Same information for the projective qubit model, with the analytic
/// derivative dP(+1)/dphi = -sin(a)sin(g)sin(beta + phi - eps)/2. The state's
/// beta is the pre-encoding azimuth; phi is the evaluation point.
double classical_fisher_binary(const QubitState& state, const MeasurementBasis& basis,
                               double phi);

/// Closed form of the binary-model Fisher information,
///   sin^2(a) sin^2(g) sin^2(zeta) / (1 - c^2),  c = cos(a)cos(g) + sin(a)sin(g)cos(zeta).
/// Throws std::domain_error when the denominator is degenerate (deterministic
/// outcome configurations).
double general_cfi(double alpha, double gamma, double zeta);

/// Lower bound on the estimator deviation: 1 / sqrt(mu * fisher).
double cramer_rao(double fisher, std::uint64_t mu);

/// Quantum Fisher information of a qubit from its Bloch vector r and the
/// parameter derivative dr:  |dr|^2 + (r.dr)^2 / (1 - |r|^2), with the pure
/// limit |dr|^2 requiring r.dr = 0.
double qfi_qubit(const BlochVector& r, const BlochVector& dr);

/// Bloch vector of the interceptor's post-measurement copy state,
///   r = (sin(d)cos(phi+g)/2, sin(d)sin(phi+g)/2, 0).
BlochVector eve_split_bloch(double delta, double gamma, double phi);

/// Interceptor posterior over the four-state alphabet after observing the
/// outcome of a projection onto cos(d/2)|0> + sin(d/2)e^{ig}|1>. Uniform 1/4
/// prior; the four entries sum to 1 exactly.
struct AlphabetPosterior {
  double x_plus, x_minus, y_plus, y_minus;

  double operator[](Tag t) const {
    switch (t) {
      case Tag::XPlus: return x_plus;
      case Tag::XMinus: return x_minus;
      case Tag::YPlus: return y_plus;
      default: return y_minus;
    }
  }
};
AlphabetPosterior eve_posterior(double delta, double gamma, int outcome = +1);

/// Relative information rate of an interceptor splitting photons off a weak
/// coherent source, per mean photon number kbar.
/// Basis-revealing reference protocol: (e^k - 1 - k) / (e^k - 1).
double splitting_ratio_bb84(double kbar);
/// This scheme: (e^k - 1 - k - (1 - f_e)/2 * k^2) / (e^k - 1), where f_e is
/// the interceptor's per-copy quantum Fisher information (at most 1/4).
double splitting_ratio_sqrs(double kbar, double f_e);

}  // namespace sqrs
