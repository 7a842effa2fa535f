#include "sqrs/stats.hpp"

#include <stdexcept>
#include <vector>

namespace sqrs {

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q needs x >= 0, a > 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, double df) {
  return gamma_q(0.5 * df, 0.5 * x);
}

double chi2_homogeneity_pvalue(std::span<const std::uint64_t> cells_a,
                               std::span<const std::uint64_t> cells_b) {
  if (cells_a.size() != cells_b.size() || cells_a.empty()) {
    throw std::invalid_argument("cell vectors must match and be nonempty");
  }
  double total_a = 0.0, total_b = 0.0;
  for (std::size_t i = 0; i < cells_a.size(); ++i) {
    total_a += static_cast<double>(cells_a[i]);
    total_b += static_cast<double>(cells_b[i]);
  }
  if (total_a == 0.0 || total_b == 0.0) {
    throw std::invalid_argument("each sample needs at least one observation");
  }
  double grand = total_a + total_b;
  double chi2 = 0.0;
  int used_cells = 0;
  for (std::size_t i = 0; i < cells_a.size(); ++i) {
    double col = static_cast<double>(cells_a[i]) + static_cast<double>(cells_b[i]);
    if (col == 0.0) continue;
    ++used_cells;
    double ea = col * total_a / grand;
    double eb = col * total_b / grand;
    double da = static_cast<double>(cells_a[i]) - ea;
    double db = static_cast<double>(cells_b[i]) - eb;
    chi2 += da * da / ea + db * db / eb;
  }
  if (used_cells < 2) return 1.0;
  return chi2_sf(chi2, static_cast<double>(used_cells - 1));
}

}  // namespace sqrs
