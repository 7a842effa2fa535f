#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace sqrs {

/// Standard error of a binomial frequency estimate.
inline double binomial_sigma(double p, double n) {
  return std::sqrt(p * (1.0 - p) / n);
}

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, double df);

/// Two-sample chi-square homogeneity test over matched cell counts.
/// Returns the p-value; cells where both samples are empty are skipped.
double chi2_homogeneity_pvalue(std::span<const std::uint64_t> cells_a,
                               std::span<const std::uint64_t> cells_b);

/// Streaming mean / standard error accumulator (Welford).
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double standard_error() const {
    return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace sqrs
