#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sqrs/angles.hpp"
#include "sqrs/qubit.hpp"
#include "sqrs/rng.hpp"

namespace sqrs {

/// Outcome counts for the four-state alphabet measured on the phase path.
/// Index convention (zero-based): 2*tag + (outcome < 0), i.e.
///   [0] X+/+1  [1] X+/-1  [2] X-/+1  [3] X-/-1
///   [4] Y+/+1  [5] Y+/-1  [6] Y-/+1  [7] Y-/-1
struct CountVector {
  std::array<std::uint64_t, 8> n{};
  std::uint64_t passes = 1;

  std::uint64_t total() const;
};

std::size_t count_index(Tag tag, int outcome);

/// Outcome probability for one alphabet row at encoded angle x = m*phi + offset:
/// X+: (1+sin x)/2, X-: (1-sin x)/2, Y+: (1+cos x)/2, Y-: (1-cos x)/2.
double row_probability(Tag tag, int outcome, double x);

/// Swap +1/-1 outcomes within every alphabet row (n1<->n2, n3<->n4, ...).
CountVector flip_outcomes(const CountVector& counts);

/// Draw a CountVector of mu measurements at true phase phi with the given
/// pass count and state probabilities.
CountVector draw_counts(Rng& rng, double phi, std::uint64_t mu, std::uint64_t passes,
                        const std::array<double, 4>& state_probabilities = {0.25, 0.25,
                                                                            0.25, 0.25},
                        double phase_offset = 0.0);

struct GridConfig {
  int k_bins = 2048;   // at least 1000
  double theta0 = 0.0;
};

/// Discretized posterior over theta in [theta0, theta0 + 2*pi), stored as
/// log densities at theta_k = theta0 + 2*pi*k/K. Immutable after
/// construction; when normalized, sum(exp(log)) * (2*pi/K) = 1.
class LikelihoodGrid {
 public:
  static LikelihoodGrid uniform(const GridConfig& cfg);
  static LikelihoodGrid from_log_values(const GridConfig& cfg, std::vector<double> logv,
                                        bool normalize = true);

  int size() const { return k_bins_; }
  double theta0() const { return theta0_; }
  double bin_width() const { return two_pi / k_bins_; }
  double theta(int k) const { return theta0_ + two_pi * k / k_bins_; }
  bool normalized() const { return normalized_; }

  double log_value(int k) const { return logv_[k]; }
  /// Probability mass of bin k (normalized grids integrate to 1).
  double mass(int k) const;
  std::vector<double> masses_copy() const;
  const std::vector<double>& log_values() const { return logv_; }

 private:
  LikelihoodGrid(const GridConfig& cfg, std::vector<double> logv, bool normalized);

  int k_bins_;
  double theta0_;
  std::vector<double> logv_;
  bool normalized_;
};

/// Log-likelihood accumulated from counts:
///   (n1+n4) ln(1+sin x_k) + (n2+n3) ln(1-sin x_k)
/// + (n5+n8) ln(1+cos x_k) + (n6+n7) ln(1-cos x_k),  x_k = m*theta_k + offset,
/// normalized over the grid. Log-space accumulation; bins where a factor
/// underflows to zero carry -inf log mass. Throws on all-zero counts.
///
/// `phase_offset` folds sender/detector azimuth offsets into the model; the
/// canonical alphabet uses 0.
LikelihoodGrid likelihood_from_counts(const CountVector& counts, const GridConfig& cfg,
                                      double phase_offset = 0.0);

/// Add count * ln((1 + amplitude*cos(m*theta_k + phase))/2) to a raw
/// log-density vector. Building block for per-record posterior factors.
void add_cosine_log_factor(std::vector<double>& logv, const GridConfig& cfg,
                           double count, double amplitude, std::uint64_t passes,
                           double phase);

/// Pointwise product of normalized grids (sum of log values), renormalized.
/// All grids must share bin count and origin.
LikelihoodGrid combine(std::span<const LikelihoodGrid> grids);
LikelihoodGrid combine(const LikelihoodGrid& a, const LikelihoodGrid& b);

/// Directional summary of a normalized grid: mean resultant vector over the
/// bin masses, rho = sum_k w_k e^{i theta_k}, with
///   mean_direction = arg(rho), resultant_length = |rho|,
///   circ_std = sqrt(-2 ln |rho|).
/// A vanishing resultant (|rho| < 1e-12) leaves the direction undefined and
/// the spread infinite.
struct CircularSummary {
  double mean_direction = 0.0;      // in [0, 2*pi); meaningful iff direction_defined
  double resultant_length = 0.0;    // in [0, 1]
  double circ_std = 0.0;            // +inf when resultant vanishes
  bool direction_defined = false;
};

CircularSummary circular_summary(const LikelihoodGrid& grid);

/// Location of the global maximum; ties break toward the smallest bin index.
double map_estimate(const LikelihoodGrid& grid);

/// Circular mean of the wrapped differences (estimate - true_phi), reported
/// in (-pi, pi]. Throws when the resultant of the differences vanishes.
double estimator_bias(double true_phi, std::span<const double> estimates);

/// Indices of circular local maxima with mass at least rel_mass_threshold of
/// the top peak, plateaus collapsed, sorted by descending mass.
std::vector<int> local_maxima(const LikelihoodGrid& grid,
                              double rel_mass_threshold = 1e-9);

}  // namespace sqrs
