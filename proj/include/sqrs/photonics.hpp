#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sqrs/rng.hpp"

namespace sqrs {

/// Weak coherent pulse source with mean photon number kbar per pulse.
struct CoherentSource {
  double kbar;
};

/// Photon-number record for one pulse. A pulse is delivered iff it carries
/// at least one photon; vacuum pulses are excluded from the measurement
/// budget because the receiver never reports a result for them.
struct PulseRecord {
  std::uint64_t qubit_id = 0;
  std::uint64_t photon_count = 0;

  bool delivered() const { return photon_count >= 1; }
};

/// Poisson pmf e^{-kbar} kbar^k / k!.
double poisson_pmf(double kbar, std::uint64_t k);

/// Poisson draw by sequential inversion; deterministic under seed.
std::uint64_t sample_photon_count(Rng& rng, const CoherentSource& source);

/// Per-capture information split of a pulse train: the interceptor holds one
/// copy of every two-photon pulse and full state knowledge for three or more.
struct ExposureReport {
  std::uint64_t pulses = 0;
  std::uint64_t delivered = 0;        // k >= 1
  std::uint64_t two_photon = 0;       // k == 2 (single split copy)
  std::uint64_t multi_photon = 0;     // k >= 3 (full state knowledge assumed)
  double bound_bb84 = 0.0;            // analytic relative-information bounds at kbar
  double bound_sqrs = 0.0;
};

/// Tally a pulse train against the analytic splitting bounds for the source.
/// The bounds remain computable for an empty train.
ExposureReport exposure_report(std::span<const PulseRecord> pulses,
                               const CoherentSource& source, double f_e = 0.25);

}  // namespace sqrs
