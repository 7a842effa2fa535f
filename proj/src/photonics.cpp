#include "sqrs/photonics.hpp"

#include <cmath>
#include <stdexcept>

#include "sqrs/information.hpp"

namespace sqrs {

double poisson_pmf(double kbar, std::uint64_t k) {
  if (!(kbar > 0.0)) throw std::invalid_argument("kbar must be positive");
  double logp = -kbar + static_cast<double>(k) * std::log(kbar) -
                std::lgamma(static_cast<double>(k) + 1.0);
  return std::exp(logp);
}

std::uint64_t sample_photon_count(Rng& rng, const CoherentSource& source) {
  if (!(source.kbar > 0.0)) throw std::invalid_argument("kbar must be positive");
  double u = rng.uniform();
  double p = std::exp(-source.kbar);
  double cum = p;
  std::uint64_t k = 0;
  while (u >= cum && k < 1024) {
    ++k;
    p *= source.kbar / static_cast<double>(k);
    cum += p;
  }
  return k;
}

ExposureReport exposure_report(std::span<const PulseRecord> pulses,
                               const CoherentSource& source, double f_e) {
  ExposureReport report;
  report.pulses = pulses.size();
  for (const auto& pulse : pulses) {
    if (pulse.photon_count >= 1) ++report.delivered;
    if (pulse.photon_count == 2) ++report.two_photon;
    if (pulse.photon_count >= 3) ++report.multi_photon;
  }
  report.bound_bb84 = splitting_ratio_bb84(source.kbar);
  report.bound_sqrs = splitting_ratio_sqrs(source.kbar, f_e);
  return report;
}

}  // namespace sqrs
