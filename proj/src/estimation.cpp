#include "sqrs/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqrs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_grid_config(const GridConfig& cfg) {
  if (cfg.k_bins < 1000) {
    throw std::invalid_argument("grid needs at least 1000 bins");
  }
}

/// Quarter-wave sine table over 2*pi*k/K, built so that the identities
/// sin[k + K/2] == -sin[k] and sin[K/4 + k] == sin[K/4 - k] hold bit-exactly.
/// Requires K divisible by 4.
std::vector<double> quarter_wave_sin_table(int k) {
  std::vector<double> tab(static_cast<std::size_t>(k));
  int q = k / 4;
  for (int i = 0; i <= q; ++i) tab[i] = std::sin(two_pi * i / k);
  for (int i = 1; i < q; ++i) tab[q + i] = tab[q - i];
  for (int i = 0; i < 2 * q; ++i) tab[2 * q + i] = -tab[i];
  return tab;
}

double log1_plus(double x) {
  // ln(1 + x) for x in [-1, 1]; exactly -inf at x = -1.
  return (x <= -1.0) ? kNegInf : std::log1p(x);
}

std::vector<double> normalize_log_values(std::vector<double> logv, int k_bins) {
  double top = kNegInf;
  for (double v : logv) top = std::max(top, v);
  if (!std::isfinite(top)) {
    throw std::runtime_error("likelihood vanishes on the whole grid");
  }
  double acc = 0.0;
  for (double v : logv) {
    if (v != kNegInf) acc += std::exp(v - top);
  }
  double log_norm = top + std::log(acc) + std::log(two_pi / k_bins);
  for (double& v : logv) {
    if (v != kNegInf) v -= log_norm;
  }
  return logv;
}

}  // namespace

std::uint64_t CountVector::total() const {
  std::uint64_t t = 0;
  for (auto v : n) t += v;
  return t;
}

std::size_t count_index(Tag tag, int outcome) {
  return 2 * static_cast<std::size_t>(tag) + (outcome < 0 ? 1 : 0);
}

double row_probability(Tag tag, int outcome, double x) {
  double trig = (tag == Tag::XPlus || tag == Tag::XMinus) ? std::sin(x) : std::cos(x);
  double sign = tag_sign(tag) * (outcome >= 0 ? 1.0 : -1.0);
  return 0.5 * (1.0 + sign * trig);
}

CountVector flip_outcomes(const CountVector& counts) {
  CountVector out = counts;
  for (int pair = 0; pair < 4; ++pair) {
    std::swap(out.n[2 * pair], out.n[2 * pair + 1]);
  }
  return out;
}

CountVector draw_counts(Rng& rng, double phi, std::uint64_t mu, std::uint64_t passes,
                        const std::array<double, 4>& state_probabilities,
                        double phase_offset) {
  CountVector counts;
  counts.passes = passes;
  double x = static_cast<double>(passes) * phi + phase_offset;
  std::array<double, 4> p_plus{};
  for (int t = 0; t < 4; ++t) {
    p_plus[t] = row_probability(static_cast<Tag>(t), +1, x);
  }
  for (std::uint64_t i = 0; i < mu; ++i) {
    int t = rng.categorical4(state_probabilities);
    int outcome = rng.bernoulli(p_plus[t]) ? +1 : -1;
    ++counts.n[count_index(static_cast<Tag>(t), outcome)];
  }
  return counts;
}

LikelihoodGrid::LikelihoodGrid(const GridConfig& cfg, std::vector<double> logv,
                               bool normalized)
    : k_bins_(cfg.k_bins), theta0_(cfg.theta0), logv_(std::move(logv)),
      normalized_(normalized) {}

LikelihoodGrid LikelihoodGrid::uniform(const GridConfig& cfg) {
  check_grid_config(cfg);
  std::vector<double> logv(static_cast<std::size_t>(cfg.k_bins), -std::log(two_pi));
  return LikelihoodGrid(cfg, std::move(logv), true);
}

LikelihoodGrid LikelihoodGrid::from_log_values(const GridConfig& cfg,
                                               std::vector<double> logv, bool normalize) {
  check_grid_config(cfg);
  if (logv.size() != static_cast<std::size_t>(cfg.k_bins)) {
    throw std::invalid_argument("log value vector does not match bin count");
  }
  if (normalize) {
    return LikelihoodGrid(cfg, normalize_log_values(std::move(logv), cfg.k_bins), true);
  }
  return LikelihoodGrid(cfg, std::move(logv), false);
}

double LikelihoodGrid::mass(int k) const {
  double v = logv_[k];
  return (v == kNegInf) ? 0.0 : std::exp(v) * bin_width();
}

std::vector<double> LikelihoodGrid::masses_copy() const {
  std::vector<double> out(static_cast<std::size_t>(k_bins_));
  for (int k = 0; k < k_bins_; ++k) out[k] = mass(k);
  return out;
}

LikelihoodGrid likelihood_from_counts(const CountVector& counts, const GridConfig& cfg,
                                      double phase_offset) {
  check_grid_config(cfg);
  if (counts.total() == 0) throw std::invalid_argument("all counts are zero");

  const double a_sin = static_cast<double>(counts.n[0] + counts.n[3]);  // (1+sin)
  const double b_sin = static_cast<double>(counts.n[1] + counts.n[2]);  // (1-sin)
  const double c_cos = static_cast<double>(counts.n[4] + counts.n[7]);  // (1+cos)
  const double d_cos = static_cast<double>(counts.n[5] + counts.n[6]);  // (1-cos)

  const int k = cfg.k_bins;
  const std::uint64_t m = counts.passes;
  std::vector<double> logv(static_cast<std::size_t>(k), 0.0);

  if (phase_offset == 0.0 && cfg.theta0 == 0.0 && k % 4 == 0) {
    // Table path: trig values land on the quarter-wave table, so the swap
    // symmetry (flipped counts == half-turn rotation) holds bin-exactly.
    std::vector<double> tab = quarter_wave_sin_table(k);
    const std::uint64_t quarter = static_cast<std::uint64_t>(k) / 4;
    for (int i = 0; i < k; ++i) {
      std::uint64_t idx = (m * static_cast<std::uint64_t>(i)) % k;
      double s = tab[idx];
      double c = tab[(idx + quarter) % k];
      double v = 0.0;
      if (a_sin > 0) v += a_sin * log1_plus(s);
      if (b_sin > 0) v += b_sin * log1_plus(-s);
      if (c_cos > 0) v += c_cos * log1_plus(c);
      if (d_cos > 0) v += d_cos * log1_plus(-c);
      logv[i] = v;
    }
  } else {
    for (int i = 0; i < k; ++i) {
      double x = m * (cfg.theta0 + two_pi * i / k) + phase_offset;
      double s = std::sin(x), c = std::cos(x);
      double v = 0.0;
      if (a_sin > 0) v += a_sin * log1_plus(s);
      if (b_sin > 0) v += b_sin * log1_plus(-s);
      if (c_cos > 0) v += c_cos * log1_plus(c);
      if (d_cos > 0) v += d_cos * log1_plus(-c);
      logv[i] = v;
    }
  }
  return LikelihoodGrid::from_log_values(cfg, std::move(logv), true);
}

void add_cosine_log_factor(std::vector<double>& logv, const GridConfig& cfg,
                           double count, double amplitude, std::uint64_t passes,
                           double phase) {
  if (logv.size() != static_cast<std::size_t>(cfg.k_bins)) {
    throw std::invalid_argument("log value vector does not match bin count");
  }
  if (count == 0.0) return;
  const int k = cfg.k_bins;
  const double log_half = std::log(0.5);
  for (int i = 0; i < k; ++i) {
    double x = passes * (cfg.theta0 + two_pi * i / k) + phase;
    logv[i] += count * (log1_plus(amplitude * std::cos(x)) + log_half);
  }
}

LikelihoodGrid combine(std::span<const LikelihoodGrid> grids) {
  if (grids.empty()) throw std::invalid_argument("nothing to combine");
  const auto& first = grids.front();
  std::vector<double> logv(first.log_values());
  for (std::size_t g = 1; g < grids.size(); ++g) {
    if (grids[g].size() != first.size() || grids[g].theta0() != first.theta0()) {
      throw std::invalid_argument("grid geometry mismatch in combine");
    }
    const auto& other = grids[g].log_values();
    for (int i = 0; i < first.size(); ++i) {
      // -inf plus anything stays -inf; avoid NaN from (-inf) + inf (cannot occur).
      logv[i] = (logv[i] == kNegInf || other[i] == kNegInf) ? kNegInf
                                                            : logv[i] + other[i];
    }
  }
  GridConfig cfg{first.size(), first.theta0()};
  return LikelihoodGrid::from_log_values(cfg, std::move(logv), true);
}

LikelihoodGrid combine(const LikelihoodGrid& a, const LikelihoodGrid& b) {
  std::array<LikelihoodGrid, 2> grids{a, b};
  return combine(std::span<const LikelihoodGrid>(grids));
}

CircularSummary circular_summary(const LikelihoodGrid& grid) {
  if (!grid.normalized()) throw std::invalid_argument("grid must be normalized");
  double re = 0.0, im = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    double w = grid.mass(k);
    if (w == 0.0) continue;
    double th = grid.theta(k);
    re += w * std::cos(th);
    im += w * std::sin(th);
  }
  CircularSummary out;
  double r = std::sqrt(re * re + im * im);
  out.resultant_length = std::min(r, 1.0);
  if (r < 1e-12) {
    out.circ_std = std::numeric_limits<double>::infinity();
    out.direction_defined = false;
  } else {
    out.mean_direction = wrap_angle(std::atan2(im, re));
    out.circ_std = std::sqrt(-2.0 * std::log(out.resultant_length));
    out.direction_defined = true;
  }
  return out;
}

double map_estimate(const LikelihoodGrid& grid) {
  int best = 0;
  for (int k = 1; k < grid.size(); ++k) {
    if (grid.log_value(k) > grid.log_value(best)) best = k;
  }
  return grid.theta(best);
}

double estimator_bias(double true_phi, std::span<const double> estimates) {
  if (estimates.empty()) throw std::invalid_argument("no estimates");
  double re = 0.0, im = 0.0;
  for (double est : estimates) {
    double d = est - true_phi;
    re += std::cos(d);
    im += std::sin(d);
  }
  re /= static_cast<double>(estimates.size());
  im /= static_cast<double>(estimates.size());
  if (std::sqrt(re * re + im * im) < 1e-12) {
    throw std::domain_error("mean bias direction undefined: vanishing resultant");
  }
  double bias = std::atan2(im, re);
  return (bias <= -pi) ? pi : bias;  // report in (-pi, pi]
}

std::vector<int> local_maxima(const LikelihoodGrid& grid, double rel_mass_threshold) {
  const int k = grid.size();
  std::vector<char> cand(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i) {
    double v = grid.log_value(i);
    if (v == kNegInf) continue;
    double prev = grid.log_value((i + k - 1) % k);
    double next = grid.log_value((i + 1) % k);
    cand[i] = (v >= prev && v >= next) ? 1 : 0;
  }
  // Collapse circular runs of equal-valued candidate bins to one head each.
  std::vector<char> used(static_cast<std::size_t>(k), 0);
  std::vector<int> peaks;
  for (int i = 0; i < k; ++i) {
    if (!cand[i] || used[i]) continue;
    double v = grid.log_value(i);
    int head = i;
    used[i] = 1;
    for (int step = 1; step < k; ++step) {
      int prev = (head + k - 1) % k;
      if (!cand[prev] || used[prev] || grid.log_value(prev) != v) break;
      used[prev] = 1;
      head = prev;
    }
    int tail = i;
    for (int step = 1; step < k; ++step) {
      int next = (tail + 1) % k;
      if (!cand[next] || used[next] || grid.log_value(next) != v) break;
      used[next] = 1;
      tail = next;
    }
    peaks.push_back(head);
  }
  if (peaks.empty()) return peaks;
  std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    return grid.log_value(a) > grid.log_value(b);
  });
  double top = grid.mass(peaks.front());
  std::vector<int> out;
  for (int p : peaks) {
    if (grid.mass(p) >= rel_mass_threshold * top) out.push_back(p);
  }
  return out;
}

}  // namespace sqrs
