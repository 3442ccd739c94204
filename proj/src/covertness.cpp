#include "auvsim/covertness.hpp"

#include <cmath>
#include <stdexcept>

namespace auvsim::covertness {

double eavesdropper_variance(std::span<const std::uint8_t> selected,
                             std::span<const double> powers_w, std::span<const double> losses,
                             double noise_power_w) {
  if (!(noise_power_w > 0.0)) throw std::domain_error("eavesdropper_variance: N_d must be > 0");
  if (selected.size() != powers_w.size() || selected.size() != losses.size())
    throw std::invalid_argument("eavesdropper_variance: length mismatch");
  double var = noise_power_w;
  for (std::size_t m = 0; m < selected.size(); ++m)
    if (selected[m]) var += powers_w[m] / losses[m];
  return var;
}

double detector_threshold(double sigma0_sq, double sigma1_sq, double theta) {
  if (!(sigma0_sq > 0.0) || !(sigma1_sq > sigma0_sq))
    throw std::domain_error("detector_threshold: requires sigma1^2 > sigma0^2 > 0");
  if (!(theta > 0.0)) throw std::domain_error("detector_threshold: LRT threshold must be > 0");
  const double slope = (sigma1_sq - sigma0_sq) / (sigma0_sq * sigma1_sq);
  return (2.0 * std::log(theta) - std::log(sigma0_sq / sigma1_sq)) / slope;
}

double log_likelihood_ratio(double y, double sigma0_sq, double sigma1_sq) {
  return 0.5 * std::log(sigma0_sq / sigma1_sq) +
         y * y * (0.5 / sigma0_sq - 0.5 / sigma1_sq);
}

double kl_gaussian(double snr) {
  if (!(snr >= 0.0)) throw std::domain_error("kl_gaussian: SNR must be >= 0");
  // log1p keeps the small-SNR regime (D ~ snr^2 / 4) accurate.
  return 0.5 * (std::log1p(snr) - snr / (1.0 + snr));
}

double covert_limit(double epsilon) { return 2.0 * epsilon * epsilon; }

CovertnessMargin covertness_margin(double snr, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::domain_error("covertness_margin: epsilon must lie in (0, 1]");
  CovertnessMargin m;
  m.kl = kl_gaussian(snr);
  m.limit = covert_limit(epsilon);
  m.satisfied = m.kl <= m.limit;
  return m;
}

double max_covert_snr(double epsilon) {
  const double limit = covert_limit(epsilon);
  double lo = 0.0;
  double hi = 1.0;
  while (kl_gaussian(hi) < limit) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kl_gaussian(mid) <= limit ? lo : hi) = mid;
  }
  return lo;
}

DetectionError monte_carlo_detection_error(const HypothesisStats& stats, double threshold,
                                           std::size_t samples, std::mt19937_64& rng) {
  if (samples == 0) throw std::invalid_argument("monte_carlo_detection_error: samples must be >= 1");
  std::normal_distribution<double> h0(0.0, std::sqrt(stats.sigma0_sq));
  std::normal_distribution<double> h1(0.0, std::sqrt(stats.sigma1_sq));
  std::size_t false_alarms = 0;
  std::size_t misses = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y0 = h0(rng);
    if (y0 * y0 > threshold) ++false_alarms;
    const double y1 = h1(rng);
    if (y1 * y1 <= threshold) ++misses;
  }
  const double n = static_cast<double>(samples);
  return {static_cast<double>(false_alarms) / n, static_cast<double>(misses) / n};
}

}  // namespace auvsim::covertness
