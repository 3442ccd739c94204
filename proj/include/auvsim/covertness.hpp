#pragma once

#include <cstdint>
#include <random>
#include <span>

// Eavesdropper detection model. Under silence the eavesdropper observes
// y ~ N(0, sigma0^2) with sigma0^2 = N_d; under transmission
// y ~ N(0, sigma1^2) with sigma1^2 = N_d + sum_m G_m P_m / A_{m,d}.
namespace auvsim::covertness {

struct HypothesisStats {
  double sigma0_sq = 1.0;
  double sigma1_sq = 1.0;
  double epsilon = 0.05;

  double snr() const { return sigma1_sq / sigma0_sq - 1.0; }
};

struct CovertnessMargin {
  double kl = 0.0;
  double limit = 0.0;
  bool satisfied = true;
};

struct DetectionError {
  double p_fa = 0.0;
  double p_md = 0.0;
  double total() const { return p_fa + p_md; }
};

/// Received variance under transmission. `losses` are linear path losses
/// A_{m,d} >= 1; G is binary so it enters linearly.
double eavesdropper_variance(std::span<const std::uint8_t> selected,
                             std::span<const double> powers_w, std::span<const double> losses,
                             double noise_power_w);

/// Energy-detector threshold equivalent to the LRT with threshold theta.
/// Throws std::domain_error when sigma1^2 <= sigma0^2 or theta <= 0.
double detector_threshold(double sigma0_sq, double sigma1_sq, double theta);

// ln L(y) for the zero-mean Gaussian pair.
double log_likelihood_ratio(double y, double sigma0_sq, double sigma1_sq);

/// D(H0 || H1) in nats as a function of the eavesdropper SNR.
double kl_gaussian(double snr);

double covert_limit(double epsilon);

CovertnessMargin covertness_margin(double snr, double epsilon);

// Largest SNR whose divergence stays within 2 eps^2 (bisection on the
// monotone divergence).
double max_covert_snr(double epsilon);

/// Empirical P_FA and P_MD of the detector |y|^2 > threshold with `samples`
/// draws per hypothesis.
DetectionError monte_carlo_detection_error(const HypothesisStats& stats, double threshold,
                                           std::size_t samples, std::mt19937_64& rng);

}  // namespace auvsim::covertness
