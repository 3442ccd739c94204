#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace auvsim::acoustics {

// Second Thorp term: the classical 44 f^2 numerator or the f^3 numerator
// exactly as printed in the source model.
enum class ThorpVariant { kStandardF2, kPaperLiteralF3 };

struct ChannelParams {
  double carrier_khz = 30.0;
  double bandwidth_hz = 10e6;
  double spreading = 1.5;  // chi, in [1, 2]
  double shipping = 0.5;   // s, in [0, 1]
  double wind_mps = 0.0;   // w >= 0
  // Constant receiver noise power in W. When empty the band power is
  // integrated from the four-component ambient noise PSD.
  std::optional<double> noise_override_w = 0.2;
  ThorpVariant thorp = ThorpVariant::kStandardF2;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct LinkBudget {
  double distance_m = 0.0;
  double loss_db = 0.0;
  double gain_linear = 0.0;
  double noise_power_w = 0.0;
};

struct AmbientNoise {
  double turbulence_db = 0.0;
  double shipping_db = 0.0;
  double waves_db = 0.0;
  double thermal_db = 0.0;
  double total_psd_db = 0.0;
  double band_power_w = 0.0;
};

// Distances below this are clamped before computing spreading loss.
inline constexpr double kMinDistanceM = 1.0;

/// Thorp absorption in dB/km for a carrier in kHz. Throws std::domain_error
/// for f <= 0.
double absorption_db_per_km(double f_khz, ThorpVariant variant = ThorpVariant::kStandardF2);

/// Spreading plus absorption loss, evaluated in dB. Throws std::domain_error
/// for d <= 0; distances in (0, 1) m are clamped to 1 m.
LinkBudget path_loss(const ChannelParams& params, double distance_m);

AmbientNoise ambient_noise(const ChannelParams& params);

// Receiver noise power in W (the override when set, else PSD x bandwidth).
double noise_power(const ChannelParams& params);

/// Aggregate SNR at the eavesdropper from all selected transmitters.
double eavesdropper_snr(std::span<const std::uint8_t> selected, std::span<const double> powers_w,
                        std::span<const double> distances_m, const ChannelParams& params);

/// Shannon rate at one receiver with the selected transmitters summed
/// interference-free. `gains` are linear channel gains to that receiver.
double link_rate(std::span<const std::uint8_t> selected, std::span<const double> powers_w,
                 std::span<const double> gains, double noise_power_w, double bandwidth_hz);

// Single transmitter convenience: rate for power P over distance d.
double point_to_point_rate(const ChannelParams& params, double power_w, double distance_m);

}  // namespace auvsim::acoustics
