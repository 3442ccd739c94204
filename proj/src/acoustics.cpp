#include "auvsim/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace auvsim::acoustics {
namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw std::invalid_argument(std::string("channel.") + field + ": " + what);
}

}  // namespace

void ChannelParams::validate() const {
  require(carrier_khz > 0.0, "carrier_f", "must be > 0");
  require(bandwidth_hz > 0.0, "bandwidth_B", "must be > 0");
  require(spreading >= 1.0 && spreading <= 2.0, "spreading_chi", "must lie in [1, 2]");
  require(shipping >= 0.0 && shipping <= 1.0, "shipping_s", "must lie in [0, 1]");
  require(wind_mps >= 0.0, "wind_w", "must be >= 0");
  if (noise_override_w) require(*noise_override_w > 0.0, "noise_override", "must be > 0");
}

double absorption_db_per_km(double f, ThorpVariant variant) {
  if (!(f > 0.0)) throw std::domain_error("absorption_db_per_km: frequency must be > 0 kHz");
  const double f2 = f * f;
  const double second_num = variant == ThorpVariant::kStandardF2 ? 44.0 * f2 : 44.0 * f2 * f;
  return 0.11 * f2 / (1.0 + f2) + second_num / (4100.0 + f2) + 2.75e-4 * f2 + 0.003;
}

LinkBudget path_loss(const ChannelParams& params, double distance_m) {
  if (!(distance_m > 0.0)) throw std::domain_error("path_loss: distance must be > 0 m");
  const double d = std::max(distance_m, kMinDistanceM);
  LinkBudget out;
  out.distance_m = d;
  out.loss_db = params.spreading * 10.0 * std::log10(d) +
                (d / 1000.0) * absorption_db_per_km(params.carrier_khz, params.thorp);
  out.gain_linear = std::pow(10.0, -out.loss_db / 10.0);
  out.noise_power_w = noise_power(params);
  return out;
}

AmbientNoise ambient_noise(const ChannelParams& params) {
  const double f = params.carrier_khz;
  if (!(f > 0.0)) throw std::domain_error("ambient_noise: frequency must be > 0 kHz");
  const double lf = std::log10(f);
  AmbientNoise n;
  n.turbulence_db = 17.0 - 30.0 * lf;
  n.shipping_db = 30.0 + 20.0 * params.shipping + 26.0 * lf - 60.0 * std::log10(f + 0.03);
  n.waves_db = 50.0 + 7.5 * std::sqrt(params.wind_mps) + 20.0 * lf - 40.0 * std::log10(f + 0.4);
  n.thermal_db = -15.0 + 20.0 * lf;
  const double psd = db_to_linear(n.turbulence_db) + db_to_linear(n.shipping_db) +
                     db_to_linear(n.waves_db) + db_to_linear(n.thermal_db);
  n.total_psd_db = 10.0 * std::log10(psd);
  n.band_power_w = params.noise_override_w ? *params.noise_override_w : psd * params.bandwidth_hz;
  return n;
}

double noise_power(const ChannelParams& params) {
  if (params.noise_override_w) return *params.noise_override_w;
  return ambient_noise(params).band_power_w;
}

double eavesdropper_snr(std::span<const std::uint8_t> selected, std::span<const double> powers_w,
                        std::span<const double> distances_m, const ChannelParams& params) {
  if (selected.size() != powers_w.size() || selected.size() != distances_m.size())
    throw std::invalid_argument("eavesdropper_snr: length mismatch");
  const double nd = noise_power(params);
  double snr = 0.0;
  for (std::size_t m = 0; m < selected.size(); ++m) {
    if (!selected[m]) continue;
    snr += powers_w[m] * path_loss(params, distances_m[m]).gain_linear / nd;
  }
  return snr;
}

double link_rate(std::span<const std::uint8_t> selected, std::span<const double> powers_w,
                 std::span<const double> gains, double noise_power_w, double bandwidth_hz) {
  if (!(noise_power_w > 0.0)) throw std::domain_error("link_rate: noise power must be > 0");
  if (selected.size() != powers_w.size() || selected.size() != gains.size())
    throw std::invalid_argument("link_rate: length mismatch");
  double received = 0.0;
  for (std::size_t m = 0; m < selected.size(); ++m)
    if (selected[m]) received += powers_w[m] * gains[m];
  return bandwidth_hz * std::log2(1.0 + received / noise_power_w);
}

double point_to_point_rate(const ChannelParams& params, double power_w, double distance_m) {
  const std::uint8_t one = 1;
  const double g = path_loss(params, std::max(distance_m, kMinDistanceM)).gain_linear;
  return link_rate({&one, 1}, {&power_w, 1}, {&g, 1}, noise_power(params), params.bandwidth_hz);
}

}  // namespace auvsim::acoustics
