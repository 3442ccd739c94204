#include "auvsim/tasking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace auvsim::tasking {

double detection_radius(double compute, double base_radius, double mu, double compute_ref) {
  if (compute < 0.0 || !(compute_ref > 0.0))
    throw std::domain_error("detection_radius: requires C_m >= 0 and C_ref > 0");
  return base_radius + mu * std::log1p(compute / compute_ref);
}

double coverage_ratio(std::span<const std::uint8_t> selected, std::span<const double> radii,
                      double length, double width) {
  if (!(length > 0.0 && width > 0.0)) throw std::domain_error("coverage_ratio: l, w must be > 0");
  if (selected.size() != radii.size()) throw std::invalid_argument("coverage_ratio: length mismatch");
  double covered = 0.0;
  for (std::size_t m = 0; m < radii.size(); ++m)
    if (selected[m]) covered += std::numbers::pi * radii[m] * radii[m];
  return std::min(1.0, covered / (length * width));
}

namespace {

// Smallest clearance dist - (r_i + r_j) against the already placed discs.
double clearance(const Vec2& c, double r, const Placement& p, std::size_t placed) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < placed; ++k) {
    const std::size_t j = p.order[k];
    worst = std::min(worst, (c - p.centers[j]).norm() - (r + p.radii[j]));
  }
  return worst;
}

}  // namespace

Placement assign_subtargets(std::span<const double> radii, double length, double width,
                            std::mt19937_64& rng, int max_attempts) {
  if (!(length > 0.0 && width > 0.0)) throw std::domain_error("assign_subtargets: l, w must be > 0");
  Placement p;
  p.radii.assign(radii.begin(), radii.end());
  p.centers.assign(radii.size(), Vec2{0.5 * length, 0.5 * width});
  p.order.resize(radii.size());
  std::iota(p.order.begin(), p.order.end(), std::size_t{0});
  std::stable_sort(p.order.begin(), p.order.end(),
                   [&](std::size_t a, std::size_t b) { return radii[a] > radii[b]; });

  std::normal_distribution<double> nx(0.5 * length, length / 6.0);
  std::normal_distribution<double> ny(0.5 * width, width / 6.0);
  const double half_min = 0.5 * std::min(length, width);

  for (std::size_t k = 0; k < p.order.size(); ++k) {
    const std::size_t i = p.order[k];
    const double r = radii[i];
    if (r > half_min) {
      p.centers[i] = {0.5 * length, 0.5 * width};
      p.best_effort = true;
      continue;
    }
    Vec2 best{0.5 * length, 0.5 * width};
    double best_clearance = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int attempt = 0; attempt < std::max(max_attempts, 1); ++attempt) {
      const Vec2 c{std::clamp(nx(rng), r, length - r), std::clamp(ny(rng), r, width - r)};
      const double gap = clearance(c, r, p, k);
      if (gap >= 0.0) {
        best = c;
        accepted = true;
        break;
      }
      if (gap > best_clearance) {
        best_clearance = gap;
        best = c;
      }
    }
    p.centers[i] = best;
    if (!accepted) p.best_effort = true;
  }
  return p;
}

PhaseDelays phase_delays(const PhaseInputs& in) {
  if (!(in.distribution_rate_bps > 0.0) || !(in.upload_rate_bps > 0.0))
    throw std::domain_error("phase_delays: link rates must be > 0");
  if (in.micro_budget < 1) throw std::domain_error("phase_delays: micro budget must be >= 1");
  auto propagation = [&](double d) {
    if (in.paper_literal_delays) return kSoundSpeed / std::max(d, 1.0);
    return d / kSoundSpeed;
  };

  PhaseDelays out;
  out.distribution = in.instruction_bits / in.distribution_rate_bps +
                     propagation(in.distribution_distance_m);
  out.arrived = in.arrival_slot.has_value() && *in.arrival_slot >= 1 &&
                *in.arrival_slot <= in.micro_budget;
  const int slots = out.arrived ? *in.arrival_slot : in.micro_budget;
  out.movement = slots * in.slot_dt;
  const double chord = 2.0 * in.detection_radius * std::sin(0.5 * in.sonar_beam);
  out.execution = chord > 0.0 ? 2.0 * std::numbers::pi / chord : 0.0;
  out.upload_bits = in.sample_bits_per_m2 * std::numbers::pi * in.detection_radius *
                    in.detection_radius;
  out.upload = out.upload_bits / in.upload_rate_bps + propagation(in.upload_distance_m);
  return out;
}

TaskOutcome task_time_and_efficiency(std::span<const PhaseDelays> team, double coverage) {
  if (team.empty()) throw std::invalid_argument("task_time_and_efficiency: no AUV selected");
  TaskOutcome out;
  for (const auto& d : team) out.task_time = std::max(out.task_time, d.total());
  out.efficiency = out.task_time > 0.0 ? coverage / out.task_time : 0.0;
  return out;
}

}  // namespace auvsim::tasking
