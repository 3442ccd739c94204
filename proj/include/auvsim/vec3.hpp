#pragma once

#include <algorithm>
#include <cmath>

namespace auvsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::sqrt(squared_norm()); }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  constexpr Vec2 xy() const { return {x, y}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Axis-aligned box; z is up-positive, so the water column has z <= 0.
struct Box {
  Vec3 lo{-100.0, -100.0, -100.0};
  Vec3 hi{100.0, 100.0, 0.0};

  Vec3 clamp(const Vec3& p) const {
    return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y), std::clamp(p.z, lo.z, hi.z)};
  }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
  }
  Vec3 extent() const { return hi - lo; }
};

}  // namespace auvsim
