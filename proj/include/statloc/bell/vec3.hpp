#pragma once

#include <cmath>
#include <numbers>

namespace statloc::bell {

/// Direction on the Bloch sphere (spin space is R^3 regardless of spacetime dimension).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline Vec3 operator*(double k, const Vec3& v) { return {k * v.x, k * v.y, k * v.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline constexpr Vec3 kZAxis{0.0, 0.0, 1.0};

inline double degrees_to_radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

/// Unit vector at `radians` from +z towards +x.
inline Vec3 setting_in_xz_plane(double radians) { return {std::sin(radians), 0.0, std::cos(radians)}; }

inline Vec3 setting_from_degrees(double degrees) { return setting_in_xz_plane(degrees_to_radians(degrees)); }

}  // namespace statloc::bell
