#pragma once

#include <array>

namespace fontsynth {

struct Point2 {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Row-major 3x3 homogeneous transform acting on column vectors (x, y, 1).
class Homography {
 public:
  constexpr Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}
  constexpr explicit Homography(const std::array<double, 9>& m) : m_(m) {}

  double operator()(int r, int c) const { return m_[r * 3 + c]; }
  const std::array<double, 9>& values() const { return m_; }

  Point2 apply(Point2 p) const;
  double determinant() const;
  /// Throws InvalidArgument when singular.
  Homography inverse() const;

  friend Homography operator*(const Homography& a, const Homography& b);

 private:
  std::array<double, 9> m_;
};

/// Projective map taking the unit square corners (0,0), (1,0), (1,1), (0,1)
/// to `corners` in that order.
Homography unit_square_to_quad(const std::array<Point2, 4>& corners);

}  // namespace fontsynth
