#include "fontsynth/geometry.hpp"

#include <cmath>

#include "fontsynth/error.hpp"

namespace fontsynth {

Point2 Homography::apply(Point2 p) const {
  const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
  return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w,
          (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
}

double Homography::determinant() const {
  const auto& m = m_;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
  const double det = determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-15) {
    throw Error(ErrorCode::InvalidArgument, "transform is not invertible");
  }
  const auto& m = m_;
  const double inv = 1.0 / det;
  return Homography({(m[4] * m[8] - m[5] * m[7]) * inv,
                     (m[2] * m[7] - m[1] * m[8]) * inv,
                     (m[1] * m[5] - m[2] * m[4]) * inv,
                     (m[5] * m[6] - m[3] * m[8]) * inv,
                     (m[0] * m[8] - m[2] * m[6]) * inv,
                     (m[2] * m[3] - m[0] * m[5]) * inv,
                     (m[3] * m[7] - m[4] * m[6]) * inv,
                     (m[1] * m[6] - m[0] * m[7]) * inv,
                     (m[0] * m[4] - m[1] * m[3]) * inv});
}

Homography operator*(const Homography& a, const Homography& b) {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0;
      for (int k = 0; k < 3; ++k) acc += a(r, k) * b(k, c);
      out[r * 3 + c] = acc;
    }
  }
  return Homography(out);
}

Homography unit_square_to_quad(const std::array<Point2, 4>& q) {
  const double dx1 = q[1].x - q[2].x, dx2 = q[3].x - q[2].x;
  const double dx3 = q[0].x - q[1].x + q[2].x - q[3].x;
  const double dy1 = q[1].y - q[2].y, dy2 = q[3].y - q[2].y;
  const double dy3 = q[0].y - q[1].y + q[2].y - q[3].y;
  const double den = dx1 * dy2 - dx2 * dy1;
  if (std::abs(den) < 1e-12) {
    throw Error(ErrorCode::DegenerateQuad, "collinear quad corners");
  }
  const double g = (dx3 * dy2 - dx2 * dy3) / den;
  const double h = (dx1 * dy3 - dx3 * dy1) / den;
  return Homography({q[1].x - q[0].x + g * q[1].x, q[3].x - q[0].x + h * q[3].x,
                     q[0].x, q[1].y - q[0].y + g * q[1].y,
                     q[3].y - q[0].y + h * q[3].y, q[0].y, g, h, 1.0});
}

}  // namespace fontsynth
