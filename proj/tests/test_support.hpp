#pragma once

#include "mfvdm/common.hpp"

#include <cmath>

namespace mfvdm::testing {

/// Bilinear rotation about the image centre, counter-clockwise by alpha in the
/// (x, y) frame: out(p) = in(Rot(-alpha) p). Samples outside read as zero.
inline Image rotate_image(const Image& in, double alpha) {
  const int n = static_cast<int>(in.rows());
  const double c = image_centre(n);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  auto sample = [&](int r, int col) { return (r < 0 || r >= n || col < 0 || col >= n) ? 0.0 : in(r, col); };
  Image out = Image::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      const double x = col - c, y = r - c;
      const double sx = ca * x + sa * y + c;
      const double sy = -sa * x + ca * y + c;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      out(r, col) = (1 - fx) * (1 - fy) * sample(y0, x0) + fx * (1 - fy) * sample(y0, x0 + 1) +
                    (1 - fx) * fy * sample(y0 + 1, x0) + fx * fy * sample(y0 + 1, x0 + 1);
    }
  }
  return out;
}

/// Keys cubic convolution weight (a = -0.5).
inline double cubic_weight(double t) {
  t = std::abs(t);
  if (t < 1) return (1.5 * t - 2.5) * t * t + 1;
  if (t < 2) return ((-0.5 * t + 2.5) * t - 4) * t + 2;
  return 0;
}

/// Same geometry as rotate_image with bicubic interpolation.
inline Image rotate_image_cubic(const Image& in, double alpha) {
  const int n = static_cast<int>(in.rows());
  const double c = image_centre(n);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  Image out = Image::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      const double x = col - c, y = r - c;
      const double sx = ca * x + sa * y + c;
      const double sy = -sa * x + ca * y + c;
      const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
      double acc = 0;
      for (int j = y0 - 1; j <= y0 + 2; ++j) {
        if (j < 0 || j >= n) continue;
        for (int i = x0 - 1; i <= x0 + 2; ++i)
          if (i >= 0 && i < n) acc += cubic_weight(sx - i) * cubic_weight(sy - j) * in(j, i);
      }
      out(r, col) = acc;
    }
  }
  return out;
}

/// Isotropic or elliptical Gaussian blob image.
inline Image gaussian_image(int n, double cx, double cy, double sx, double sy, double amp = 1.0) {
  const double c = image_centre(n);
  Image img(n, n);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) {
      const double x = col - c - cx, y = r - c - cy;
      img(r, col) = amp * std::exp(-0.5 * (x * x / (sx * sx) + y * y / (sy * sy)));
    }
  return img;
}

/// Smooth asymmetric test image: a few Gaussians well inside the disk.
inline Image smooth_test_image(int n) {
  return gaussian_image(n, 3.0, -2.0, 2.0, 1.5) + gaussian_image(n, -4.0, 1.0, 1.6, 2.4, 0.7) +
         gaussian_image(n, 0.5, 4.5, 1.4, 1.4, 0.5);
}

inline double relative_error(const Image& a, const Image& b) { return (a - b).norm() / b.norm(); }

}  // namespace mfvdm::testing
