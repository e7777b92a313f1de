#pragma once

// Shared deterministic fixtures for the unit and acceptance tests. Everything
// here is seeded through asymdiff::Rng so expected values frozen in the tests
// stay stable across platforms.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "asymdiff/basis.hpp"
#include "asymdiff/common.hpp"
#include "asymdiff/dataset.hpp"
#include "asymdiff/kernel.hpp"

namespace fixtures {

// Dense random kernel with entries in [lo, hi); asymmetric by construction.
inline asymdiff::KernelMatrix random_kernel(int n, std::uint64_t seed,
                                            double lo = 0.0, double hi = 1.0) {
  asymdiff::Rng rng(seed);
  asymdiff::KernelMatrix k;
  k.entries.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k.entries(i, j) = rng.uniform(lo, hi);
  k.provenance = "random";
  return k;
}

inline asymdiff::KernelMatrix random_symmetric_kernel(int n,
                                                      std::uint64_t seed) {
  asymdiff::KernelMatrix k = random_kernel(n, seed);
  k.entries = ((k.entries + k.entries.transpose()) / 2.0).eval();
  k.provenance = "random_symmetric";
  return k;
}

// O(n^4) quadruple-sum definition of the tensor-product coefficients,
// independent of the library's transform code paths. U(x, m) = W_m(x).
inline Eigen::MatrixXcd naive_coefficients(const Eigen::MatrixXd& kernel,
                                           const Eigen::MatrixXcd& u) {
  int n = static_cast<int>(kernel.rows());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int m1 = 0; m1 < n; ++m1)
    for (int m2 = 0; m2 < n; ++m2) {
      std::complex<double> acc = 0.0;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          acc += kernel(x, y) * std::conj(u(x, m1)) * std::conj(u(y, m2));
      a(m1, m2) = acc;
    }
  return a;
}

// Direct evaluation of the Fourier vectors, written independently of
// Basis::row (std::polar vs explicit cos/sin does not matter; the point is
// not to call the library).
inline Eigen::MatrixXcd direct_fourier_matrix(int n) {
  Eigen::MatrixXcd u(n, n);
  const double two_pi = 6.283185307179586476925286766559;
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int x = 0; x < n; ++x)
    for (int m = 0; m < n; ++m) {
      double ang = two_pi * m * x / n;
      u(x, m) = {scale * std::cos(ang), scale * std::sin(ang)};
    }
  return u;
}

// Small synthetic grayscale pattern in [0, 1] for image-kernel tests.
inline asymdiff::ScalarGrid synth_image(int side, std::uint64_t seed) {
  asymdiff::ScalarGrid g;
  g.width = side;
  g.height = side;
  g.values.resize(side, side);
  g.mask.setConstant(side, side, true);
  asymdiff::Rng rng(seed);
  double fx = 1.0 + rng.uniform(), fy = 2.0 + rng.uniform();
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      g.values(r, c) =
          0.5 + 0.25 * std::sin(fx * r * 0.37) + 0.25 * std::cos(fy * c * 0.23);
  return g;
}

}  // namespace fixtures
