#pragma once

#include <Eigen/Dense>
#include <string>

#include "asymdiff/dataset.hpp"

namespace asymdiff {

enum class Normalization { raw, markov };

// Dense kernel matrix over n data points: entries(x, y) = k(x, y), finite and
// non-negative. `normalization` records whether the Markov rescaling has been
// applied; `provenance` is a free-form tag describing how it was built.
struct KernelMatrix {
  Eigen::MatrixXd entries;
  Normalization normalization = Normalization::raw;
  std::string provenance;

  int n() const { return static_cast<int>(entries.rows()); }
};

// Throws DataError when entries are non-square, non-finite or negative.
void validate(const KernelMatrix& k);

// Gaussian kernel exp(-|x - y|^2 / two_sigma_sq). two_sigma_sq must be > 0;
// non-finite coordinates are data errors. Symmetric with unit diagonal.
KernelMatrix gaussian_kernel(const PointCloud& cloud, double two_sigma_sq);

// Sign-weighted Gaussian (S(x - y) + 1) * exp(-|x - y|^2) for 3-D clouds,
// where S(z) = sign(atan2(z2, z1)) over the first two components of z and
// sign(0) = 0 (so the diagonal weight is exactly 1). Asymmetric in general:
// whenever the azimuth of x - y is nonzero, one direction's weight vanishes.
KernelMatrix sign_weighted_gaussian(const PointCloud& cloud);

// Treats a square, fully-masked grayscale image directly as a kernel:
// entries(x, y) = pixel(row x, col y). Non-square or partially masked input
// is a data error.
KernelMatrix image_kernel(const ScalarGrid& image);

// Temperature-field kernel over the N masked-on cells taken in row-major
// order: entries(p, q) = (1/sqrt(N)) * T(cell_q) * exp(-|coord_p - coord_q|^2
// / two_sigma_sq), with integer (row, col) cell coordinates. Asymmetric and
// deliberately left un-normalized.
KernelMatrix temperature_kernel(const ScalarGrid& field,
                                double two_sigma_sq = 650.0);

// Markov normalization k(x,y) / (sqrt(v(x)) * sqrt(v(y))) with v = row sums.
// Every row volume of the input must be strictly positive; otherwise a
// DataError names the offending row. Symmetry is preserved.
KernelMatrix markov_normalize(const KernelMatrix& k);

// Binary serialization (size, normalization, provenance, row-major float64,
// little-endian; format is checked by a magic tag) and a CSV export for
// inspection. Round-trips are bit-exact.
void save_kernel(const KernelMatrix& k, const std::string& path);
KernelMatrix load_kernel(const std::string& path);
void export_kernel_csv(const KernelMatrix& k, const std::string& path);

}  // namespace asymdiff
