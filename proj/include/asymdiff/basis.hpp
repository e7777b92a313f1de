#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "asymdiff/kernel.hpp"

namespace asymdiff {

enum class BasisKind { fourier, eigen, singular_left, singular_right };

// Frequency indexing of a coefficient grid. `centered` is the Fourier
// convention: storage index m in {0..n-1} denotes frequency m for
// m <= ceil(n/2)-1 and m-n otherwise, so frequencies span
// {-floor(n/2)..ceil(n/2)-1} and a truncation radius r keeps |freq| <= r.
// `ordinal` indexes decompositions ordered by magnitude (eigen/singular
// grids): radius r keeps storage indices 0..r.
enum class IndexConvention { centered, ordinal };

// An orthonormal basis of C^n, W_m(x) = vectors(x, m). The Fourier basis
// W_m(x) = (1/sqrt(n)) exp(2*pi*i*m*x/n) is kept implicit (vectors empty) and
// evaluated on demand. uniform_bound is max_{x,m} |W_m(x)|; 1/sqrt(n) for
// Fourier.
struct Basis {
  BasisKind kind = BasisKind::fourier;
  int n = 0;
  Eigen::MatrixXcd vectors;  // n x n, empty when implicit (Fourier)
  double uniform_bound = 0.0;

  bool implicit() const { return vectors.size() == 0; }
  // [W_0(x), ..., W_{n-1}(x)] for one data point x.
  Eigen::VectorXcd row(int x) const;
  // Full n x n matrix U with U(x, m) = W_m(x).
  Eigen::MatrixXcd materialize() const;
};

Basis fourier_basis(int n);

// Wraps an explicit orthonormal system; rejects columns that fail
// orthonormality by more than 1e-10 (max-abs of U^H U - I).
Basis explicit_basis(BasisKind kind, Eigen::MatrixXcd vectors);

// Tensor-product coefficients a(m1, m2) of a kernel, under the convention
// a(m1, m2) = sum_{x,y} k(x, y) * conj(W_m1(x)) * conj(W_m2(y)).
struct CoefficientGrid {
  Eigen::MatrixXcd coeffs;  // n x n, [m1][m2]
  BasisKind basis = BasisKind::fourier;
  IndexConvention convention = IndexConvention::centered;

  int n() const { return static_cast<int>(coeffs.rows()); }
};

// Truncation radii: k1 bounds the m1 frequency box, k2 the m2 box, k3 the
// inner summation box of coefficient powers. Each must lie in [0, floor(n/2)]
// for centered grids; floor(n/2) is the identity truncation.
struct TruncationParams {
  int k1 = 0;
  int k2 = 0;
  int k3 = 0;
};

int max_radius(int n);  // floor(n/2)

// Centered frequency denoted by storage index `idx` (see IndexConvention).
int centered_freq(int idx, int n);
// Storage index of integer frequency m, or -1 when m is not representable,
// i.e. outside {-floor(n/2)..ceil(n/2)-1}.
int freq_index(int m, int n);
// Storage indices inside the radius box, in ascending frequency order for
// centered grids (-r..r intersected with the representable range) and
// ascending index order (0..r) for ordinal grids.
std::vector<int> box_indices(int n, int radius, IndexConvention conv);

// Forward transform k -> a. Fourier path runs through a 2-D FFT (a =
// DFT2(k)/n, O(n^2 log n)); explicit bases use A = U^H * K * conj(U).
CoefficientGrid forward_transform(const KernelMatrix& k, const Basis& b);

// Inverse transform a -> k: Fourier path k = IDFT2_unnormalized(a)/n,
// explicit path K = U * A * U^T. For coefficient grids of real kernels the
// imaginary residue (max |Im|) is reported and dropped; a residue above
// 1e-6 throws NumericError. The complex variant skips the residue policy.
struct Reconstruction {
  Eigen::MatrixXd values;
  double imag_residue = 0.0;
};
Reconstruction inverse_transform(const CoefficientGrid& c, const Basis& b);
Eigen::MatrixXcd inverse_transform_complex(const CoefficientGrid& c,
                                           const Basis& b);

// Zeroes every coefficient outside the (k1, k2) box. Radii above
// max_radius(n) (centered) or n-1 (ordinal) are usage errors.
CoefficientGrid truncate(const CoefficientGrid& c, int k1, int k2);

// Gram twist G = U^T U (plain transpose, no conjugation). Identity for real
// orthonormal bases; for the Fourier basis the frequency-negation permutation
// G(j, l) = 1 iff (j + l) mod n == 0. Composition of kernels happens in
// coefficient space as coeffs(K1 * K2) = A1 * G * A2. Kept in structured form
// so large n never materializes an n x n permutation.
struct GramTwist {
  enum class Kind { identity, freq_negation, dense };
  Kind kind = Kind::identity;
  int n = 0;
  Eigen::MatrixXcd dense;  // only for Kind::dense

  Eigen::MatrixXcd apply_left(const Eigen::MatrixXcd& a) const;  // G * a
  Eigen::MatrixXcd to_matrix() const;
};

GramTwist gram_twist(const Basis& b);

// Column-wise unnormalized inverse DFT (e^{+2 pi i m x / n} kernel), the
// batched building block behind whole-dataset row evaluations.
Eigen::MatrixXcd idft_columns(const Eigen::MatrixXcd& m);

// Binary serialization of coefficient grids (bit-exact round-trip).
void save_coefficients(const CoefficientGrid& c, const std::string& path);
CoefficientGrid load_coefficients(const std::string& path);

}  // namespace asymdiff
