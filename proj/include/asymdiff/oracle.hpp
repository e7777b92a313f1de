#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "asymdiff/basis.hpp"
#include "asymdiff/diffusion.hpp"

namespace asymdiff {

// Brute-force squared diffusion distance: L2 norm of the row difference of
// the exact t-th matrix power, sum_z (K^t(x,z) - K^t(y,z))^2. O(n^3 log t) +
// O(n); the reference every representation-side path is checked against.
double brute_distance_sq(const KernelMatrix& k, DiffusionTime time, int x,
                         int y);

// Brute-force squared dynamic distance between two kernels:
// sum_z (K_gamma^t(x,z) - K_beta^t(y,z))^2.
double brute_dynamic_distance_sq(const KernelMatrix& k_gamma,
                                 const KernelMatrix& k_beta,
                                 DiffusionTime time, int x, int y);

// Spectral decomposition of a symmetric kernel (max asymmetry 1e-10, else
// DataError), eigenpairs sorted by descending |lambda|.
struct SpectralDecomp {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column m <-> eigenvalues(m)
};

SpectralDecomp spectral_decompose(const KernelMatrix& k);

// Squared diffusion distance through the eigenpairs:
// sum_m lambda_m^e (phi_m(x) - phi_m(y))^2. `exact` uses e = 2t and matches
// brute force on symmetric kernels; `printed` uses e = t, the exponent as
// printed in the classical diffusion-maps formula, kept for replication.
enum class SpectralExponent { exact, printed };
double spectral_distance_sq(const SpectralDecomp& d, DiffusionTime time,
                            int x, int y,
                            SpectralExponent e = SpectralExponent::exact);

// Singular value decomposition k = sum_i c_i L_i x R_i (descending c_i),
// timed with a steady clock.
struct SvdDecomp {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd left;   // columns L_i
  Eigen::MatrixXd right;  // columns R_i
  double seconds = 0.0;
};

SvdDecomp svd_decompose(const KernelMatrix& k);

// Views of the SVD as basis + diagonal coefficient grid (ordinal indexing):
// a(i, i) = c_i with row basis {L_i}, column basis {R_i}.
Basis left_basis(const SvdDecomp& d);
Basis right_basis(const SvdDecomp& d);
CoefficientGrid svd_coefficients(const SvdDecomp& d);

// Rank-r reconstruction sum_{i<r} c_i L_i R_i^T; its error against the
// original is the Eckart-Young optimum sqrt(sum_{i>=r} c_i^2).
Eigen::MatrixXd svd_truncated_recon(const SvdDecomp& d, int rank);

// First `dims` singular coordinates psi(x)(i) = c_i * L_i(x) (classical
// SVD embedding used for comparisons).
Eigen::MatrixXd svd_embedding(const SvdDecomp& d, int dims);

// Timing protocol: one discarded warm-up run then best of `repeats` timed
// runs, steady clock, strictly serial.
double time_best_of(const std::function<void()>& fn, int repeats = 3);

// Wall-clock + error comparison of the two representation paths per
// truncation order. The FFT row times the forward 2-D FFT coefficient
// computation; the SVD row times the decomposition. E is the Frobenius error
// of the order's truncated reconstruction against the exact kernel (radius-k
// box for Fourier, rank min(n, 2k+1) for the SVD), and m_b = (1/n) * E *
// seconds.
struct TimeComparisonRow {
  int order = 0;
  std::string path;  // "fft" or "svd"
  double seconds = 0.0;
  double l2_error = 0.0;
  double m_b = 0.0;
};

struct TimeComparisonReport {
  int n = 0;
  std::vector<TimeComparisonRow> rows;
  std::string machine;  // host / compiler metadata for the report header
};

TimeComparisonReport time_comparison(const KernelMatrix& k,
                                     const std::vector<int>& orders);

std::string machine_info();

// Least-squares slope of log(seconds) against log(n); used for the empirical
// growth exponents in the benchmark.
double loglog_slope(const std::vector<double>& ns,
                    const std::vector<double>& seconds);

// Pearson correlation of two equal-length samples.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Fisher-Lee circular correlation of two angle samples (radians).
double circular_correlation(const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b);

// Mardia circular-linear correlation between a real coordinate and an angle:
// the multiple correlation of x against (cos(p*angle), sin(p*angle)), i.e.
// the best phase-shifted period-p harmonic fit, in [0, 1].
double circular_linear_correlation(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& angles,
                                   int period = 1);

// Top `dims` principal coordinates (classical MDS scores) of a complex
// embedding, computed on its centered real view [Re | Im]. The 2-D scores are
// the plotting view for coefficient embeddings, whose raw coordinates are
// basis-indexed rather than variance-ordered.
Eigen::MatrixXd principal_coordinates(const Eigen::MatrixXcd& embedding,
                                      int dims);

}  // namespace asymdiff
