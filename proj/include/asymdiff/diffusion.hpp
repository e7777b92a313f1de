#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "asymdiff/basis.hpp"

namespace asymdiff {

// Number of diffusion steps; must be >= 1.
struct DiffusionTime {
  int t = 1;
};

void validate(DiffusionTime time);

// Row of the truncated representation: v(m2) = sum_{m1 in box(k1)} a(m1, m2)
// * W_m1(x), for every m2. The truncated distances and the embedding both
// evaluate through this helper (same summation order), which is what makes
// the embedding-distance identity exact in floating point.
Eigen::VectorXcd projected_row(const CoefficientGrid& c, const Basis& b,
                               int x, int k1);

// Every point's projected row at once: row x of the result equals
// projected_row(c, b, x, k1) transposed. Fourier grids batch through a
// column-wise inverse DFT (O(n^2 log n) total); explicit bases use a gathered
// matrix product. Agrees with projected_row up to roundoff (different
// summation order), which the experiment self-checks verify.
Eigen::MatrixXcd projected_rows_all(const CoefficientGrid& c, const Basis& b,
                                    int k1);

// Truncated squared representation distance
//   f_{k1,k2}(c1, c2, x, y) = sum_{m2 in box(k2)} |v1(m2) - v2(m2)|^2
// with v1 = projected_row(c1, ., x, k1), v2 = projected_row(c2, ., y, k1).
// At full radii this equals the brute-force L2 row-difference norm.
double f_repr(const CoefficientGrid& c1, const CoefficientGrid& c2,
              const Basis& b, int x, int y, int k1, int k2);

// Squared diffusion distance of one kernel between points x and y.
double diffusion_distance_sq_repr(const CoefficientGrid& c, const Basis& b,
                                  int x, int y, const TruncationParams& p);

// Squared dynamic distance between two kernels (point x under the first,
// point y under the second). Grids must share n, basis and convention.
double dynamic_distance_sq_repr(const CoefficientGrid& c_gamma,
                                const CoefficientGrid& c_beta, const Basis& b,
                                int x, int y, const TruncationParams& p);

// t-step coefficient power: t factors of c composed through the Gram twist,
// with the inner summation index restricted to the radius-k3 box:
//   h^1 = c,   h^s = c * (P_k3 G P_k3) * h^{s-1}.
// At full radius this equals forward_transform of the t-th kernel matrix
// power.
CoefficientGrid coeff_power(const CoefficientGrid& c, const GramTwist& g,
                            DiffusionTime time, int k3);

// Squared global distance ||h_gamma^t - h_beta^t||_F^2 between two kernels'
// full-radius coefficient powers; equals ||K_gamma^t - K_beta^t||_F^2.
double global_distance_sq(const CoefficientGrid& c_gamma,
                          const CoefficientGrid& c_beta, const GramTwist& g,
                          DiffusionTime time);

// Fully-truncated ("weak") pipeline: truncate both grids to the radius-k box
// first, power them at inner radius k, then evaluate f_{k,k}. Matches the
// brute-force distance computed from the truncated kernels' matrix powers.
double weak_pipeline_distance_sq(const CoefficientGrid& c_gamma,
                                 const CoefficientGrid& c_beta, const Basis& b,
                                 DiffusionTime time, int k, int x, int y);

// Diffusion embedding: vectors(x, i) = sum_{m1 in box(k1)} h^t(m1, m2_i)
// * W_m1(x) where m2_i = i - k2 runs over the integers -k2..k2 (dimension
// 2*k2+1). An integer frequency without a representable storage index (the
// even-n, k2 = n/2 edge) contributes a zero column. Pairwise squared
// distances between rows reproduce diffusion_distance_sq_repr exactly.
struct Embedding {
  Eigen::MatrixXcd vectors;  // n x (2*k2+1)
  DiffusionTime time;
  TruncationParams params;

  int n() const { return static_cast<int>(vectors.rows()); }
  int dims() const { return static_cast<int>(vectors.cols()); }
};

Embedding embed(const CoefficientGrid& c, const Basis& b, const GramTwist& g,
                DiffusionTime time, const TruncationParams& p);

// Squared distance between two embedding rows, summed in box order (the
// expression tree mirrors f_repr).
double embedding_distance_sq(const Embedding& e, int x, int y);

// End-to-end driver: build the kernel from a declarative dataset description,
// optionally Markov-normalize, apply t diffusion steps (matrix power route by
// default, coefficient-power route optionally), transform, embed, and report
// diagnostics.
struct DatasetSpec {
  enum class Kind { sphere, mobius, image, temperature, direct };
  Kind kind = Kind::direct;
  int n = 0;                  // point count for sphere/mobius
  std::uint64_t seed = 1;
  double two_sigma_sq = 1.0;  // gaussian / temperature scale
  bool markov = false;
  std::string path;                     // image / csv input for image kind
  std::optional<ScalarGrid> grid;       // in-memory field (temperature)
  std::optional<KernelMatrix> kernel;   // direct kernel (tests)
};

enum class PowerRoute { automatic, matrix, coefficient };

struct AlgorithmResult {
  KernelMatrix kernel;          // after normalization, before powering
  Basis basis;
  CoefficientGrid coefficients; // of the powered kernel
  Embedding embedding;
  double truncation_residual = 0.0;  // ||c - trunc(c)||_F / ||c||_F
  double seconds_kernel = 0.0;
  double seconds_transform = 0.0;
  double seconds_embed = 0.0;
};

AlgorithmResult run_algorithm1(const DatasetSpec& spec, DiffusionTime time,
                               const TruncationParams& p,
                               PowerRoute route = PowerRoute::automatic);

// Exact t-th matrix power by repeated squaring (t >= 1).
Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, int t);

}  // namespace asymdiff
