#include "asymdiff/diffusion.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "asymdiff/common.hpp"

namespace asymdiff {

void validate(DiffusionTime time) {
  if (time.t < 1) throw UsageError("diffusion time must be >= 1");
}

namespace {

void check_grids_match(const CoefficientGrid& a, const CoefficientGrid& b) {
  if (a.n() != b.n() || a.basis != b.basis || a.convention != b.convention)
    throw UsageError("mismatched coefficient grids");
}

void check_point(int x, int n) {
  if (x < 0 || x >= n) throw UsageError("point index out of range");
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Eigen::VectorXcd projected_row(const CoefficientGrid& c, const Basis& b,
                               int x, int k1) {
  int n = c.n();
  if (b.n != n) throw UsageError("basis size does not match grid");
  check_point(x, n);
  Eigen::VectorXcd w = b.row(x);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  // Fixed ascending-frequency accumulation order: the embedding relies on
  // reproducing this expression tree exactly.
  for (int m1 : box_indices(n, k1, c.convention))
    v += w(m1) * c.coeffs.row(m1).transpose();
  return v;
}

Eigen::MatrixXcd projected_rows_all(const CoefficientGrid& c, const Basis& b,
                                    int k1) {
  int n = c.n();
  if (b.n != n) throw UsageError("basis size does not match grid");
  std::vector<int> box = box_indices(n, k1, c.convention);
  if (b.implicit()) {
    // V(x, m2) = (1/sqrt(n)) * sum_{m1 in box} a(m1, m2) e^{2 pi i m1 x / n}.
    Eigen::MatrixXcd masked = Eigen::MatrixXcd::Zero(n, n);
    for (int m1 : box) masked.row(m1) = c.coeffs.row(m1);
    return idft_columns(masked) / std::sqrt(static_cast<double>(n));
  }
  Eigen::MatrixXcd gathered_u(n, box.size());
  Eigen::MatrixXcd gathered_a(box.size(), n);
  for (size_t i = 0; i < box.size(); ++i) {
    gathered_u.col(static_cast<int>(i)) = b.vectors.col(box[i]);
    gathered_a.row(static_cast<int>(i)) = c.coeffs.row(box[i]);
  }
  return gathered_u * gathered_a;
}

double f_repr(const CoefficientGrid& c1, const CoefficientGrid& c2,
              const Basis& b, int x, int y, int k1, int k2) {
  check_grids_match(c1, c2);
  Eigen::VectorXcd v1 = projected_row(c1, b, x, k1);
  Eigen::VectorXcd v2 = projected_row(c2, b, y, k1);
  double acc = 0.0;
  for (int m2 : box_indices(c1.n(), k2, c1.convention))
    acc += std::norm(v1(m2) - v2(m2));
  // Sums of squared magnitudes cannot go negative; clamp defensively anyway.
  return acc < 0.0 ? 0.0 : acc;
}

double diffusion_distance_sq_repr(const CoefficientGrid& c, const Basis& b,
                                  int x, int y, const TruncationParams& p) {
  return f_repr(c, c, b, x, y, p.k1, p.k2);
}

double dynamic_distance_sq_repr(const CoefficientGrid& c_gamma,
                                const CoefficientGrid& c_beta, const Basis& b,
                                int x, int y, const TruncationParams& p) {
  return f_repr(c_gamma, c_beta, b, x, y, p.k1, p.k2);
}

namespace {

// (P_k G P_k) * a: mask rows to the box, twist, mask again. The second mask
// is a no-op for the identity and frequency-negation twists (symmetric boxes)
// but matters for dense twists.
Eigen::MatrixXcd masked_twist(const Eigen::MatrixXcd& a, const GramTwist& g,
                              const std::vector<int>& box) {
  int n = static_cast<int>(a.rows());
  std::vector<char> in_box(n, 0);
  for (int i : box) in_box[i] = 1;
  Eigen::MatrixXcd masked = Eigen::MatrixXcd::Zero(n, a.cols());
  for (int i : box) masked.row(i) = a.row(i);
  Eigen::MatrixXcd twisted = g.apply_left(masked);
  for (int i = 0; i < n; ++i)
    if (!in_box[i]) twisted.row(i).setZero();
  return twisted;
}

}  // namespace

CoefficientGrid coeff_power(const CoefficientGrid& c, const GramTwist& g,
                            DiffusionTime time, int k3) {
  validate(time);
  if (g.n != c.n()) throw UsageError("gram twist size does not match grid");
  std::vector<int> box = box_indices(c.n(), k3, c.convention);
  CoefficientGrid out = c;
  for (int step = 1; step < time.t; ++step)
    out.coeffs = c.coeffs * masked_twist(out.coeffs, g, box);
  return out;
}

double global_distance_sq(const CoefficientGrid& c_gamma,
                          const CoefficientGrid& c_beta, const GramTwist& g,
                          DiffusionTime time) {
  check_grids_match(c_gamma, c_beta);
  int full = c_gamma.convention == IndexConvention::centered
                 ? max_radius(c_gamma.n())
                 : c_gamma.n() - 1;
  CoefficientGrid hg = coeff_power(c_gamma, g, time, full);
  CoefficientGrid hb = coeff_power(c_beta, g, time, full);
  return (hg.coeffs - hb.coeffs).squaredNorm();
}

double weak_pipeline_distance_sq(const CoefficientGrid& c_gamma,
                                 const CoefficientGrid& c_beta, const Basis& b,
                                 DiffusionTime time, int k, int x, int y) {
  check_grids_match(c_gamma, c_beta);
  GramTwist g = gram_twist(b);
  CoefficientGrid tg = truncate(c_gamma, k, k);
  CoefficientGrid tb = truncate(c_beta, k, k);
  CoefficientGrid hg = coeff_power(tg, g, time, k);
  CoefficientGrid hb = coeff_power(tb, g, time, k);
  return f_repr(hg, hb, b, x, y, k, k);
}

Embedding embed(const CoefficientGrid& c, const Basis& b, const GramTwist& g,
                DiffusionTime time, const TruncationParams& p) {
  validate(time);
  int n = c.n();
  if (b.n != n) throw UsageError("basis size does not match grid");
  if (c.convention == IndexConvention::centered && p.k2 > max_radius(n))
    throw UsageError("k2 exceeds max representable radius");
  CoefficientGrid powered = coeff_power(c, g, time, p.k3);

  // Column i of the embedding carries integer frequency m2 = i - k2; the
  // storage indices come from the same ascending-frequency box the distance
  // evaluation uses, so row distances replay f_repr's arithmetic exactly.
  // A non-representable integer frequency (the +n/2 edge for even n at full
  // radius) stays a zero column.
  Embedding e;
  e.time = time;
  e.params = p;
  e.vectors = Eigen::MatrixXcd::Zero(n, 2 * p.k2 + 1);
  std::vector<int> cols = box_indices(n, p.k2, c.convention);
  for (int x = 0; x < n; ++x) {
    Eigen::VectorXcd v = projected_row(powered, b, x, p.k1);
    if (c.convention == IndexConvention::centered) {
      for (int idx : cols)
        e.vectors(x, centered_freq(idx, n) + p.k2) = v(idx);
    } else {
      for (int idx : cols) e.vectors(x, idx) = v(idx);
    }
  }
  return e;
}

double embedding_distance_sq(const Embedding& e, int x, int y) {
  check_point(x, e.n());
  check_point(y, e.n());
  double acc = 0.0;
  for (int i = 0; i < e.dims(); ++i)
    acc += std::norm(e.vectors(x, i) - e.vectors(y, i));
  return acc < 0.0 ? 0.0 : acc;
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, int t) {
  if (t < 1) throw UsageError("matrix power exponent must be >= 1");
  Eigen::MatrixXd base = m;
  Eigen::MatrixXd result;
  bool have = false;
  int e = t;
  while (e > 0) {
    if (e & 1) {
      result = have ? Eigen::MatrixXd(result * base) : base;
      have = true;
    }
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

AlgorithmResult run_algorithm1(const DatasetSpec& spec, DiffusionTime time,
                               const TruncationParams& p, PowerRoute route) {
  validate(time);
  AlgorithmResult res;

  double t0 = now_seconds();
  KernelMatrix k;
  switch (spec.kind) {
    case DatasetSpec::Kind::sphere:
      k = gaussian_kernel(generate_sphere(spec.n, spec.seed),
                          spec.two_sigma_sq);
      break;
    case DatasetSpec::Kind::mobius:
      k = sign_weighted_gaussian(generate_mobius(spec.n, spec.seed));
      break;
    case DatasetSpec::Kind::image:
      k = image_kernel(load_grayscale_image(spec.path));
      break;
    case DatasetSpec::Kind::temperature:
      if (!spec.grid) throw UsageError("temperature dataset needs a grid");
      k = temperature_kernel(*spec.grid, spec.two_sigma_sq);
      break;
    case DatasetSpec::Kind::direct:
      if (!spec.kernel) throw UsageError("direct dataset needs a kernel");
      k = *spec.kernel;
      break;
  }
  if (spec.markov) k = markov_normalize(k);
  res.kernel = k;
  res.seconds_kernel = now_seconds() - t0;

  // Diffusion steps: by default run the Markov process on the matrix (use
  // K^t, then transform once); the coefficient route instead powers the
  // transformed grid through the Gram twist with inner radius k3.
  bool use_matrix = route == PowerRoute::matrix ||
                    (route == PowerRoute::automatic &&
                     (time.t == 1 || spec.markov));
  res.basis = fourier_basis(k.n());
  GramTwist g = gram_twist(res.basis);

  t0 = now_seconds();
  if (use_matrix) {
    KernelMatrix powered = k;
    if (time.t > 1) powered.entries = matrix_power(k.entries, time.t);
    res.coefficients = forward_transform(powered, res.basis);
  } else {
    CoefficientGrid base = forward_transform(k, res.basis);
    res.coefficients = coeff_power(base, g, time, p.k3);
  }
  res.seconds_transform = now_seconds() - t0;

  t0 = now_seconds();
  // The grid already carries the t-step power; embed with a single step.
  res.embedding =
      embed(res.coefficients, res.basis, g, DiffusionTime{1}, p);
  res.embedding.time = time;
  res.seconds_embed = now_seconds() - t0;

  CoefficientGrid trunc = truncate(res.coefficients, p.k1, p.k2);
  double denom = res.coefficients.coeffs.norm();
  res.truncation_residual =
      denom == 0.0 ? 0.0 : (res.coefficients.coeffs - trunc.coeffs).norm() /
                               denom;
  return res;
}

}  // namespace asymdiff
