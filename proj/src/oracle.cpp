#include "asymdiff/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <sys/utsname.h>

#include "asymdiff/common.hpp"

namespace asymdiff {

namespace {

Eigen::MatrixXd powered_entries(const KernelMatrix& k, DiffusionTime time) {
  validate(time);
  return time.t == 1 ? k.entries : matrix_power(k.entries, time.t);
}

void check_point(int x, int n) {
  if (x < 0 || x >= n) throw UsageError("point index out of range");
}

}  // namespace

double brute_distance_sq(const KernelMatrix& k, DiffusionTime time, int x,
                         int y) {
  check_point(x, k.n());
  check_point(y, k.n());
  Eigen::MatrixXd p = powered_entries(k, time);
  return (p.row(x) - p.row(y)).squaredNorm();
}

double brute_dynamic_distance_sq(const KernelMatrix& k_gamma,
                                 const KernelMatrix& k_beta,
                                 DiffusionTime time, int x, int y) {
  if (k_gamma.n() != k_beta.n())
    throw UsageError("kernels have mismatched sizes");
  check_point(x, k_gamma.n());
  check_point(y, k_beta.n());
  Eigen::MatrixXd pg = powered_entries(k_gamma, time);
  Eigen::MatrixXd pb = powered_entries(k_beta, time);
  return (pg.row(x) - pb.row(y)).squaredNorm();
}

SpectralDecomp spectral_decompose(const KernelMatrix& k) {
  double asym = (k.entries - k.entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw DataError("spectral decomposition needs a symmetric kernel "
                    "(asymmetry " +
                    std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.entries);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigendecomposition failed to converge");
  int n = k.n();
  // Sort by descending |lambda|.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(ev(a)) > std::abs(ev(b));
  });
  SpectralDecomp d;
  d.eigenvalues.resize(n);
  d.eigenvectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    d.eigenvalues(i) = ev(order[i]);
    d.eigenvectors.col(i) = solver.eigenvectors().col(order[i]);
  }
  return d;
}

double spectral_distance_sq(const SpectralDecomp& d, DiffusionTime time,
                            int x, int y, SpectralExponent e) {
  validate(time);
  int n = static_cast<int>(d.eigenvalues.size());
  check_point(x, n);
  check_point(y, n);
  int exponent = e == SpectralExponent::exact ? 2 * time.t : time.t;
  double acc = 0.0;
  for (int m = 0; m < n; ++m) {
    double diff = d.eigenvectors(x, m) - d.eigenvectors(y, m);
    acc += std::pow(d.eigenvalues(m), exponent) * diff * diff;
  }
  return acc;
}

SvdDecomp svd_decompose(const KernelMatrix& k) {
  auto t0 = std::chrono::steady_clock::now();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      k.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
  auto t1 = std::chrono::steady_clock::now();
  if (svd.info() != Eigen::Success)
    throw NumericError("singular value decomposition failed");
  SvdDecomp d;
  d.singular_values = svd.singularValues();
  d.left = svd.matrixU();
  d.right = svd.matrixV();
  d.seconds = std::chrono::duration<double>(t1 - t0).count();
  return d;
}

Basis left_basis(const SvdDecomp& d) {
  return explicit_basis(BasisKind::singular_left,
                        d.left.cast<std::complex<double>>());
}

Basis right_basis(const SvdDecomp& d) {
  return explicit_basis(BasisKind::singular_right,
                        d.right.cast<std::complex<double>>());
}

CoefficientGrid svd_coefficients(const SvdDecomp& d) {
  int n = static_cast<int>(d.singular_values.size());
  CoefficientGrid c;
  c.basis = BasisKind::singular_left;
  c.convention = IndexConvention::ordinal;
  c.coeffs = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) c.coeffs(i, i) = d.singular_values(i);
  return c;
}

Eigen::MatrixXd svd_truncated_recon(const SvdDecomp& d, int rank) {
  int n = static_cast<int>(d.singular_values.size());
  if (rank < 0 || rank > n) throw UsageError("rank out of range");
  if (rank == 0) return Eigen::MatrixXd::Zero(n, n);
  return d.left.leftCols(rank) *
         d.singular_values.head(rank).asDiagonal() *
         d.right.leftCols(rank).transpose();
}

Eigen::MatrixXd svd_embedding(const SvdDecomp& d, int dims) {
  int n = static_cast<int>(d.singular_values.size());
  if (dims < 1 || dims > n) throw UsageError("embedding dims out of range");
  return d.left.leftCols(dims) * d.singular_values.head(dims).asDiagonal();
}

double time_best_of(const std::function<void()>& fn, int repeats) {
  fn();  // warm-up, discarded
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

std::string machine_info() {
  std::ostringstream os;
  struct utsname uts {};
  if (uname(&uts) == 0)
    os << uts.sysname << " " << uts.release << " " << uts.machine;
  os << "; " << std::thread::hardware_concurrency() << " cpus";
#if defined(__clang__)
  os << "; clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  os << "; gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#endif
  return os.str();
}

TimeComparisonReport time_comparison(const KernelMatrix& k,
                                     const std::vector<int>& orders) {
  validate(k);
  int n = k.n();
  TimeComparisonReport report;
  report.n = n;
  report.machine = machine_info();

  Basis fb = fourier_basis(n);
  // Timed sections cover only the coefficient computation (forward 2-D FFT)
  // and the decomposition; error evaluation happens outside the clock.
  CoefficientGrid coeffs;
  double fft_seconds =
      time_best_of([&] { coeffs = forward_transform(k, fb); });
  SvdDecomp svd;
  double svd_seconds = time_best_of([&] { svd = svd_decompose(k); });

  for (int order : orders) {
    if (order < 0 || order > max_radius(n))
      throw UsageError("comparison order out of range");
    TimeComparisonRow fft_row;
    fft_row.order = order;
    fft_row.path = "fft";
    fft_row.seconds = fft_seconds;
    Reconstruction rec = inverse_transform(truncate(coeffs, order, order), fb);
    fft_row.l2_error = (rec.values - k.entries).norm();
    fft_row.m_b = fft_row.l2_error * fft_row.seconds / n;

    TimeComparisonRow svd_row;
    svd_row.order = order;
    svd_row.path = "svd";
    svd_row.seconds = svd_seconds;
    int rank = std::min(n, 2 * order + 1);
    // Eckart-Young: the rank-r error is the tail norm of the singular values.
    double tail = 0.0;
    for (int i = rank; i < n; ++i)
      tail += svd.singular_values(i) * svd.singular_values(i);
    svd_row.l2_error = std::sqrt(tail);
    svd_row.m_b = svd_row.l2_error * svd_row.seconds / n;

    report.rows.push_back(fft_row);
    report.rows.push_back(svd_row);
  }
  return report;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw UsageError("correlation needs two equal-length samples");
  double ma = a.mean(), mb = b.mean();
  Eigen::VectorXd da = a.array() - ma, db = b.array() - mb;
  double denom = da.norm() * db.norm();
  if (denom == 0.0) throw NumericError("degenerate correlation sample");
  return da.dot(db) / denom;
}

double circular_correlation(const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw UsageError("correlation needs two equal-length samples");
  // Fisher-Lee: circular means via the resultant vector, then the Pearson
  // form on sines of the deviations.
  auto mean_angle = [](const Eigen::VectorXd& v) {
    double s = v.array().sin().sum(), c = v.array().cos().sum();
    return std::atan2(s, c);
  };
  double mu_a = mean_angle(a), mu_b = mean_angle(b);
  Eigen::VectorXd sa = (a.array() - mu_a).sin();
  Eigen::VectorXd sb = (b.array() - mu_b).sin();
  double denom = sa.norm() * sb.norm();
  if (denom == 0.0) throw NumericError("degenerate circular sample");
  return sa.dot(sb) / denom;
}

double circular_linear_correlation(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& angles, int period) {
  if (x.size() != angles.size() || x.size() < 3)
    throw UsageError("circular-linear correlation needs equal-length samples");
  if (period < 1) throw UsageError("harmonic period must be positive");
  Eigen::VectorXd c = (period * angles.array()).cos();
  Eigen::VectorXd s = (period * angles.array()).sin();
  double rxc = pearson(x, c), rxs = pearson(x, s), rcs = pearson(c, s);
  double denom = 1.0 - rcs * rcs;
  if (denom <= 0.0) throw NumericError("degenerate harmonic regressors");
  double r_sq = (rxc * rxc + rxs * rxs - 2.0 * rxc * rxs * rcs) / denom;
  return std::sqrt(std::max(0.0, r_sq));
}

Eigen::MatrixXd principal_coordinates(const Eigen::MatrixXcd& embedding,
                                      int dims) {
  long n = embedding.rows(), c = embedding.cols();
  if (n < 2 || c < 1) throw UsageError("embedding too small for MDS scores");
  if (dims < 1 || dims > std::min(n, 2 * c))
    throw UsageError("principal coordinate count out of range");
  Eigen::MatrixXd view(n, 2 * c);
  view.leftCols(c) = embedding.real();
  view.rightCols(c) = embedding.imag();
  view.rowwise() -= view.colwise().mean().eval();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(view, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(dims) *
         svd.singularValues().head(dims).asDiagonal();
}

double loglog_slope(const std::vector<double>& ns,
                    const std::vector<double>& seconds) {
  if (ns.size() != seconds.size() || ns.size() < 2)
    throw UsageError("slope fit needs at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = static_cast<int>(ns.size());
  for (int i = 0; i < m; ++i) {
    double lx = std::log(ns[i]), ly = std::log(seconds[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw NumericError("degenerate slope fit");
  return (m * sxy - sx * sy) / denom;
}

}  // namespace asymdiff
