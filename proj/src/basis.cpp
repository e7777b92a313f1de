#include "asymdiff/basis.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include "asymdiff/common.hpp"

namespace asymdiff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW's planner is not thread-safe; executing distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place 2-D DFT of a row-major n x n complex buffer. sign is
// FFTW_FORWARD (e^-) or FFTW_BACKWARD (e^+); no scaling is applied.
void fft2_inplace(std::vector<std::complex<double>>& buf, int n, int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()), sign,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw NumericError("fft planning failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::vector<std::complex<double>> to_row_major(const Eigen::MatrixXcd& m) {
  int n = static_cast<int>(m.rows());
  std::vector<std::complex<double>> buf(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) buf[static_cast<size_t>(r) * n + c] = m(r, c);
  return buf;
}

Eigen::MatrixXcd from_row_major(const std::vector<std::complex<double>>& buf,
                                int n) {
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = buf[static_cast<size_t>(r) * n + c];
  return m;
}

}  // namespace

Eigen::VectorXcd Basis::row(int x) const {
  if (x < 0 || x >= n) throw UsageError("basis row index out of range");
  Eigen::VectorXcd out(n);
  if (implicit()) {
    double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m)
      out(m) = std::polar(scale, kTwoPi * m * x / n);
    return out;
  }
  return vectors.row(x).transpose();
}

Eigen::MatrixXcd Basis::materialize() const {
  if (!implicit()) return vectors;
  Eigen::MatrixXcd u(n, n);
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int x = 0; x < n; ++x)
    for (int m = 0; m < n; ++m)
      u(x, m) = std::polar(scale, kTwoPi * m * x / n);
  return u;
}

Basis fourier_basis(int n) {
  if (n <= 0) throw UsageError("basis size must be positive");
  Basis b;
  b.kind = BasisKind::fourier;
  b.n = n;
  b.uniform_bound = 1.0 / std::sqrt(static_cast<double>(n));
  return b;
}

Basis explicit_basis(BasisKind kind, Eigen::MatrixXcd vectors) {
  if (vectors.rows() != vectors.cols() || vectors.rows() == 0)
    throw UsageError("basis matrix must be square and non-empty");
  int n = static_cast<int>(vectors.rows());
  Eigen::MatrixXcd gram = vectors.adjoint() * vectors;
  double dev = (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > 1e-10)
    throw NumericError("basis columns are not orthonormal (deviation " +
                       std::to_string(dev) + ")");
  Basis b;
  b.kind = kind;
  b.n = n;
  b.vectors = std::move(vectors);
  b.uniform_bound = b.vectors.cwiseAbs().maxCoeff();
  return b;
}

int max_radius(int n) { return n / 2; }

int centered_freq(int idx, int n) {
  return idx <= (n - 1) / 2 ? idx : idx - n;
}

int freq_index(int m, int n) {
  if (m < -(n / 2) || m > (n - 1) / 2) return -1;
  return m >= 0 ? m : m + n;
}

std::vector<int> box_indices(int n, int radius, IndexConvention conv) {
  if (radius < 0) throw UsageError("truncation radius must be >= 0");
  std::vector<int> out;
  if (conv == IndexConvention::ordinal) {
    if (radius > n - 1)
      throw UsageError("ordinal truncation radius exceeds grid size");
    for (int i = 0; i <= radius; ++i) out.push_back(i);
    return out;
  }
  if (radius > max_radius(n))
    throw UsageError("truncation radius " + std::to_string(radius) +
                     " exceeds max representable " +
                     std::to_string(max_radius(n)));
  for (int m = -radius; m <= radius; ++m) {
    int idx = freq_index(m, n);
    if (idx >= 0) out.push_back(idx);
  }
  return out;
}

namespace {

void check_basis_size(const Basis& b, int n) {
  if (b.n != n) throw UsageError("basis size does not match kernel size");
}

}  // namespace

CoefficientGrid forward_transform(const KernelMatrix& k, const Basis& b) {
  int n = k.n();
  check_basis_size(b, n);
  CoefficientGrid grid;
  grid.basis = b.kind;
  grid.convention = b.kind == BasisKind::fourier ? IndexConvention::centered
                                                 : IndexConvention::ordinal;
  if (b.implicit()) {
    // a = DFT2(k) / n; the forward DFT kernel e^{-2 pi i (m1 x + m2 y)/n}
    // times 1/n realizes sum_{x,y} k(x,y) conj(W_m1(x)) conj(W_m2(y)).
    auto buf = to_row_major(k.entries.cast<std::complex<double>>());
    fft2_inplace(buf, n, FFTW_FORWARD);
    grid.coeffs = from_row_major(buf, n) / static_cast<double>(n);
  } else {
    grid.coeffs =
        b.vectors.adjoint() * k.entries * b.vectors.conjugate();
  }
  return grid;
}

Eigen::MatrixXcd inverse_transform_complex(const CoefficientGrid& c,
                                           const Basis& b) {
  int n = c.n();
  check_basis_size(b, n);
  if (b.implicit()) {
    auto buf = to_row_major(c.coeffs);
    fft2_inplace(buf, n, FFTW_BACKWARD);
    return from_row_major(buf, n) / static_cast<double>(n);
  }
  return b.vectors * c.coeffs * b.vectors.transpose();
}

Reconstruction inverse_transform(const CoefficientGrid& c, const Basis& b) {
  Eigen::MatrixXcd full = inverse_transform_complex(c, b);
  Reconstruction rec;
  rec.imag_residue = full.imag().cwiseAbs().maxCoeff();
  if (rec.imag_residue > 1e-6)
    throw NumericError("reconstruction imaginary residue " +
                       std::to_string(rec.imag_residue) +
                       " exceeds 1e-6; coefficients do not describe a real "
                       "kernel");
  rec.values = full.real();
  return rec;
}

CoefficientGrid truncate(const CoefficientGrid& c, int k1, int k2) {
  int n = c.n();
  // box_indices validates the radii for the grid's convention.
  std::vector<int> rows = box_indices(n, k1, c.convention);
  std::vector<int> cols = box_indices(n, k2, c.convention);
  std::vector<char> row_in(n, 0), col_in(n, 0);
  for (int r : rows) row_in[r] = 1;
  for (int cc : cols) col_in[cc] = 1;
  CoefficientGrid out = c;
  for (int r = 0; r < n; ++r)
    for (int cc = 0; cc < n; ++cc)
      if (!row_in[r] || !col_in[cc]) out.coeffs(r, cc) = 0.0;
  return out;
}

Eigen::MatrixXcd GramTwist::apply_left(const Eigen::MatrixXcd& a) const {
  if (a.rows() != n) throw UsageError("gram twist size mismatch");
  switch (kind) {
    case Kind::identity:
      return a;
    case Kind::freq_negation: {
      Eigen::MatrixXcd out(a.rows(), a.cols());
      for (int j = 0; j < n; ++j) out.row(j) = a.row((n - j) % n);
      return out;
    }
    case Kind::dense:
      return dense * a;
  }
  throw NumericError("unreachable gram twist kind");
}

Eigen::MatrixXcd GramTwist::to_matrix() const {
  return apply_left(Eigen::MatrixXcd::Identity(n, n));
}

GramTwist gram_twist(const Basis& b) {
  GramTwist g;
  g.n = b.n;
  if (b.implicit()) {
    // (U^T U)(j,l) = (1/n) sum_x e^{2 pi i (j+l) x / n} = [ (j+l) mod n == 0 ].
    g.kind = GramTwist::Kind::freq_negation;
    return g;
  }
  Eigen::MatrixXcd gram = b.vectors.transpose() * b.vectors;
  double dev =
      (gram - Eigen::MatrixXcd::Identity(b.n, b.n)).cwiseAbs().maxCoeff();
  if (dev <= 1e-12) {
    g.kind = GramTwist::Kind::identity;
    return g;
  }
  g.kind = GramTwist::Kind::dense;
  g.dense = std::move(gram);
  return g;
}

Eigen::MatrixXcd idft_columns(const Eigen::MatrixXcd& m) {
  int n = static_cast<int>(m.rows());
  int cols = static_cast<int>(m.cols());
  Eigen::MatrixXcd out(n, cols);
  std::vector<std::complex<double>> buf(static_cast<size_t>(n));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()),
                            FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw NumericError("fft planning failed");
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < n; ++i) buf[i] = m(i, j);
    fftw_execute(plan);
    for (int i = 0; i < n; ++i) out(i, j) = buf[i];
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
  return out;
}

namespace {
constexpr char kCoeffMagic[8] = {'A', 'S', 'D', 'C', 'F', 'G', '1', '\0'};
}

void save_coefficients(const CoefficientGrid& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write coefficient file: " + path);
  out.write(kCoeffMagic, sizeof(kCoeffMagic));
  std::uint64_t n = static_cast<std::uint64_t>(c.n());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  std::uint8_t basis = static_cast<std::uint8_t>(c.basis);
  std::uint8_t conv = static_cast<std::uint8_t>(c.convention);
  out.write(reinterpret_cast<const char*>(&basis), 1);
  out.write(reinterpret_cast<const char*>(&conv), 1);
  for (int r = 0; r < c.n(); ++r)
    for (int cc = 0; cc < c.n(); ++cc) {
      double re = c.coeffs(r, cc).real(), im = c.coeffs(r, cc).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  if (!out) throw DataError("failed writing coefficient file: " + path);
}

CoefficientGrid load_coefficients(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open coefficient file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCoeffMagic, sizeof(magic)) != 0)
    throw DataError("not a coefficient file: " + path);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n == 0 || n > (1u << 20))
    throw DataError("bad coefficient grid size in " + path);
  std::uint8_t basis = 0, conv = 0;
  in.read(reinterpret_cast<char*>(&basis), 1);
  in.read(reinterpret_cast<char*>(&conv), 1);
  if (!in || basis > 3 || conv > 1)
    throw DataError("bad coefficient grid header in " + path);
  CoefficientGrid c;
  c.basis = static_cast<BasisKind>(basis);
  c.convention = static_cast<IndexConvention>(conv);
  c.coeffs.resize(static_cast<int>(n), static_cast<int>(n));
  for (std::uint64_t r = 0; r < n; ++r)
    for (std::uint64_t cc = 0; cc < n; ++cc) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      if (!in) throw DataError("truncated coefficient file: " + path);
      c.coeffs(static_cast<int>(r), static_cast<int>(cc)) = {re, im};
    }
  return c;
}

}  // namespace asymdiff
