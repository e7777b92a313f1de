#include "asymdiff/kernel.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "asymdiff/common.hpp"

namespace asymdiff {

void validate(const KernelMatrix& k) {
  if (k.entries.rows() != k.entries.cols())
    throw DataError("kernel matrix must be square");
  if (k.entries.rows() == 0) throw DataError("kernel matrix is empty");
  for (int i = 0; i < k.entries.rows(); ++i)
    for (int j = 0; j < k.entries.cols(); ++j) {
      double v = k.entries(i, j);
      if (!std::isfinite(v))
        throw DataError("non-finite kernel entry at (" + std::to_string(i) +
                        "," + std::to_string(j) + ")");
      if (v < 0.0)
        throw DataError("negative kernel entry at (" + std::to_string(i) +
                        "," + std::to_string(j) + ")");
    }
}

namespace {

void check_cloud_finite(const PointCloud& cloud) {
  if (cloud.n() == 0) throw DataError("empty point cloud");
  if (!cloud.points.allFinite())
    throw DataError("point cloud has non-finite coordinates");
}

}  // namespace

KernelMatrix gaussian_kernel(const PointCloud& cloud, double two_sigma_sq) {
  if (!(two_sigma_sq > 0.0))
    throw UsageError("two_sigma_sq must be positive");
  check_cloud_finite(cloud);
  int n = cloud.n();
  KernelMatrix k;
  k.entries.resize(n, n);
  k.provenance = "gaussian";
  const auto& pts = cloud.points;
  parallel_for(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
      k.entries(i, j) = std::exp(-d2 / two_sigma_sq);
    }
  });
  return k;
}

namespace {

// sign(atan2(z2, z1)) with sign(0) = 0; the boundary convention keeps the
// diagonal weight at exactly 1.
double azimuth_sign(double z1, double z2) {
  double a = std::atan2(z2, z1);
  return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
}

}  // namespace

KernelMatrix sign_weighted_gaussian(const PointCloud& cloud) {
  check_cloud_finite(cloud);
  if (cloud.dim() != 3)
    throw DataError("sign-weighted kernel expects 3-D points");
  int n = cloud.n();
  KernelMatrix k;
  k.entries.resize(n, n);
  k.provenance = "sign_weighted_gaussian";
  const auto& pts = cloud.points;
  parallel_for(n, [&](int i) {
    for (int j = 0; j < n; ++j) {
      Eigen::RowVector3d z = pts.row(i) - pts.row(j);
      double s = azimuth_sign(z(0), z(1));
      k.entries(i, j) = (s + 1.0) * std::exp(-z.squaredNorm());
    }
  });
  return k;
}

KernelMatrix image_kernel(const ScalarGrid& image) {
  validate(image);
  if (image.width != image.height)
    throw DataError("image kernel needs a square image, got " +
                    std::to_string(image.height) + "x" +
                    std::to_string(image.width));
  if (!image.mask.all())
    throw DataError("image kernel needs a fully masked-on image");
  KernelMatrix k;
  k.entries = image.values;  // entries(x, y) = pixel(row x, col y)
  k.provenance = "image";
  validate(k);
  return k;
}

KernelMatrix temperature_kernel(const ScalarGrid& field, double two_sigma_sq) {
  if (!(two_sigma_sq > 0.0))
    throw UsageError("two_sigma_sq must be positive");
  validate(field);
  // Masked-on cells in row-major order become the data points; their integer
  // (row, col) positions feed the spatial factor.
  std::vector<int> rows, cols;
  std::vector<double> temps;
  for (int r = 0; r < field.height; ++r)
    for (int c = 0; c < field.width; ++c)
      if (field.mask(r, c)) {
        rows.push_back(r);
        cols.push_back(c);
        temps.push_back(field.values(r, c));
      }
  int n = static_cast<int>(temps.size());
  KernelMatrix k;
  k.entries.resize(n, n);
  k.provenance = "temperature";
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  parallel_for(n, [&](int p) {
    for (int q = 0; q < n; ++q) {
      double dr = rows[p] - rows[q], dc = cols[p] - cols[q];
      k.entries(p, q) =
          scale * temps[q] * std::exp(-(dr * dr + dc * dc) / two_sigma_sq);
    }
  });
  for (int q = 0; q < n; ++q)
    if (temps[q] < 0.0)
      throw DataError("temperature kernel requires non-negative field values");
  return k;
}

KernelMatrix markov_normalize(const KernelMatrix& k) {
  validate(k);
  int n = k.n();
  Eigen::VectorXd volume = k.entries.rowwise().sum();
  for (int i = 0; i < n; ++i)
    if (!(volume(i) > 0.0))
      throw DataError("markov normalization: row " + std::to_string(i) +
                      " has zero volume");
  Eigen::VectorXd inv_sqrt = volume.array().sqrt().inverse();
  KernelMatrix out;
  out.entries = inv_sqrt.asDiagonal() * k.entries * inv_sqrt.asDiagonal();
  out.normalization = Normalization::markov;
  out.provenance = k.provenance.empty() ? "markov" : k.provenance + "+markov";
  return out;
}

namespace {
constexpr char kKernelMagic[8] = {'A', 'S', 'D', 'K', 'R', 'N', '1', '\0'};

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("truncated kernel file");
}
}  // namespace

void save_kernel(const KernelMatrix& k, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write kernel file: " + path);
  out.write(kKernelMagic, sizeof(kKernelMagic));
  std::uint64_t n = static_cast<std::uint64_t>(k.n());
  write_raw(out, n);
  std::uint8_t norm = k.normalization == Normalization::markov ? 1 : 0;
  write_raw(out, norm);
  std::uint32_t plen = static_cast<std::uint32_t>(k.provenance.size());
  write_raw(out, plen);
  out.write(k.provenance.data(), plen);
  for (int i = 0; i < k.n(); ++i)
    for (int j = 0; j < k.n(); ++j) write_raw(out, k.entries(i, j));
  if (!out) throw DataError("failed writing kernel file: " + path);
}

KernelMatrix load_kernel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open kernel file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kKernelMagic, sizeof(magic)) != 0)
    throw DataError("not a kernel file: " + path);
  std::uint64_t n = 0;
  read_raw(in, n);
  if (n == 0 || n > (1u << 20)) throw DataError("bad kernel size in " + path);
  std::uint8_t norm = 0;
  read_raw(in, norm);
  std::uint32_t plen = 0;
  read_raw(in, plen);
  if (plen > (1u << 16)) throw DataError("bad provenance length in " + path);
  KernelMatrix k;
  k.provenance.resize(plen);
  in.read(k.provenance.data(), plen);
  if (!in) throw DataError("truncated kernel file: " + path);
  k.normalization = norm ? Normalization::markov : Normalization::raw;
  k.entries.resize(static_cast<int>(n), static_cast<int>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < n; ++j)
      read_raw(in, k.entries(static_cast<int>(i), static_cast<int>(j)));
  return k;
}

void export_kernel_csv(const KernelMatrix& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv file: " + path);
  out.precision(17);
  for (int i = 0; i < k.n(); ++i) {
    for (int j = 0; j < k.n(); ++j) {
      if (j) out << ',';
      out << k.entries(i, j);
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing csv file: " + path);
}

}  // namespace asymdiff
