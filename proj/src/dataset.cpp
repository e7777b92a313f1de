#include "asymdiff/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace asymdiff {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::array<double, 3> sphere_point(double u, double v) {
  return {std::cos(u) * std::sin(v), std::sin(u) * std::sin(v), std::cos(v)};
}

std::array<double, 3> mobius_point(double u, double v) {
  double r = 1.0 + 0.5 * v * std::cos(0.5 * u);
  return {r * std::cos(u), r * std::sin(u), 0.5 * v * std::sin(0.5 * u)};
}

namespace {

PointCloud sample_surface(int n, std::uint64_t seed, double u_lo, double u_hi,
                          double v_lo, double v_hi,
                          std::array<double, 3> (*map)(double, double)) {
  if (n <= 0) throw UsageError("point count must be positive");
  Rng rng(seed);
  std::vector<std::pair<double, double>> params(n);
  for (auto& uv : params) {
    uv.first = rng.uniform(u_lo, u_hi);
    uv.second = rng.uniform(v_lo, v_hi);
  }
  // Index points along the periodic coordinate u so that sample order follows
  // the surface's rotational direction; the discrete Fourier modes over the
  // index then sample harmonics of u instead of an arbitrary permutation.
  std::stable_sort(params.begin(), params.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  PointCloud cloud;
  cloud.points.resize(n, 3);
  cloud.labels.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    auto [u, v] = params[i];
    auto p = map(u, v);
    cloud.points(i, 0) = p[0];
    cloud.points(i, 1) = p[1];
    cloud.points(i, 2) = p[2];
    cloud.labels(i, 0) = u;
    cloud.labels(i, 1) = v;
  }
  return cloud;
}

}  // namespace

PointCloud generate_sphere(int n, std::uint64_t seed) {
  return sample_surface(n, seed, 0.0, kPi, 0.0, 2.0 * kPi, sphere_point);
}

PointCloud generate_mobius(int n, std::uint64_t seed) {
  return sample_surface(n, seed, 0.0, 2.0 * kPi, -0.5, 0.5, mobius_point);
}

void validate(const ScalarGrid& grid) {
  if (grid.width <= 0 || grid.height <= 0)
    throw DataError("scalar grid has empty dimensions");
  if (grid.values.rows() != grid.height || grid.values.cols() != grid.width ||
      grid.mask.rows() != grid.height || grid.mask.cols() != grid.width)
    throw DataError("scalar grid shape mismatch");
  if (!grid.mask.any()) throw DataError("scalar grid mask is entirely off");
  for (int r = 0; r < grid.height; ++r)
    for (int c = 0; c < grid.width; ++c)
      if (grid.mask(r, c) && !std::isfinite(grid.values(r, c)))
        throw DataError("non-finite value at masked-on cell (" +
                        std::to_string(r) + "," + std::to_string(c) + ")");
}

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string next_pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw DataError("truncated PGM header");
  return tok;
}

int parse_pgm_int(std::istream& in, const char* what) {
  std::string tok = next_pgm_token(in);
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw DataError(std::string("bad PGM ") + what + ": '" + tok + "'");
  return value;
}

}  // namespace

ScalarGrid load_grayscale_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image file: " + path);
  std::string magic = next_pgm_token(in);
  if (magic != "P2" && magic != "P5")
    throw DataError("unsupported image format (expected PGM P2/P5): " + path);
  int width = parse_pgm_int(in, "width");
  int height = parse_pgm_int(in, "height");
  int maxval = parse_pgm_int(in, "maxval");
  if (width <= 0 || height <= 0) throw DataError("empty PGM image: " + path);
  if (maxval <= 0 || maxval > 65535)
    throw DataError("PGM maxval out of range: " + std::to_string(maxval));

  ScalarGrid grid;
  grid.width = width;
  grid.height = height;
  grid.values.resize(height, width);
  grid.mask.setConstant(height, width, true);

  if (magic == "P2") {
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        int px = parse_pgm_int(in, "pixel");
        if (px < 0 || px > maxval) throw DataError("PGM pixel out of range");
        grid.values(r, c) = static_cast<double>(px) / maxval;
      }
  } else {
    // P5: pixels follow a single whitespace byte after maxval.
    int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<size_t>(width) * height *
                                   bytes);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw DataError("truncated PGM pixel data: " + path);
    size_t idx = 0;
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        int px = buf[idx++];
        if (bytes == 2) px = (px << 8) | buf[idx++];  // big-endian per spec
        if (px > maxval) throw DataError("PGM pixel out of range");
        grid.values(r, c) = static_cast<double>(px) / maxval;
      }
  }
  return grid;
}

void write_pgm(const std::string& path, const Eigen::MatrixXd& values,
               int maxval) {
  if (maxval <= 0 || maxval > 65535)
    throw UsageError("PGM maxval out of range");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image file: " + path);
  int height = static_cast<int>(values.rows());
  int width = static_cast<int>(values.cols());
  out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
  int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf;
  buf.reserve(static_cast<size_t>(width) * height * bytes);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      double v = values(r, c);
      if (!std::isfinite(v)) v = 0.0;
      v = std::min(1.0, std::max(0.0, v));
      int px = static_cast<int>(std::lround(v * maxval));
      if (bytes == 2) buf.push_back(static_cast<unsigned char>(px >> 8));
      buf.push_back(static_cast<unsigned char>(px & 0xff));
    }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("failed writing image file: " + path);
}

ScalarGrid load_scalar_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file: " + path);
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> masks;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    std::vector<double> row;
    std::vector<bool> mask_row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      size_t a = field.find_first_not_of(" \t");
      size_t b = field.find_last_not_of(" \t");
      std::string body =
          a == std::string::npos ? "" : field.substr(a, b - a + 1);
      std::string lower = body;
      for (auto& ch : lower) ch = static_cast<char>(std::tolower(ch));
      if (body.empty() || lower == "nan") {
        row.push_back(kNaN);
        mask_row.push_back(false);
        continue;
      }
      try {
        size_t pos = 0;
        double v = std::stod(body, &pos);
        if (pos != body.size()) throw std::invalid_argument(body);
        row.push_back(v);
        mask_row.push_back(true);
      } catch (const std::exception&) {
        throw DataError("non-numeric csv field '" + body + "' in " + path);
      }
    }
    if (line.size() > 0 && line.back() == ',') {  // trailing empty field
      row.push_back(kNaN);
      mask_row.push_back(false);
    }
    if (!row.empty()) {
      rows.push_back(std::move(row));
      masks.push_back(std::move(mask_row));
    }
  }
  if (rows.empty()) throw DataError("empty csv file: " + path);
  size_t width = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != width)
      throw DataError("ragged csv rows in " + path + ": expected " +
                      std::to_string(width) + " fields, got " +
                      std::to_string(r.size()));

  ScalarGrid grid;
  grid.height = static_cast<int>(rows.size());
  grid.width = static_cast<int>(width);
  grid.values.resize(grid.height, grid.width);
  grid.mask.resize(grid.height, grid.width);
  for (int r = 0; r < grid.height; ++r)
    for (int c = 0; c < grid.width; ++c) {
      grid.values(r, c) = rows[r][c];
      grid.mask(r, c) = masks[r][c];
    }
  validate(grid);
  return grid;
}

namespace {

struct Bump {
  double cx, cy, amp, spread;
};

double bump_field(const std::vector<Bump>& bumps, double x, double y) {
  double v = 0.0;
  for (const auto& b : bumps) {
    double dx = x - b.cx, dy = y - b.cy;
    v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.spread * b.spread));
  }
  return v;
}

// Perturbation amplitude for a year tag: zero at/below the year-2000
// baseline, growing linearly above it; non-numeric tags hash to [0.25, 1.25).
double tag_amplitude(const std::string& tag) {
  int year = 0;
  auto [ptr, ec] = std::from_chars(tag.data(), tag.data() + tag.size(), year);
  if (ec == std::errc() && ptr == tag.data() + tag.size())
    return 0.06 * std::max(0, year - 2000);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : tag) h = (h ^ ch) * 1099511628211ull;
  return 0.25 + static_cast<double>(h % 1000) / 1000.0;
}

}  // namespace

ScalarGrid synth_temperature_field(int width, int height,
                                   const std::string& year_tag,
                                   std::uint64_t seed) {
  if (width <= 0 || height <= 0)
    throw UsageError("temperature field dimensions must be positive");

  Rng rng(seed);
  // Base pattern: smooth bumps around a 20-degree level. Draw order is fixed
  // so the base is identical for every year_tag with the same seed.
  std::vector<Bump> base;
  for (int i = 0; i < 6; ++i) {
    Bump b;
    b.cx = rng.uniform(0.0, width);
    b.cy = rng.uniform(0.0, height);
    b.amp = rng.uniform(-8.0, 8.0);
    b.spread = rng.uniform(0.15, 0.45) * std::max(width, height);
    base.push_back(b);
  }
  // Localized, strictly non-negative perturbation shape (scaled by the tag).
  std::vector<Bump> pert;
  for (int i = 0; i < 3; ++i) {
    Bump b;
    b.cx = rng.uniform(0.2 * width, 0.8 * width);
    b.cy = rng.uniform(0.2 * height, 0.8 * height);
    b.amp = rng.uniform(0.5, 2.0);
    b.spread = rng.uniform(0.05, 0.15) * std::max(width, height);
    pert.push_back(b);
  }
  // Irregular country-ish mask: wobbled ellipse around the grid center.
  double wobble_a = rng.uniform(0.0, 2.0 * kPi);
  double wobble_b = rng.uniform(0.0, 2.0 * kPi);
  double rx = 0.38 * width, ry = 0.38 * height;

  double amp = tag_amplitude(year_tag);
  ScalarGrid grid;
  grid.width = width;
  grid.height = height;
  grid.values.setConstant(height, width, kNaN);
  grid.mask.setConstant(height, width, false);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      double x = c + 0.5, y = r + 0.5;
      double ang = std::atan2(y - 0.5 * height, x - 0.5 * width);
      double edge = 1.0 + 0.22 * std::sin(3.0 * ang + wobble_a) +
                    0.14 * std::cos(5.0 * ang + wobble_b);
      double ex = (x - 0.5 * width) / rx, ey = (y - 0.5 * height) / ry;
      if (ex * ex + ey * ey <= edge) {
        grid.mask(r, c) = true;
        grid.values(r, c) =
            20.0 + bump_field(base, x, y) + amp * bump_field(pert, x, y);
      }
    }
  // The center cell is always inside the ellipse; keep the guarantee explicit.
  if (!grid.mask.any()) {
    grid.mask(height / 2, width / 2) = true;
    grid.values(height / 2, width / 2) = 20.0;
  }
  validate(grid);
  return grid;
}

}  // namespace asymdiff
