#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>

#include "asymdiff/common.hpp"

namespace asymdiff {

// A finite point set in R^dim, one point per row, with optional per-point
// parameter labels (e.g. the (u,v) surface parameters that generated it).
struct PointCloud {
  Eigen::MatrixXd points;  // n x dim
  Eigen::MatrixXd labels;  // n x L, or 0x0 when absent

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  bool has_labels() const { return labels.size() > 0; }
};

// Pure parametrizations (unit sphere and Mobius band); exposed so tests can
// check the maps independently of the sampler.
//   sphere: u in [0,pi], v in [0,2pi]
//   mobius: u in [0,2pi], v in [-1/2,1/2]
std::array<double, 3> sphere_point(double u, double v);
std::array<double, 3> mobius_point(double u, double v);

// Parameter-uniform samplers. Draw order is pinned (per point: u then v) so
// a seed fully determines the cloud. Labels hold (u, v). Reject n <= 0.
PointCloud generate_sphere(int n, std::uint64_t seed);
PointCloud generate_mobius(int n, std::uint64_t seed);

// A 2-D scalar field with a validity mask. values(r, c) must be finite
// wherever mask(r, c) is true; masked-off cells carry NaN. At least one cell
// is masked-on.
struct ScalarGrid {
  int width = 0;   // columns
  int height = 0;  // rows
  Eigen::MatrixXd values;                             // height x width
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // height x width

  int masked_count() const { return static_cast<int>(mask.count()); }
};

// Throws DataError if the grid violates its invariants.
void validate(const ScalarGrid& grid);

// Grayscale image IO. load_grayscale_image reads PGM (P2 ascii or P5 binary,
// maxval <= 65535, '#' comments allowed) and scales pixels into [0, 1] as
// pixel/maxval with an all-true mask. write_pgm quantizes values from [0, 1]
// back to the given maxval (values clamped; masked-off cells write 0).
ScalarGrid load_grayscale_image(const std::string& path);
void write_pgm(const std::string& path, const Eigen::MatrixXd& values,
               int maxval = 255);

// CSV loader for scalar fields: rows of comma-separated numbers. An empty
// field or a (case-insensitive) "nan" marks a masked-off cell; ragged rows or
// non-numeric fields are data errors.
ScalarGrid load_scalar_csv(const std::string& path);

// Synthetic temperature-style field: a smooth seeded base pattern inside an
// irregular mask, plus a non-negative localized perturbation whose amplitude
// grows monotonically with a numeric year_tag (tags <= "2000" give amplitude
// zero; non-numeric tags hash to a fixed amplitude). Same (seed, year_tag)
// always reproduces the same grid; two tags differ only in the perturbed
// region.
ScalarGrid synth_temperature_field(int width, int height,
                                   const std::string& year_tag,
                                   std::uint64_t seed);

}  // namespace asymdiff
