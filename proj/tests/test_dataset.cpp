#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "asymdiff/dataset.hpp"
#include "fixtures.hpp"

using namespace asymdiff;

namespace {
const double kPi = 3.14159265358979323846;

std::string temp_path(const char* name) {
  return std::string("asymdiff_test_") + name;
}
}  // namespace

TEST_CASE("sphere parametrization maps poles and equator correctly") {
  // v is the polar angle: v=0 gives the north pole regardless of u.
  auto p = sphere_point(0.7, 0.0);
  CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(1.0).epsilon(1e-12));
  auto q = sphere_point(0.0, kPi / 2);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[2] == doctest::Approx(0.0));
}

TEST_CASE("mobius parametrization hits the reference point") {
  auto p = mobius_point(0.0, 0.0);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(0.0));
}

TEST_CASE("sphere samples are unit norm") {
  PointCloud c = generate_sphere(1, 42);
  CHECK(c.n() == 1);
  CHECK(c.points.row(0).norm() == doctest::Approx(1.0).epsilon(1e-12));

  PointCloud big = generate_sphere(512, 7);
  for (int i = 0; i < big.n(); ++i)
    CHECK(std::abs(big.points.row(i).norm() - 1.0) < 1e-12);
}

TEST_CASE("samplers are deterministic in the seed and reject n <= 0") {
  PointCloud a = generate_sphere(100, 1);
  PointCloud b = generate_sphere(100, 1);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.labels - b.labels).cwiseAbs().maxCoeff() == 0.0);
  PointCloud c = generate_sphere(100, 2);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);
  CHECK_THROWS_AS(generate_sphere(0, 1), UsageError);
  CHECK_THROWS_AS(generate_mobius(-3, 1), UsageError);
}

TEST_CASE("samples are indexed in increasing order of u") {
  PointCloud s = generate_sphere(200, 11);
  PointCloud m = generate_mobius(200, 11);
  for (int i = 1; i < 200; ++i) {
    CHECK(s.labels(i, 0) >= s.labels(i - 1, 0));
    CHECK(m.labels(i, 0) >= m.labels(i - 1, 0));
  }
}

TEST_CASE("samples reproduce their parametrization from the stored labels") {
  PointCloud m = generate_mobius(300, 3);
  for (int i = 0; i < m.n(); ++i) {
    auto p = mobius_point(m.labels(i, 0), m.labels(i, 1));
    CHECK(std::abs(p[0] - m.points(i, 0)) < 1e-12);
    CHECK(std::abs(p[1] - m.points(i, 1)) < 1e-12);
    CHECK(std::abs(p[2] - m.points(i, 2)) < 1e-12);
    CHECK(m.labels(i, 0) >= 0.0);
    CHECK(m.labels(i, 0) <= 2 * kPi);
    CHECK(m.labels(i, 1) >= -0.5);
    CHECK(m.labels(i, 1) <= 0.5);
  }
}

TEST_CASE("binary PGM loads with pixel/maxval scaling") {
  std::string path = temp_path("p5.pgm");
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n# a comment\n2 2\n255\n";
    unsigned char px[4] = {0, 255, 255, 0};
    out.write(reinterpret_cast<char*>(px), 4);
  }
  ScalarGrid g = load_grayscale_image(path);
  CHECK(g.width == 2);
  CHECK(g.height == 2);
  CHECK(g.values(0, 0) == 0.0);
  CHECK(g.values(0, 1) == 1.0);
  CHECK(g.values(1, 0) == 1.0);
  CHECK(g.values(1, 1) == 0.0);
  CHECK(g.mask.all());
  std::remove(path.c_str());
}

TEST_CASE("ascii PGM loads and matches the binary reading") {
  std::string path = temp_path("p2.pgm");
  {
    std::ofstream out(path);
    out << "P2\n3 2\n100\n0 50 100\n25 75 100\n";
  }
  ScalarGrid g = load_grayscale_image(path);
  CHECK(g.width == 3);
  CHECK(g.height == 2);
  CHECK(g.values(0, 1) == doctest::Approx(0.5));
  CHECK(g.values(1, 0) == doctest::Approx(0.25));
  std::remove(path.c_str());
}

TEST_CASE("PGM rejects bad magic, truncation and huge maxval") {
  std::string path = temp_path("bad.pgm");
  {
    std::ofstream out(path);
    out << "P7\n2 2\n255\n";
  }
  CHECK_THROWS_AS(load_grayscale_image(path), DataError);
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n2 2\n255\n";
    unsigned char px[2] = {1, 2};  // missing half the pixels
    out.write(reinterpret_cast<char*>(px), 2);
  }
  CHECK_THROWS_AS(load_grayscale_image(path), DataError);
  {
    std::ofstream out(path);
    out << "P2\n1 1\n70000\n3\n";
  }
  CHECK_THROWS_AS(load_grayscale_image(path), DataError);
  CHECK_THROWS_AS(load_grayscale_image("does_not_exist.pgm"), DataError);
  std::remove(path.c_str());
}

TEST_CASE("loaded images round-trip exactly through write_pgm") {
  // A loaded grid holds k/maxval exactly, so re-quantizing reproduces it.
  std::string path = temp_path("rt.pgm");
  ScalarGrid src = fixtures::synth_image(16, 9);
  write_pgm(path, src.values);
  ScalarGrid once = load_grayscale_image(path);
  write_pgm(path, once.values);
  ScalarGrid twice = load_grayscale_image(path);
  CHECK((once.values - twice.values).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("csv loader handles masks, sentinels and errors") {
  std::string path = temp_path("grid.csv");
  {
    std::ofstream out(path);
    out << "1,2\n3,4\n";
  }
  ScalarGrid g = load_scalar_csv(path);
  CHECK(g.width == 2);
  CHECK(g.height == 2);
  CHECK(g.mask.all());
  CHECK(g.values(1, 1) == 4.0);

  {
    std::ofstream out(path);
    out << "1,\n3,4\n";
  }
  g = load_scalar_csv(path);
  CHECK(g.mask(0, 0));
  CHECK(!g.mask(0, 1));
  CHECK(g.mask(1, 0));

  {
    std::ofstream out(path);
    out << "1,NaN\nnan,4\n";
  }
  g = load_scalar_csv(path);
  CHECK(!g.mask(0, 1));
  CHECK(!g.mask(1, 0));
  CHECK(g.masked_count() == 2);

  {
    std::ofstream out(path);
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(load_scalar_csv(path), DataError);

  {
    std::ofstream out(path);
    out << "1,abc\n";
  }
  CHECK_THROWS_AS(load_scalar_csv(path), DataError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_scalar_csv("missing.csv"), DataError);
}

TEST_CASE("scalar grid validation rejects bad shapes and empty masks") {
  ScalarGrid g;
  g.width = 2;
  g.height = 2;
  g.values.setZero(2, 2);
  g.mask.setConstant(2, 2, false);
  CHECK_THROWS_AS(validate(g), DataError);
  g.mask(0, 0) = true;
  CHECK_NOTHROW(validate(g));
  g.values(0, 0) = std::nan("");
  CHECK_THROWS_AS(validate(g), DataError);
}

TEST_CASE("temperature field synthesis is deterministic and tag-sensitive") {
  ScalarGrid a1 = synth_temperature_field(32, 24, "2000", 5);
  ScalarGrid a2 = synth_temperature_field(32, 24, "2000", 5);
  CHECK(a1.masked_count() == a2.masked_count());
  bool identical = true;
  for (int r = 0; r < 24 && identical; ++r)
    for (int c = 0; c < 32; ++c) {
      if (a1.mask(r, c) != a2.mask(r, c)) identical = false;
      if (a1.mask(r, c) && a1.values(r, c) != a2.values(r, c))
        identical = false;
    }
  CHECK(identical);

  ScalarGrid b = synth_temperature_field(32, 24, "2018", 5);
  // Same mask and base pattern, differing only where the perturbation sits.
  CHECK((a1.mask == b.mask).all());
  double max_diff = 0.0;
  int diff_cells = 0;
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 32; ++c)
      if (a1.mask(r, c)) {
        double d = b.values(r, c) - a1.values(r, c);
        CHECK(d >= -1e-12);  // later years only add heat
        if (d > 1e-9) ++diff_cells;
        max_diff = std::max(max_diff, d);
      }
  CHECK(diff_cells > 0);
  CHECK(max_diff > 0.1);

  CHECK_THROWS_AS(synth_temperature_field(0, 10, "2000", 1), UsageError);
}

TEST_CASE("temperature field mask is irregular but non-empty") {
  ScalarGrid g = synth_temperature_field(40, 40, "2010", 11);
  int on = g.masked_count();
  CHECK(on > 0);
  CHECK(on < 40 * 40);  // some cells outside the region
  CHECK_NOTHROW(validate(g));
}
