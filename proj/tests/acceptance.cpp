// Acceptance gate: twelve numbered end-to-end criteria, one [PASS]/[FAIL]
// line each, nonzero exit when any fails. Tolerances are pinned next to each
// check. Criterion 9 times real decompositions, so the whole binary runs
// serially; everything else is deterministic.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "asymdiff/basis.hpp"
#include "asymdiff/common.hpp"
#include "asymdiff/dataset.hpp"
#include "asymdiff/diffusion.hpp"
#include "asymdiff/experiments.hpp"
#include "asymdiff/kernel.hpp"
#include "asymdiff/oracle.hpp"
#include "fixtures.hpp"

using namespace asymdiff;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

struct Fixture {
  std::string name;
  KernelMatrix kernel;
};

// The shared kernel family: every criterion that says "all fixtures" walks
// this list (two geometric kernels at n=64, three random asymmetric sizes,
// one image kernel).
std::vector<Fixture> fixture_family() {
  std::vector<Fixture> out;
  out.push_back(
      {"sphere64", markov_normalize(gaussian_kernel(generate_sphere(64, 7), 1.0))});
  out.push_back({"mobius64", sign_weighted_gaussian(generate_mobius(64, 11))});
  out.push_back({"rand8", fixtures::random_kernel(8, 21)});
  out.push_back({"rand16", fixtures::random_kernel(16, 22)});
  out.push_back({"rand32", fixtures::random_kernel(32, 23)});
  out.push_back({"image32", image_kernel(fixtures::synth_image(32, 9))});
  return out;
}

// 1. inverse(forward(K)) = K within 1e-10 max-abs on every fixture, < 5 s.
bool crit_reconstruction(std::string& note) {
  double t0 = now_s();
  double worst = 0.0;
  for (const Fixture& f : fixture_family()) {
    Basis fb = fourier_basis(f.kernel.n());
    Reconstruction rec = inverse_transform(forward_transform(f.kernel, fb), fb);
    worst = std::max(worst,
                     (rec.values - f.kernel.entries).cwiseAbs().maxCoeff());
  }
  double elapsed = now_s() - t0;
  note = "max|K - inv(fwd K)| = " + sci(worst) + " (tol 1e-10), " +
         sci(elapsed) + " s (budget 5 s)";
  return worst <= 1e-10 && elapsed < 5.0;
}

// 2. f at full radii equals the brute-force squared row distance within
// 1e-8 relative, on every pair of every fixture.
bool crit_brute_force(std::string& note) {
  double worst = 0.0;
  long pairs = 0;
  for (const Fixture& f : fixture_family()) {
    int n = f.kernel.n();
    int full = max_radius(n);
    Basis fb = fourier_basis(n);
    CoefficientGrid c = forward_transform(f.kernel, fb);
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) {
        double brute =
            (f.kernel.entries.row(x) - f.kernel.entries.row(y)).squaredNorm();
        double repr = f_repr(c, c, fb, x, y, full, full);
        worst = std::max(worst,
                         std::abs(repr - brute) / std::max(brute, 1e-12));
        ++pairs;
      }
  }
  note = "max rel err = " + sci(worst) + " over " + std::to_string(pairs) +
         " pairs (tol 1e-8)";
  return worst <= 1e-8;
}

// 3. coeff_power at full inner radius equals forward_transform of the exact
// matrix power, t in {1..4}, asymmetric fixtures up to n=32.
bool crit_coeff_power(std::string& note) {
  double worst = 0.0;
  for (int n : {8, 16, 32}) {
    KernelMatrix k = fixtures::random_kernel(n, 20 + n);
    Basis fb = fourier_basis(n);
    GramTwist g = gram_twist(fb);
    CoefficientGrid c = forward_transform(k, fb);
    for (int t = 1; t <= 4; ++t) {
      CoefficientGrid viaCoeff =
          coeff_power(c, g, DiffusionTime{t}, max_radius(n));
      KernelMatrix pk;
      pk.entries = matrix_power(k.entries, t);
      CoefficientGrid viaMatrix = forward_transform(pk, fb);
      worst = std::max(
          worst, (viaCoeff.coeffs - viaMatrix.coeffs).cwiseAbs().maxCoeff());
    }
  }
  note = "max abs gap = " + sci(worst) + " (tol 1e-8), t in {1..4}";
  return worst <= 1e-8;
}

// 4. Squared global distance equals ||K_g^t - K_b^t||_F^2 within 1e-8
// relative, t in {1,2}, n up to 32.
bool crit_global_parseval(std::string& note) {
  double worst = 0.0;
  for (int n : {8, 16, 32}) {
    KernelMatrix kg = fixtures::random_kernel(n, 20 + n);
    KernelMatrix kb = fixtures::random_kernel(n, 30 + n);
    Basis fb = fourier_basis(n);
    GramTwist g = gram_twist(fb);
    CoefficientGrid cg = forward_transform(kg, fb);
    CoefficientGrid cb = forward_transform(kb, fb);
    for (int t : {1, 2}) {
      double lhs = global_distance_sq(cg, cb, g, DiffusionTime{t});
      double rhs = (matrix_power(kg.entries, t) - matrix_power(kb.entries, t))
                       .squaredNorm();
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
  }
  note = "max rel gap = " + sci(worst) + " (tol 1e-8), t in {1,2}";
  return worst <= 1e-8;
}

// 5. Pairwise squared embedding distances replay f exactly (1e-12) across a
// truncation sweep on n=32 fixtures.
bool crit_embedding_identity(std::string& note) {
  std::vector<Fixture> fixtures_32;
  fixtures_32.push_back(
      {"sphere32", markov_normalize(gaussian_kernel(generate_sphere(32, 7), 1.0))});
  fixtures_32.push_back(
      {"rand32", markov_normalize(fixtures::random_kernel(32, 23))});
  const std::vector<std::pair<int, int>> boxes = {
      {16, 16}, {16, 4}, {8, 12}, {4, 4}, {1, 16}};
  double worst = 0.0;
  for (const Fixture& f : fixtures_32) {
    int n = f.kernel.n();
    Basis fb = fourier_basis(n);
    GramTwist g = gram_twist(fb);
    CoefficientGrid c = forward_transform(f.kernel, fb);
    for (int t : {1, 2}) {
      CoefficientGrid h = coeff_power(c, g, DiffusionTime{t}, max_radius(n));
      for (auto [k1, k2] : boxes) {
        TruncationParams p{k1, k2, max_radius(n)};
        Embedding e = embed(c, fb, g, DiffusionTime{t}, p);
        for (int x = 0; x < n; ++x)
          for (int y = x + 1; y < n; ++y) {
            double d2 = embedding_distance_sq(e, x, y);
            double fxy = f_repr(h, h, fb, x, y, k1, k2);
            worst = std::max(worst,
                             std::abs(d2 - fxy) / std::max(1.0, fxy));
          }
      }
    }
  }
  note = "max gap = " + sci(worst) + " (tol 1e-12) over " +
         std::to_string(boxes.size()) + " boxes, t in {1,2}";
  return worst <= 1e-12;
}

// 6. Empirical deviation of f under coefficient perturbations never exceeds
// the modulus-of-continuity bound M (E^2 + 2 (|a|_1 + |b|_1) E), where E is
// the entrywise-modulus distance between the perturbed and original grids
// and M the squared uniform basis bound (1/n for Fourier).
bool crit_continuity_bound(std::string& note) {
  const int n = 16;
  Basis fb = fourier_basis(n);
  CoefficientGrid a = forward_transform(fixtures::random_kernel(n, 41), fb);
  CoefficientGrid b = forward_transform(fixtures::random_kernel(n, 42), fb);
  double m_const = fb.uniform_bound * fb.uniform_bound;
  double a1 = a.coeffs.cwiseAbs().sum(), b1 = b.coeffs.cwiseAbs().sum();
  const std::vector<std::pair<int, int>> boxes = {{8, 8}, {4, 4}, {2, 2}};

  // f(a, b, x, y) for every pair and box, computed once.
  std::vector<Eigen::MatrixXd> base(boxes.size());
  for (size_t bi = 0; bi < boxes.size(); ++bi) {
    base[bi].resize(n, n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        base[bi](x, y) =
            f_repr(a, b, fb, x, y, boxes[bi].first, boxes[bi].second);
  }

  Rng rng(4242);
  double worst_margin = 1.0;  // min over trials of (bound - dev) / bound
  for (double delta : {1e-3, 1e-2, 1e-1}) {
    for (int rep = 0; rep < 100; ++rep) {
      CoefficientGrid c = a, d = b;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          c.coeffs(i, j) += std::complex<double>(rng.uniform(-delta, delta),
                                                 rng.uniform(-delta, delta));
          d.coeffs(i, j) += std::complex<double>(rng.uniform(-delta, delta),
                                                 rng.uniform(-delta, delta));
        }
      double e1 = (c.coeffs - a.coeffs).cwiseAbs().sum() +
                  (d.coeffs - b.coeffs).cwiseAbs().sum();
      double bound = m_const * (e1 * e1 + 2.0 * (a1 + b1) * e1);
      for (size_t bi = 0; bi < boxes.size(); ++bi)
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y) {
            double dev = std::abs(
                f_repr(c, d, fb, x, y, boxes[bi].first, boxes[bi].second) -
                base[bi](x, y));
            worst_margin = std::min(worst_margin, (bound - dev) / bound);
            if (dev > bound) {
              note = "deviation " + sci(dev) + " exceeds bound " + sci(bound) +
                     " at delta " + sci(delta);
              return false;
            }
          }
    }
  }
  note = "bound held on 300 perturbations x 3 boxes; slimmest margin " +
         sci(worst_margin) + " of the bound";
  return true;
}

// 7. Max-over-pairs error of f_{k,k} against brute force reaches <= 1e-8 at
// the full radius, and the curve's final value is its minimum.
bool crit_truncation_convergence(std::string& note) {
  double worst_final = 0.0;
  for (const Fixture& f : fixture_family()) {
    int n = f.kernel.n();
    int full = max_radius(n);
    Basis fb = fourier_basis(n);
    CoefficientGrid c = forward_transform(f.kernel, fb);
    std::vector<double> curve;
    for (int k = 0; k <= full; ++k) {
      Eigen::MatrixXcd rows = projected_rows_all(c, fb, k);
      std::vector<int> cols = box_indices(n, k, IndexConvention::centered);
      double err = 0.0;
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
          double acc = 0.0;
          for (int m2 : cols) acc += std::norm(rows(x, m2) - rows(y, m2));
          double brute = (f.kernel.entries.row(x) - f.kernel.entries.row(y))
                             .squaredNorm();
          err = std::max(err, std::abs(acc - brute));
        }
      curve.push_back(err);
    }
    worst_final = std::max(worst_final, curve.back());
    for (double e : curve)
      if (curve.back() > e) {
        note = "final error " + sci(curve.back()) +
               " is not the curve minimum on " + f.name;
        return false;
      }
  }
  note = "max final error = " + sci(worst_final) +
         " (tol 1e-8); every curve bottoms out at full radius";
  return worst_final <= 1e-8;
}

// 8. Spectral path with the squared-eigenvalue exponent equals brute force
// within 1e-8 relative on symmetric Markov kernels; the classically printed
// exponent's discrepancy is reported, not asserted.
bool crit_spectral_oracle(std::string& note) {
  std::vector<Fixture> sym;
  sym.push_back(
      {"sphere64", markov_normalize(gaussian_kernel(generate_sphere(64, 7), 1.0))});
  sym.push_back({"sym16", markov_normalize(fixtures::random_symmetric_kernel(16, 25))});
  sym.push_back({"sym48", markov_normalize(fixtures::random_symmetric_kernel(48, 26))});
  double worst = 0.0, printed_gap = 0.0;
  for (const Fixture& f : sym) {
    int n = f.kernel.n();
    SpectralDecomp sd = spectral_decompose(f.kernel);
    for (int t : {1, 2}) {
      KernelMatrix pk;
      pk.entries = matrix_power(f.kernel.entries, t);
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
          double brute = brute_distance_sq(pk, DiffusionTime{1}, x, y);
          double exact = spectral_distance_sq(sd, DiffusionTime{t}, x, y,
                                              SpectralExponent::exact);
          double printed = spectral_distance_sq(sd, DiffusionTime{t}, x, y,
                                                SpectralExponent::printed);
          double guard = std::max(brute, 1e-12);
          worst = std::max(worst, std::abs(exact - brute) / guard);
          printed_gap =
              std::max(printed_gap, std::abs(printed - brute) / guard);
        }
    }
  }
  note = "exact exponent rel err = " + sci(worst) +
         " (tol 1e-8); printed exponent deviates by up to " +
         sci(printed_gap) + " (reported only)";
  return worst <= 1e-8;
}

// 9. Forward FFT transform beats the SVD decomposition at every size, by
// >= 5x at n=1024, with log-log slopes <= 2.6 (fft) and >= 2.5 (svd).
bool crit_performance(std::string& note) {
  double t0 = now_s();
  std::vector<double> ns, fft_s, svd_s;
  for (int n : {256, 512, 1024, 2048}) {
    KernelMatrix k = fixtures::random_kernel(n, 100 + n);
    Basis fb = fourier_basis(n);
    CoefficientGrid c;
    fft_s.push_back(time_best_of([&] { c = forward_transform(k, fb); }));
    SvdDecomp sd;
    svd_s.push_back(time_best_of([&] { sd = svd_decompose(k); }));
    ns.push_back(n);
  }
  double elapsed = now_s() - t0;
  bool faster = true;
  for (size_t i = 0; i < ns.size(); ++i) faster = faster && fft_s[i] < svd_s[i];
  double ratio1024 = svd_s[2] / fft_s[2];
  double slope_fft = loglog_slope(ns, fft_s);
  double slope_svd = loglog_slope(ns, svd_s);
  note = "fft < svd at every n: " + std::string(faster ? "yes" : "NO") +
         "; ratio@1024 = " + sci(ratio1024) + " (need >= 5); slopes fft " +
         sci(slope_fft) + " (<= 2.6) svd " + sci(slope_svd) + " (>= 2.5); " +
         sci(elapsed) + " s (budget 600 s)";
  return faster && ratio1024 >= 5.0 && slope_fft <= 2.6 && slope_svd >= 2.5 &&
         elapsed < 600.0;
}

// 10. The default band run recovers the rotation coordinate: the Fourier
// first coordinate's circular correlation with the u harmonic exceeds the
// SVD baseline's.
bool crit_rotation_detection(std::string& note) {
  ExperimentConfig cfg;
  cfg.experiment = "mobius";
  cfg.out_dir = (std::filesystem::temp_directory_path() /
                 "asymdiff_acceptance_mobius")
                    .string();
  MobiusSummary s = cmd_mobius(cfg);  // defaults: n = 300
  note = "fourier harmonic corr = " + sci(s.fourier_correlation) +
         " vs svd " + sci(s.svd_correlation) + " at n=300";
  return s.fourier_correlation > s.svd_correlation;
}

// 11. With one synthetic perturbation cellwise-dominating another, the
// global distances from the shared reference order the same way.
bool crit_field_ordering(std::string& note) {
  ScalarGrid ref = synth_temperature_field(16, 16, "2000", 5);
  ScalarGrid a = synth_temperature_field(16, 16, "2010", 5);
  ScalarGrid b = synth_temperature_field(16, 16, "2018", 5);
  // Precondition of the claim: pert(b) dominates pert(a) cellwise.
  bool dominates = true, strict = false;
  for (int r = 0; r < ref.height; ++r)
    for (int c = 0; c < ref.width; ++c)
      if (ref.mask(r, c)) {
        double pa = a.values(r, c) - ref.values(r, c);
        double pb = b.values(r, c) - ref.values(r, c);
        dominates = dominates && pb >= pa - 1e-15;
        strict = strict || pb > pa + 1e-12;
      }
  KernelMatrix kr = temperature_kernel(ref);
  int n = kr.n();
  Basis fb = fourier_basis(n);
  GramTwist g = gram_twist(fb);
  CoefficientGrid cr = forward_transform(kr, fb);
  CoefficientGrid ca = forward_transform(temperature_kernel(a), fb);
  CoefficientGrid cb = forward_transform(temperature_kernel(b), fb);
  double da = std::sqrt(global_distance_sq(cr, ca, g, DiffusionTime{1}));
  double db = std::sqrt(global_distance_sq(cr, cb, g, DiffusionTime{1}));
  note = "sqrt global: dominated " + sci(da) + " < dominating " + sci(db) +
         " (cellwise domination " + (dominates && strict ? "holds" : "FAILS") +
         ")";
  return dominates && strict && db > da;
}

// 12. The weak pipeline agrees with the full dynamic representation at the
// full radius and with the truncated-kernel brute force below it.
bool crit_weak_pipeline(std::string& note) {
  double worst_full = 0.0, worst_trunc = 0.0;
  for (int n : {8, 16}) {
    KernelMatrix kg = fixtures::random_kernel(n, 50 + n);
    KernelMatrix kb = fixtures::random_kernel(n, 60 + n);
    Basis fb = fourier_basis(n);
    GramTwist g = gram_twist(fb);
    CoefficientGrid cg = forward_transform(kg, fb);
    CoefficientGrid cb = forward_transform(kb, fb);
    int full = max_radius(n);
    for (int t : {1, 2}) {
      CoefficientGrid hg = coeff_power(cg, g, DiffusionTime{t}, full);
      CoefficientGrid hb = coeff_power(cb, g, DiffusionTime{t}, full);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          double weak =
              weak_pipeline_distance_sq(cg, cb, fb, DiffusionTime{t}, full, x, y);
          double ref = f_repr(hg, hb, fb, x, y, full, full);
          worst_full = std::max(
              worst_full, std::abs(weak - ref) / std::max(1.0, std::abs(ref)));
        }
      for (int k = 2; k < full; k += 2) {
        Eigen::MatrixXd tg = matrix_power(
            inverse_transform(truncate(cg, k, k), fb).values, t);
        Eigen::MatrixXd tb = matrix_power(
            inverse_transform(truncate(cb, k, k), fb).values, t);
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y) {
            double weak = weak_pipeline_distance_sq(cg, cb, fb,
                                                    DiffusionTime{t}, k, x, y);
            double brute = (tg.row(x) - tb.row(y)).squaredNorm();
            worst_trunc =
                std::max(worst_trunc,
                         std::abs(weak - brute) / std::max(1.0, brute));
          }
      }
    }
  }
  note = "full-radius gap = " + sci(worst_full) + ", truncated gap = " +
         sci(worst_trunc) + " (tol 1e-8), n in {8,16}, t in {1,2}";
  return worst_full <= 1e-8 && worst_trunc <= 1e-8;
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    bool (*fn)(std::string&);
  };
  const Criterion criteria[] = {
      {"reconstruction exactness", crit_reconstruction},
      {"representation = brute force", crit_brute_force},
      {"coefficient power identity", crit_coeff_power},
      {"global distance Parseval", crit_global_parseval},
      {"embedding distance identity", crit_embedding_identity},
      {"continuity bound", crit_continuity_bound},
      {"truncation convergence", crit_truncation_convergence},
      {"spectral oracle agreement", crit_spectral_oracle},
      {"fft vs svd performance", crit_performance},
      {"rotation detection", crit_rotation_detection},
      {"field change ordering", crit_field_ordering},
      {"weak pipeline consistency", crit_weak_pipeline},
  };

  double t0 = now_s();
  int failures = 0;
  int idx = 0;
  for (const Criterion& c : criteria) {
    ++idx;
    std::string note;
    bool ok = false;
    try {
      ok = c.fn(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("[%s] %2d. %-30s %s\n", ok ? "PASS" : "FAIL", idx, c.label,
                note.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/12 criteria passed (%.1f s)\n", 12 - failures,
              now_s() - t0);
  return failures == 0 ? 0 : 1;
}
