#include "asymdiff/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "asymdiff/common.hpp"

namespace asymdiff {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory: " + cfg.out_dir);
  return dir;
}

std::ofstream open_text(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  out.precision(17);
  return out;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

// Numerical sanity pass run by default on small problems: round-trip
// reconstruction, per-pair representation distances against brute force, and
// the batched row evaluation against its per-point counterpart.
void self_check(const KernelMatrix& k, const CoefficientGrid& c,
                const Basis& b, DiffusionTime time, std::uint64_t seed,
                json& diag) {
  if (k.n() > 64) {
    diag["self_check"] = {{"checked", false}, {"reason", "n > 64"}};
    return;
  }
  int n = k.n();
  Reconstruction rec = inverse_transform(c, b);
  Eigen::MatrixXd powered =
      time.t == 1 ? k.entries : matrix_power(k.entries, time.t);
  double recon_err = (rec.values - powered).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, powered.cwiseAbs().maxCoeff());
  if (recon_err > 1e-10 * scale)
    throw NumericError("self-check: reconstruction error " +
                       std::to_string(recon_err) + " exceeds tolerance");

  int full = max_radius(n);
  TruncationParams p{full, full, full};
  Rng rng(seed ^ 0x5e1fc4ecull);
  double max_rel = 0.0;
  KernelMatrix pk;
  pk.entries = powered;
  for (int s = 0; s < 8; ++s) {
    int x = static_cast<int>(rng.index(n));
    int y = static_cast<int>(rng.index(n));
    double repr = diffusion_distance_sq_repr(c, b, x, y, p);
    double brute = brute_distance_sq(pk, DiffusionTime{1}, x, y);
    double rel = std::abs(repr - brute) / std::max(brute, 1e-12);
    max_rel = std::max(max_rel, rel);
    if (rel > 1e-8)
      throw NumericError("self-check: representation distance off by " +
                         std::to_string(rel) + " relative at pair (" +
                         std::to_string(x) + "," + std::to_string(y) + ")");
  }
  Eigen::MatrixXcd rows = projected_rows_all(c, b, full);
  double batch_dev = 0.0;
  for (int s = 0; s < 4; ++s) {
    int x = static_cast<int>(rng.index(n));
    Eigen::VectorXcd v = projected_row(c, b, x, full);
    batch_dev = std::max(
        batch_dev, (rows.row(x).transpose() - v).cwiseAbs().maxCoeff());
  }
  if (batch_dev > 1e-9)
    throw NumericError("self-check: batched rows deviate by " +
                       std::to_string(batch_dev));
  diag["self_check"] = {{"checked", true},
                        {"recon_residual", recon_err},
                        {"max_rel_distance_err", max_rel},
                        {"batch_row_deviation", batch_dev}};
}

// Euclidean distances between all point pairs (x < y) over selected embedding
// columns; the flattened distance matrix the correlation gate runs on.
Eigen::VectorXd pair_distance_map(const Eigen::MatrixXcd& comps) {
  int n = static_cast<int>(comps.rows());
  Eigen::VectorXd out(static_cast<long>(n) * (n - 1) / 2);
  long idx = 0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      double acc = 0.0;
      for (int j = 0; j < comps.cols(); ++j)
        acc += std::norm(comps(x, j) - comps(y, j));
      out(idx++) = std::sqrt(acc);
    }
  return out;
}

json config_json(const ExperimentConfig& cfg) {
  return json{{"experiment", cfg.experiment}, {"n", cfg.n},
              {"t", cfg.t},                   {"k1", cfg.k1},
              {"k2", cfg.k2_list},            {"k3", cfg.k3},
              {"two_sigma_sq", cfg.two_sigma_sq},
              {"seed", cfg.seed},             {"inputs", cfg.inputs},
              {"out", cfg.out_dir},           {"self_check", cfg.self_check}};
}

}  // namespace

SphereSummary cmd_sphere(const ExperimentConfig& cfg) {
  int n = cfg.n > 0 ? cfg.n : 512;
  if (n < 4) throw UsageError("sphere experiment needs n >= 4");
  double tss = cfg.two_sigma_sq > 0 ? cfg.two_sigma_sq : 1.0;
  DiffusionTime time{cfg.t};
  validate(time);
  fs::path dir = prepare_out_dir(cfg);
  json diag;
  diag["config"] = config_json(cfg);
  diag["defaults"] = {{"n", n}, {"two_sigma_sq", tss}};

  double t0 = now_seconds();
  PointCloud cloud = generate_sphere(n, cfg.seed);
  KernelMatrix kernel = markov_normalize(gaussian_kernel(cloud, tss));
  double sec_kernel = now_seconds() - t0;

  // Fourier path: coefficients of the t-step kernel, embedded per the
  // coefficient map, then reduced to its two principal coordinates for the
  // 2-D view (the raw coordinates are frequency-indexed, not
  // variance-ordered, so the plotting view is the top-2 MDS scores).
  t0 = now_seconds();
  Basis fb = fourier_basis(n);
  KernelMatrix powered = kernel;
  if (time.t > 1) powered.entries = matrix_power(kernel.entries, time.t);
  CoefficientGrid coeffs = forward_transform(powered, fb);
  GramTwist g = gram_twist(fb);
  int k1 = cfg.k1 >= 0 ? cfg.k1 : max_radius(n);
  int k2 = cfg.k2_list.empty() ? max_radius(n) : cfg.k2_list.front();
  if (k2 < 0 || k2 > max_radius(n))
    throw UsageError("k2 radius " + std::to_string(k2) +
                     " out of range for n=" + std::to_string(n));
  TruncationParams p{k1, k2, cfg.k3 >= 0 ? cfg.k3 : max_radius(n)};
  Embedding emb = embed(coeffs, fb, g, DiffusionTime{1}, p);
  Eigen::MatrixXd four2 = principal_coordinates(emb.vectors, 2);
  double sec_fft = now_seconds() - t0;

  // Spectral path (oracle side): leading nontrivial eigenpair coordinates
  // lambda^t * phi. The top eigenpair (lambda = 1, the volume direction) is
  // stationary and carries no diffusion geometry, so the 2-D view uses the
  // next two.
  t0 = now_seconds();
  SpectralDecomp sd = spectral_decompose(kernel);
  Eigen::MatrixXcd spec2(n, 2);
  for (int j = 0; j < 2; ++j) {
    double lt = std::pow(sd.eigenvalues(j + 1), time.t);
    spec2.col(j) = (lt * sd.eigenvectors.col(j + 1)).cast<std::complex<double>>();
  }
  double sec_eig = now_seconds() - t0;

  Eigen::VectorXd map_f = pair_distance_map(four2.cast<std::complex<double>>());
  Eigen::VectorXd map_e = pair_distance_map(spec2);

  SphereSummary summary;
  summary.correlation = pearson(map_f, map_e);

  // Error/time curve over an n sweep (powers of two up to n). Errors are
  // deterministic and go to bench.csv; seconds go to timings.json.
  std::vector<int> sweep;
  for (int m = 64; m < n; m *= 2) sweep.push_back(m);
  sweep.push_back(n);
  {
    auto bench = open_text(dir / "bench.csv");
    bench << "n,map_rel_error\n";
    for (int m : sweep) {
      PointCloud cl = generate_sphere(m, cfg.seed);
      KernelMatrix km = markov_normalize(gaussian_kernel(cl, tss));
      Basis fbm = fourier_basis(m);
      CoefficientGrid cm;
      double fft_s = time_best_of([&] { cm = forward_transform(km, fbm); });
      SpectralDecomp sdm;
      double eig_s = time_best_of([&] { sdm = spectral_decompose(km); });
      TruncationParams pm{max_radius(m), max_radius(m), max_radius(m)};
      Embedding em = embed(cm, fbm, gram_twist(fbm), time, pm);
      Eigen::MatrixXcd f2 =
          principal_coordinates(em.vectors, 2).cast<std::complex<double>>();
      Eigen::MatrixXcd e2(m, 2);
      for (int j = 0; j < 2; ++j) {
        double lt = std::pow(sdm.eigenvalues(j + 1), time.t);
        e2.col(j) =
            (lt * sdm.eigenvectors.col(j + 1)).cast<std::complex<double>>();
      }
      Eigen::VectorXd mf = pair_distance_map(f2), me = pair_distance_map(e2);
      double err = (mf - me).norm() / std::max(me.norm(), 1e-300);
      summary.sweep_n.push_back(m);
      summary.sweep_err.push_back(err);
      summary.sweep_eig_seconds.push_back(eig_s);
      summary.sweep_fft_seconds.push_back(fft_s);
      bench << m << ',' << err << '\n';
    }
  }

  {
    auto out = open_text(dir / "embedding.csv");
    out << "index,u,v,eig1,eig2,fourier_pc1,fourier_pc2\n";
    for (int i = 0; i < n; ++i) {
      out << i << ',' << cloud.labels(i, 0) << ',' << cloud.labels(i, 1) << ','
          << spec2(i, 0).real() << ',' << spec2(i, 1).real() << ','
          << four2(i, 0) << ',' << four2(i, 1) << '\n';
    }
  }

  diag["correlation"] = summary.correlation;
  json top_eigs = json::array();
  for (int j = 0; j < std::min(n, 4); ++j) top_eigs.push_back(sd.eigenvalues(j));
  diag["eigenvalues_top4"] = top_eigs;
  if (cfg.self_check)
    self_check(powered, coeffs, fb, DiffusionTime{1}, cfg.seed, diag);
  else
    diag["self_check"] = {{"checked", false}, {"reason", "disabled"}};
  write_json(dir / "diagnostics.json", diag);
  write_json(dir / "timings.json",
             json{{"kernel_seconds", sec_kernel},
                  {"fft_path_seconds", sec_fft},
                  {"eig_path_seconds", sec_eig},
                  {"sweep", json{{"n", summary.sweep_n},
                                 {"eig_seconds", summary.sweep_eig_seconds},
                                 {"fft_seconds", summary.sweep_fft_seconds}}},
                  {"machine", machine_info()}});
  return summary;
}

MobiusSummary cmd_mobius(const ExperimentConfig& cfg) {
  int n = cfg.n > 0 ? cfg.n : 300;
  if (n < 4) throw UsageError("mobius experiment needs n >= 4");
  DiffusionTime time{cfg.t};
  validate(time);
  fs::path dir = prepare_out_dir(cfg);
  json diag;
  diag["config"] = config_json(cfg);
  diag["defaults"] = {{"n", n}};

  double t0 = now_seconds();
  PointCloud cloud = generate_mobius(n, cfg.seed);
  KernelMatrix weighted = sign_weighted_gaussian(cloud);
  KernelMatrix kernel = markov_normalize(weighted);
  double sec_kernel = now_seconds() - t0;

  MobiusSummary summary;
  summary.asymmetry = (weighted.entries - weighted.entries.transpose()).norm() /
                      weighted.entries.norm();
  double asym_markov = (kernel.entries - kernel.entries.transpose()).norm() /
                       kernel.entries.norm();

  t0 = now_seconds();
  Basis fb = fourier_basis(n);
  KernelMatrix powered = kernel;
  if (time.t > 1) powered.entries = matrix_power(kernel.entries, time.t);
  CoefficientGrid coeffs = forward_transform(powered, fb);
  int k1 = cfg.k1 >= 0 ? cfg.k1 : max_radius(n);
  int k2 = cfg.k2_list.empty() ? 1 : cfg.k2_list.front();
  if (k2 < 1 || k2 > max_radius(n))
    throw UsageError("mobius experiment needs 1 <= k2 <= " +
                     std::to_string(max_radius(n)));
  TruncationParams p{k1, k2, cfg.k3 >= 0 ? cfg.k3 : max_radius(n)};
  Embedding emb = embed(coeffs, fb, gram_twist(fb), DiffusionTime{1}, p);
  double sec_fft = now_seconds() - t0;

  t0 = now_seconds();
  SvdDecomp svd = svd_decompose(powered);
  Eigen::MatrixXd svd2 = svd_embedding(svd, 2);
  double sec_svd = now_seconds() - t0;

  // Rotation recovery: each path's first coordinate against a period-1
  // harmonic of the band coordinate u (Mardia circular-linear correlation).
  // The Fourier path's first coordinate is the m2 = +1 harmonic component
  // (m2 = 0 is the volume direction); the SVD path's is its leading singular
  // coordinate.
  Eigen::VectorXd u = cloud.labels.col(0);
  int dc_col = emb.params.k2;  // columns run m2 = -k2 .. +k2
  Eigen::VectorXd fourier_first = emb.vectors.col(dc_col + 1).real();
  summary.fourier_correlation = circular_linear_correlation(fourier_first, u);
  summary.svd_correlation = circular_linear_correlation(svd2.col(0), u);

  export_kernel_csv(powered, (dir / "kernel_k.csv").string());
  {
    KernelMatrix ktk;
    ktk.entries = powered.entries.transpose() * powered.entries;
    ktk.provenance = "ktk";
    export_kernel_csv(ktk, (dir / "kernel_ktk.csv").string());
  }
  {
    auto out = open_text(dir / "embedding.csv");
    out << "index,u,v,svd1,svd2,fourier_m0_re,fourier_m0_im,"
           "fourier_m+1_re,fourier_m+1_im\n";
    for (int i = 0; i < n; ++i) {
      out << i << ',' << cloud.labels(i, 0) << ',' << cloud.labels(i, 1) << ','
          << svd2(i, 0) << ',' << svd2(i, 1) << ','
          << emb.vectors(i, dc_col).real() << ','
          << emb.vectors(i, dc_col).imag() << ','
          << emb.vectors(i, dc_col + 1).real() << ','
          << emb.vectors(i, dc_col + 1).imag() << '\n';
    }
  }

  diag["asymmetry"] = summary.asymmetry;
  diag["asymmetry_markov"] = asym_markov;
  diag["fourier_harmonic_correlation"] = summary.fourier_correlation;
  diag["svd_harmonic_correlation"] = summary.svd_correlation;
  json top_svs = json::array();
  for (int j = 0; j < std::min(n, 4); ++j)
    top_svs.push_back(svd.singular_values(j));
  diag["singular_values_top4"] = top_svs;
  if (cfg.self_check)
    self_check(powered, coeffs, fb, DiffusionTime{1}, cfg.seed, diag);
  else
    diag["self_check"] = {{"checked", false}, {"reason", "disabled"}};
  write_json(dir / "diagnostics.json", diag);
  write_json(dir / "timings.json",
             json{{"kernel_seconds", sec_kernel},
                  {"fft_path_seconds", sec_fft},
                  {"svd_path_seconds", sec_svd},
                  {"machine", machine_info()}});
  return summary;
}

ImageSummary cmd_image(const ExperimentConfig& cfg) {
  if (cfg.inputs.size() != 1)
    throw UsageError("image experiment needs exactly one --input image");
  DiffusionTime time{cfg.t};
  validate(time);
  fs::path dir = prepare_out_dir(cfg);
  json diag;
  diag["config"] = config_json(cfg);

  double t0 = now_seconds();
  KernelMatrix kernel = image_kernel(load_grayscale_image(cfg.inputs[0]));
  if (time.t > 1) kernel.entries = matrix_power(kernel.entries, time.t);
  int n = kernel.n();
  double sec_kernel = now_seconds() - t0;

  int k1 = cfg.k1 >= 0 ? cfg.k1 : max_radius(n);
  std::vector<int> sweep = cfg.k2_list;
  if (sweep.empty()) {
    // Default sweep up to the quarter-size radius plus the identity radius.
    for (int k : {n / 16, n / 8, n / 4, max_radius(n)})
      if (k >= 0 && (sweep.empty() || k > sweep.back())) sweep.push_back(k);
  }
  for (int k : sweep)
    if (k < 0 || k > max_radius(n))
      throw UsageError("k2 radius " + std::to_string(k) +
                       " out of range for n=" + std::to_string(n));
  // The written reconstructions use the paper-analogue quarter-size radius
  // (first sweep entry when the sweep is user-supplied).
  int headline_k2 = cfg.k2_list.empty() ? std::min(n / 4, max_radius(n))
                                        : cfg.k2_list.front();

  ImageSummary summary;
  summary.k2_sweep = sweep;
  summary.headline_k2 = headline_k2;

  // Error/time curves per order: the FFT row times the forward transform,
  // the SVD row the decomposition; errors are Frobenius reconstruction gaps.
  TimeComparisonReport rep = time_comparison(kernel, sweep);
  double kernel_norm = kernel.entries.norm();
  json timing_rows = json::array();
  {
    auto bench = open_text(dir / "bench.csv");
    bench << "k2,rank,path,l2_error,rel_error,log10_l2_error\n";
    for (const auto& row : rep.rows) {
      int rank = std::min(n, 2 * row.order + 1);
      bench << row.order << ',' << rank << ',' << row.path << ','
            << row.l2_error << ',' << row.l2_error / kernel_norm << ','
            << std::log10(std::max(row.l2_error, 1e-300)) << '\n';
      timing_rows.push_back(json{{"k2", row.order},
                                 {"path", row.path},
                                 {"seconds", row.seconds},
                                 {"m_b", row.m_b}});
      if (row.path == "fft") summary.fft_error.push_back(row.l2_error);
      if (row.path == "svd") summary.svd_error.push_back(row.l2_error);
    }
  }

  Basis fb = fourier_basis(n);
  CoefficientGrid coeffs = forward_transform(kernel, fb);
  SvdDecomp svd = svd_decompose(kernel);
  {
    Reconstruction head = inverse_transform(truncate(coeffs, k1, headline_k2), fb);
    write_pgm((dir / "recon_fourier.pgm").string(), head.values);
    write_pgm((dir / "recon_svd.pgm").string(),
              svd_truncated_recon(svd, std::min(n, 2 * headline_k2 + 1)));
    Reconstruction full =
        inverse_transform(truncate(coeffs, max_radius(n), max_radius(n)), fb);
    summary.full_order_error = (full.values - kernel.entries).norm();
  }

  diag["n"] = n;
  diag["k1"] = k1;
  diag["k2_sweep"] = sweep;
  diag["headline_k2"] = headline_k2;
  diag["fft_error"] = summary.fft_error;
  diag["svd_error"] = summary.svd_error;
  diag["full_order_error"] = summary.full_order_error;
  if (cfg.self_check)
    self_check(kernel, coeffs, fb, DiffusionTime{1}, cfg.seed, diag);
  else
    diag["self_check"] = {{"checked", false}, {"reason", "disabled"}};
  write_json(dir / "diagnostics.json", diag);
  write_json(dir / "timings.json",
             json{{"kernel_seconds", sec_kernel},
                  {"per_order", timing_rows},
                  {"machine", machine_info()}});
  return summary;
}

ChangedataSummary cmd_changedata(const ExperimentConfig& cfg) {
  DiffusionTime time{cfg.t};
  validate(time);
  fs::path dir = prepare_out_dir(cfg);
  json diag;
  diag["config"] = config_json(cfg);

  // Reference field plus >= 1 comparison fields: --input CSVs (first is the
  // reference) or the synthetic year trio when no inputs are given.
  ScalarGrid ref;
  std::vector<ScalarGrid> fields;
  std::vector<std::string> names;
  if (cfg.inputs.empty()) {
    int side = cfg.n > 0 ? cfg.n : 48;
    ref = synth_temperature_field(side, side, "2000", cfg.seed);
    for (const char* tag : {"2010", "2018"}) {
      fields.push_back(synth_temperature_field(side, side, tag, cfg.seed));
      names.emplace_back(tag);
    }
    diag["synthetic"] = {{"side", side}, {"reference", "2000"},
                         {"tags", names}};
  } else if (cfg.inputs.size() >= 2) {
    ref = load_scalar_csv(cfg.inputs[0]);
    for (size_t i = 1; i < cfg.inputs.size(); ++i) {
      fields.push_back(load_scalar_csv(cfg.inputs[i]));
      names.push_back(fs::path(cfg.inputs[i]).stem().string());
    }
  } else {
    throw UsageError("changedata needs a reference plus at least one "
                     "comparison --input (or none for the synthetic trio)");
  }
  for (const ScalarGrid& f : fields)
    if (f.width != ref.width || f.height != ref.height ||
        (f.mask != ref.mask).any())
      throw DataError("changedata fields must share shape and mask");

  double tss = cfg.two_sigma_sq > 0 ? cfg.two_sigma_sq : 650.0;
  double t0 = now_seconds();
  KernelMatrix k_ref = temperature_kernel(ref, tss);
  int n = k_ref.n();
  double sec_kernel = now_seconds() - t0;

  int k1 = cfg.k1 >= 0 ? cfg.k1 : max_radius(n);
  std::vector<int> sweep = cfg.k2_list;
  if (sweep.empty()) {
    for (int k : {5, 100})
      if (k <= max_radius(n)) sweep.push_back(k);
    if (sweep.empty()) sweep.push_back(max_radius(n));
  }
  for (int k : sweep)
    if (k < 0 || k > max_radius(n))
      throw UsageError("k2 radius " + std::to_string(k) +
                       " out of range for n=" + std::to_string(n));

  Basis fb = fourier_basis(n);
  GramTwist g = gram_twist(fb);
  Eigen::MatrixXd p_ref =
      time.t == 1 ? k_ref.entries : matrix_power(k_ref.entries, time.t);
  KernelMatrix pk_ref;
  pk_ref.entries = p_ref;
  CoefficientGrid c_ref = forward_transform(pk_ref, fb);

  // Masked-cell coordinates (row-major) shared by all map exports.
  std::vector<int> rows_idx, cols_idx;
  for (int r = 0; r < ref.height; ++r)
    for (int c = 0; c < ref.width; ++c)
      if (ref.mask(r, c)) {
        rows_idx.push_back(r);
        cols_idx.push_back(c);
      }
  Eigen::VectorXd t_ref(n);
  for (int x = 0; x < n; ++x) t_ref(x) = ref.values(rows_idx[x], cols_idx[x]);

  ChangedataSummary summary;
  summary.k2_sweep = sweep;
  json timing_rows = json::array();
  double max_self_rel = 0.0;
  bool self_checked = false;

  // Per-comparison computations; columns are gathered and emitted row-wise
  // at the end so the CSV stays one-row-per-point.
  std::vector<Eigen::VectorXd> col_t(fields.size());
  std::vector<Eigen::VectorXd> col_exact(fields.size());
  std::vector<std::vector<Eigen::VectorXd>> col_maps(fields.size());
  for (size_t ci = 0; ci < fields.size(); ++ci) {
    const ScalarGrid& field = fields[ci];
    ChangedataComparison cmp;
    cmp.name = names[ci];

    double tk0 = now_seconds();
    KernelMatrix k_cmp = temperature_kernel(field, tss);
    Eigen::MatrixXd p_cmp =
        time.t == 1 ? k_cmp.entries : matrix_power(k_cmp.entries, time.t);
    KernelMatrix pk_cmp;
    pk_cmp.entries = p_cmp;
    CoefficientGrid c_cmp = forward_transform(pk_cmp, fb);
    Eigen::MatrixXcd rows_r = projected_rows_all(c_ref, fb, k1);
    Eigen::MatrixXcd rows_c = projected_rows_all(c_cmp, fb, k1);
    double sec_transform = now_seconds() - tk0;

    // Exact per-point squared dynamic distance map (brute force) and the
    // comparison field values on the masked cells.
    Eigen::VectorXd exact_map(n), t_cmp(n);
    for (int x = 0; x < n; ++x) {
      exact_map(x) = (p_ref.row(x) - p_cmp.row(x)).squaredNorm();
      t_cmp(x) = field.values(rows_idx[x], cols_idx[x]);
    }

    for (int k2 : sweep) {
      double tk = now_seconds();
      std::vector<int> cols = box_indices(n, k2, IndexConvention::centered);
      Eigen::VectorXd map(n);
      for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int m2 : cols) acc += std::norm(rows_r(x, m2) - rows_c(x, m2));
        map(x) = acc;
      }
      double seconds = sec_transform + (now_seconds() - tk);
      double err = (map - exact_map).cwiseAbs().sum();
      cmp.map_l1_error.push_back(err);
      cmp.m_b.push_back(err * seconds / n);
      timing_rows.push_back(json{{"comparison", cmp.name},
                                 {"k2", k2},
                                 {"seconds", seconds},
                                 {"m_b", err * seconds / n}});
      // Truncated global distance: Frobenius gap of the truncated grids.
      CoefficientGrid ta = truncate(c_ref, k2, k2);
      CoefficientGrid tb = truncate(c_cmp, k2, k2);
      cmp.truncated_global.push_back((ta.coeffs - tb.coeffs).norm());
      col_maps[ci].push_back(std::move(map));
    }
    cmp.global_distance =
        std::sqrt(global_distance_sq(c_ref, c_cmp, g, DiffusionTime{1}));

    if (cfg.self_check && n <= 64) {
      // Per-point f_repr spot checks against brute force (small n only).
      Rng rng(cfg.seed ^ 0x7a3du);
      TruncationParams pfull{max_radius(n), max_radius(n), max_radius(n)};
      for (int s = 0; s < 8; ++s) {
        int x = static_cast<int>(rng.index(n));
        double repr = dynamic_distance_sq_repr(c_ref, c_cmp, fb, x, x, pfull);
        double rel = std::abs(repr - exact_map(x)) /
                     std::max(exact_map(x), 1e-12);
        max_self_rel = std::max(max_self_rel, rel);
        if (rel > 1e-8)
          throw NumericError("self-check: dynamic distance off by " +
                             std::to_string(rel) + " relative");
      }
      self_checked = true;
    }

    col_t[ci] = std::move(t_cmp);
    col_exact[ci] = std::move(exact_map);
    summary.comparisons.push_back(std::move(cmp));
  }

  // Distance maps: exact and per-k2 squared dynamic distances, plus the
  // increase-masked variant (distance reported only where the comparison
  // field exceeds the reference, zero elsewhere).
  {
    auto distances = open_text(dir / "distances.csv");
    distances << "index,row,col,t_ref";
    for (const std::string& name : names) {
      distances << ",t_" << name << ",increase_" << name << ",exact_d2_"
                << name << ",exact_d2_inc_" << name;
      for (int k2 : sweep)
        distances << ",d2_k" << k2 << '_' << name << ",d2_inc_k" << k2 << '_'
                  << name;
    }
    distances << '\n';
    for (int x = 0; x < n; ++x) {
      distances << x << ',' << rows_idx[x] << ',' << cols_idx[x] << ','
                << t_ref(x);
      for (size_t ci = 0; ci < fields.size(); ++ci) {
        bool inc = col_t[ci](x) > t_ref(x);
        distances << ',' << col_t[ci](x) << ',' << (inc ? 1 : 0) << ','
                  << col_exact[ci](x) << ','
                  << (inc ? col_exact[ci](x) : 0.0);
        for (const Eigen::VectorXd& m : col_maps[ci])
          distances << ',' << m(x) << ',' << (inc ? m(x) : 0.0);
      }
      distances << '\n';
    }
  }

  {
    auto bench = open_text(dir / "bench.csv");
    bench << "comparison,k2,map_l1_error\n";
    for (const auto& cmp : summary.comparisons)
      for (size_t i = 0; i < sweep.size(); ++i)
        bench << cmp.name << ',' << sweep[i] << ',' << cmp.map_l1_error[i]
              << '\n';
  }
  {
    json comps = json::array();
    for (const auto& cmp : summary.comparisons)
      comps.push_back(json{
          {"name", cmp.name},
          {"global_distance", cmp.global_distance},
          {"global_distance_sq", cmp.global_distance * cmp.global_distance},
          {"truncated_global_distance", cmp.truncated_global}});
    write_json(dir / "global.json",
               json{{"n", n},
                    {"t", time.t},
                    {"reference",
                     cfg.inputs.empty()
                         ? std::string("2000")
                         : fs::path(cfg.inputs[0]).stem().string()},
                    {"comparisons", comps},
                    {"k2_sweep", sweep},
                    {"units", "field units (square roots of squared-field "
                              "aggregates); inputs are unitless scalars"}});
  }

  diag["n"] = n;
  diag["k1"] = k1;
  diag["k2_sweep"] = sweep;
  for (const auto& cmp : summary.comparisons)
    diag["map_l1_error"][cmp.name] = cmp.map_l1_error;
  if (!cfg.self_check)
    diag["self_check"] = {{"checked", false}, {"reason", "disabled"}};
  else if (self_checked)
    diag["self_check"] = {{"checked", true},
                          {"max_rel_distance_err", max_self_rel}};
  else
    diag["self_check"] = {{"checked", false}, {"reason", "n > 64"}};
  write_json(dir / "diagnostics.json", diag);
  write_json(dir / "timings.json",
             json{{"kernel_seconds", sec_kernel},
                  {"per_order", timing_rows},
                  {"machine", machine_info()}});
  return summary;
}

BenchSummary cmd_bench(const ExperimentConfig& cfg) {
  fs::path dir = prepare_out_dir(cfg);
  json diag;
  diag["config"] = config_json(cfg);

  int n_max = cfg.n > 0 ? cfg.n : 1024;
  std::vector<int> sweep;
  for (int m = 256; m <= n_max; m *= 2) sweep.push_back(m);
  if (sweep.empty())
    throw UsageError("bench sweep {256, 512, ...} is empty; need --n >= 256");

  BenchSummary summary;
  json rows = json::array();
  {
    auto bench = open_text(dir / "bench.csv");
    bench << "n,path,order,seconds,l2_error,m_b\n";
    for (int m : sweep) {
      // Dense random non-negative kernel; entries pinned by the seed.
      Rng rng(cfg.seed + static_cast<std::uint64_t>(m));
      KernelMatrix k;
      k.entries.resize(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) k.entries(i, j) = rng.uniform();
      k.provenance = "bench_random";
      std::vector<int> orders = {m / 8};
      TimeComparisonReport rep = time_comparison(k, orders);
      for (const auto& row : rep.rows) {
        bench << m << ',' << row.path << ',' << row.order << ','
              << row.seconds << ',' << row.l2_error << ',' << row.m_b << '\n';
        rows.push_back(json{{"n", m},
                            {"path", row.path},
                            {"order", row.order},
                            {"seconds", row.seconds},
                            {"l2_error", row.l2_error},
                            {"m_b", row.m_b}});
        if (row.path == "fft") summary.fft_seconds.push_back(row.seconds);
        if (row.path == "svd") summary.svd_seconds.push_back(row.seconds);
      }
      summary.sweep_n.push_back(m);
    }
  }
  std::vector<double> ns(summary.sweep_n.begin(), summary.sweep_n.end());
  if (ns.size() >= 2) {
    summary.fft_slope = loglog_slope(ns, summary.fft_seconds);
    summary.svd_slope = loglog_slope(ns, summary.svd_seconds);
  }
  diag["sweep_n"] = summary.sweep_n;
  write_json(dir / "diagnostics.json", diag);
  // Slopes are timing-derived, so they live with the timing rows rather
  // than in the deterministic diagnostics file.
  write_json(dir / "bench.json",
             json{{"rows", rows},
                  {"fft_slope", summary.fft_slope},
                  {"svd_slope", summary.svd_slope},
                  {"machine", machine_info()},
                  {"protocol", "1 discarded warm-up, best of 3, steady "
                               "clock, serial"}});
  return summary;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"diffusion-geometry representations with asymmetric kernels"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "problem size (points / grid side)");
    sub->add_option("--t", cfg.t, "diffusion time (>= 1)");
    sub->add_option("--k1", cfg.k1, "m1 truncation radius (-1 = full)");
    sub->add_option("--k2", cfg.k2_list, "m2 truncation radii (sweep)")
        ->delimiter(',');
    sub->add_option("--k3", cfg.k3, "inner power radius (-1 = full)");
    sub->add_option("--two-sigma-sq", cfg.two_sigma_sq,
                    "gaussian scale parameter");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--input", cfg.inputs, "input file (repeatable)");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_flag_callback(
        "--no-self-check", [&cfg] { cfg.self_check = false; },
        "skip the small-n numerical self check");
  };
  for (const char* name :
       {"sphere", "mobius", "image", "changedata", "bench"}) {
    add_common(app.add_subcommand(
        name, std::string("run the ") + name + " experiment"));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (cfg.experiment == "sphere") {
      cmd_sphere(cfg);
    } else if (cfg.experiment == "mobius") {
      cmd_mobius(cfg);
    } else if (cfg.experiment == "image") {
      cmd_image(cfg);
    } else if (cfg.experiment == "changedata") {
      cmd_changedata(cfg);
    } else if (cfg.experiment == "bench") {
      cmd_bench(cfg);
    } else {
      throw UsageError("unknown experiment: " + cfg.experiment);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace asymdiff
