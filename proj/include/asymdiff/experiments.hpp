#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asymdiff/diffusion.hpp"
#include "asymdiff/oracle.hpp"

namespace asymdiff {

// Parsed CLI configuration shared by all experiments. Zero / empty members
// mean "use the experiment's default".
struct ExperimentConfig {
  std::string experiment;
  int n = 0;
  int t = 1;
  int k1 = -1;                 // -1 -> full radius
  std::vector<int> k2_list;    // sweep; empty -> experiment default
  int k3 = -1;                 // -1 -> full radius
  double two_sigma_sq = 0.0;   // <= 0 -> experiment default
  std::uint64_t seed = 1;
  std::vector<std::string> inputs;
  std::string out_dir = "out";
  bool self_check = true;
};

// Each experiment writes its artifacts under cfg.out_dir and returns a small
// summary for tests. Timings are isolated in timings.json so every other
// artifact is byte-identical across runs with the same config and seed.

struct SphereSummary {
  double correlation = 0.0;      // eigen-path vs fourier-path 2-D distances
  std::vector<int> sweep_n;
  std::vector<double> sweep_err;
  std::vector<double> sweep_eig_seconds;
  std::vector<double> sweep_fft_seconds;
};
SphereSummary cmd_sphere(const ExperimentConfig& cfg);

struct MobiusSummary {
  double asymmetry = 0.0;            // ||K - K^T||_F / ||K||_F
  double fourier_correlation = 0.0;  // circular correlation with the u label
  double svd_correlation = 0.0;
};
MobiusSummary cmd_mobius(const ExperimentConfig& cfg);

struct ImageSummary {
  std::vector<int> k2_sweep;
  std::vector<double> fft_error;   // Frobenius recon error per k2
  std::vector<double> svd_error;
  int headline_k2 = 0;             // radius of the written reconstructions
  double full_order_error = 0.0;   // fft path at the identity truncation
};
ImageSummary cmd_image(const ExperimentConfig& cfg);

// One comparison field measured against the reference field.
struct ChangedataComparison {
  std::string name;                      // input stem or synthetic tag
  double global_distance = 0.0;          // sqrt, field units
  std::vector<double> truncated_global;  // sqrt per k2
  std::vector<double> map_l1_error;      // E per k2 vs brute force
  std::vector<double> m_b;               // (1/N) * E * t_cpu per k2
};

struct ChangedataSummary {
  std::vector<int> k2_sweep;
  std::vector<ChangedataComparison> comparisons;
};
ChangedataSummary cmd_changedata(const ExperimentConfig& cfg);

struct BenchSummary {
  std::vector<int> sweep_n;
  std::vector<double> fft_seconds;
  std::vector<double> svd_seconds;
  double fft_slope = 0.0;
  double svd_slope = 0.0;
};
BenchSummary cmd_bench(const ExperimentConfig& cfg);

// Entry point used by the binary: parses argv, dispatches, maps errors to
// exit codes (0 success, 2 usage, 3 data, 4 numerical invariant).
int run_cli(int argc, const char* const* argv);

}  // namespace asymdiff
