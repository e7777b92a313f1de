#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace asymdiff {

// Error taxonomy mirrored by the CLI exit codes: usage errors (bad
// parameters / flags) -> 2, data errors (unreadable or invalid inputs) -> 3,
// numerical invariant violations -> 4.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seedable PRNG with a pinned bit-to-double mapping so that fixtures are
// reproducible across platforms: mt19937_64 output, top 53 bits scaled into
// [0, 1). Distribution classes from <random> are deliberately avoided since
// their exact output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, m).
  std::uint64_t index(std::uint64_t m) { return gen_() % m; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Worker cap for the few parallel loops in the library. Honors the
// ASYMDIFF_THREADS environment variable; defaults to the hardware count.
int thread_cap();

// Chunked parallel-for over [0, count). Runs serially when the cap is 1 or
// the range is small; the loop body must be safe to run on disjoint indices.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace asymdiff
