#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccg {

// Malformed inputs: files, tensors, indices, parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver could not produce a result: infeasible systems, iteration caps,
// violated preconditions.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace defaults {
inline constexpr double kFeasibilityTol = 1e-9;  // cost and membership checks
inline constexpr double kGapTol = 1e-6;          // equilibrium verdicts
inline constexpr double kLpResidualTol = 1e-8;   // certified LP feasibility
}  // namespace defaults

// Dense row-major matrix; just enough for deviation matrices and LP rows.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size() && k < b.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double frobenius_dot(const Matrix& a, const Matrix& b) { return dot(a.data, b.data); }

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Seeded deterministic RNG. mt19937_64 has a standard-specified output
// stream; the helpers below avoid std::uniform_*_distribution, whose output
// is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int index(int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(engine_()) * static_cast<std::uint64_t>(n)) >> 64);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace ccg
