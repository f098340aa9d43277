#include <cmath>
#include <cstddef>

#include "wordconf/kernels.hpp"

// Reference kernels. Plain sequential loops over libm; the AVX2 variants are
// tested against these.

namespace wordconf::kern {
namespace {

double s_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double s_max(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

void s_log_floor(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::log(x[i] > kProbFloor ? x[i] : kProbFloor);
  }
}

double s_neg_entropy(const double* p, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += p[i] * std::log(p[i] > kProbFloor ? p[i] : kProbFloor);
  }
  return acc;
}

void s_exp_affine(const double* x, double a, double b, double* out,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(a * x[i] + b);
  }
}

void s_accumulate(const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void s_multiply(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= x[i];
}

void s_scale(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      .name = "scalar",
      .sum = s_sum,
      .max = s_max,
      .log_floor = s_log_floor,
      .neg_entropy = s_neg_entropy,
      .exp_affine = s_exp_affine,
      .accumulate = s_accumulate,
      .multiply = s_multiply,
      .scale = s_scale,
  };
  return table;
}

}  // namespace wordconf::kern
