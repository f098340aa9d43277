#pragma once

#include <cstddef>
#include <string>

// Vectorized inner loops for probability-vector math. Every kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant selected
// at runtime. The two are equivalence-tested; callers only see the table
// returned by ops().

namespace wordconf::kern {

// Probabilities are clamped to this floor before any logarithm so log-domain
// math never produces -inf. 0 * log(0) is defined as 0 (the multiply by the
// unclamped value takes care of it).
inline constexpr double kProbFloor = 1e-12;

struct Ops {
  const char* name;
  // sum of x[0..n)
  double (*sum)(const double* x, std::size_t n);
  // maximum of x[0..n); n >= 1
  double (*max)(const double* x, std::size_t n);
  // out[i] = log(max(x[i], kProbFloor))
  void (*log_floor)(const double* x, double* out, std::size_t n);
  // sum of p[i] * log(max(p[i], kProbFloor)); entries with p[i] == 0 add 0
  double (*neg_entropy)(const double* p, std::size_t n);
  // out[i] = exp(a * x[i] + b); arguments below -708.396 flush to 0
  void (*exp_affine)(const double* x, double a, double b, double* out,
                     std::size_t n);
  // acc[i] += x[i]
  void (*accumulate)(const double* x, double* acc, std::size_t n);
  // y[i] *= x[i]
  void (*multiply)(const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double* x, double a, std::size_t n);
};

enum class Isa { Scalar, Avx2 };

// Active kernel table. Picked once: WORDCONF_SIMD=scalar|avx2 if set,
// otherwise the best ISA the CPU supports.
const Ops& ops();

// Specific tables, for equivalence tests.
const Ops& scalar_ops();
bool avx2_available();        // CPU support, regardless of build flags
const Ops* avx2_ops();        // nullptr when not built or not supported

// Override the active table (tests only; not thread-safe against ops()).
void set_isa(Isa isa);

std::string active_isa_name();

}  // namespace wordconf::kern
