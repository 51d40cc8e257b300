#pragma once

#include <cstddef>
#include <string>

// Dense double-precision kernels used by the training and evaluation inner
// loops. Every kernel has a scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The active backend is picked once at startup from
// CPU features and can be overridden with the DBNT_KERNELS environment
// variable ("scalar" or "avx2") or programmatically via select_backend().
//
// SIMD variants may reorder floating-point reductions, so results can differ
// from the scalar reference by a few ulps; the equivalence tests pin the
// allowed drift. Within one backend all kernels are deterministic.

namespace dbnt::kern {

enum class Backend { scalar, avx2 };

struct KernelTable {
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x[i] *= alpha
    void (*scal)(double alpha, double* x, std::size_t n);
    // d[i] = decay * d[i] + step * g[i]
    void (*decay_axpy)(double decay, double* d, double step, const double* g, std::size_t n);
    // y[i] = sigmoid(x[i]), clamped to (0, 1) exclusive
    void (*sigmoid)(const double* x, double* y, std::size_t n);
    // y[i] = exp(x[i] - shift) with the argument clamped to [-708, 708];
    // returns sum of y
    double (*exp_shift_sum)(const double* x, double shift, double* y, std::size_t n);
    // max over x (n >= 1)
    double (*vmax)(const double* x, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*sqdist)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable* avx2_table(); // nullptr when not compiled in
#endif

// Active table (dispatch decided on first use).
const KernelTable& active();
Backend active_backend();
// Force a backend; throws config_error if unavailable on this CPU.
void select_backend(Backend b);
std::string backend_name(Backend b);

// Convenience forwarders.
inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void scal(double alpha, double* x, std::size_t n) { active().scal(alpha, x, n); }
inline void decay_axpy(double decay, double* d, double step, const double* g, std::size_t n) {
    active().decay_axpy(decay, d, step, g, n);
}
inline void sigmoid(const double* x, double* y, std::size_t n) { active().sigmoid(x, y, n); }
inline double exp_shift_sum(const double* x, double shift, double* y, std::size_t n) {
    return active().exp_shift_sum(x, shift, y, n);
}
inline double vmax(const double* x, std::size_t n) { return active().vmax(x, n); }
inline double sqdist(const double* a, const double* b, std::size_t n) { return active().sqdist(a, b, n); }

// Sigmoid outputs are clamped into [kSigmoidFloor, kSigmoidCeil] so that
// downstream logs and strict (0,1) range contracts hold even at saturation.
inline constexpr double kSigmoidFloor = 1e-300;
inline constexpr double kSigmoidCeil = 0.99999999999999988897769753748434595; // largest double < 1

} // namespace dbnt::kern
