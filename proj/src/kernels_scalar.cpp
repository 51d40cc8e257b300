#include "dbnt/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace dbnt::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void decay_axpy_scalar(double decay, double* d, double step, const double* g, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = decay * d[i] + step * g[i];
}

double sigmoid_one(double x) {
    // exp argument kept <= 0 so it can only underflow, never overflow
    double y;
    if (x >= 0.0) {
        y = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        y = e / (1.0 + e);
    }
    return std::min(std::max(y, kSigmoidFloor), kSigmoidCeil);
}

void sigmoid_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = sigmoid_one(x[i]);
}

double exp_shift_sum_scalar(const double* x, double shift, double* y, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // arguments clamped to the shared kernel domain [-708, 708]
        y[i] = std::exp(std::min(std::max(x[i] - shift, -708.0), 708.0));
        sum += y[i];
    }
    return sum;
}

double vmax_scalar(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table = {
        dot_scalar,     axpy_scalar, scal_scalar, decay_axpy_scalar,
        sigmoid_scalar, exp_shift_sum_scalar, vmax_scalar, sqdist_scalar,
    };
    return table;
}

} // namespace dbnt::kern
