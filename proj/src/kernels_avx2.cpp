#include "dbnt/kernels.hpp"

#if (defined(__x86_64__) || defined(_M_X64)) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace dbnt::kern {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

// exp on 4 doubles, cephes-style: reduce x = n*ln2 + r, Pade approximation of
// exp(r), reconstruct with the exponent bits. Input clamped to [-708, 708] so
// the 2^n assembly stays in the normal range. Accuracy ~1-2 ulp.
inline __m256d exp4(__m256d x) {
    const __m256d hi = _mm256_set1_pd(708.0);
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);

    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(x, log2e, half));
    __m256d r = _mm256_fnmadd_pd(n, c1, x);
    r = _mm256_fnmadd_pd(n, c2, r);
    __m256d rr = _mm256_mul_pd(r, r);

    __m256d p = _mm256_fmadd_pd(p0, rr, p1);
    p = _mm256_fmadd_pd(p, rr, p2);
    p = _mm256_mul_pd(p, r);
    __m256d q = _mm256_fmadd_pd(q0, rr, q1);
    q = _mm256_fmadd_pd(q, rr, q2);
    q = _mm256_fmadd_pd(q, rr, q3);

    __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    e = _mm256_fmadd_pd(two, e, one);

    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void decay_axpy_avx2(double decay, double* d, double step, const double* g, std::size_t n) {
    const __m256d vm = _mm256_set1_pd(decay);
    const __m256d vs = _mm256_set1_pd(step);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vd = _mm256_mul_pd(vm, _mm256_loadu_pd(d + i));
        vd = _mm256_fmadd_pd(vs, _mm256_loadu_pd(g + i), vd);
        _mm256_storeu_pd(d + i, vd);
    }
    for (; i < n; ++i) d[i] = decay * d[i] + step * g[i];
}

inline __m256d sigmoid4(__m256d x) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d floor_v = _mm256_set1_pd(kSigmoidFloor);
    const __m256d ceil_v = _mm256_set1_pd(kSigmoidCeil);
    // exp argument is -|x|, so it can only underflow
    __m256d neg_abs = _mm256_min_pd(x, _mm256_sub_pd(zero, x));
    __m256d e = exp4(neg_abs);
    __m256d denom = _mm256_add_pd(one, e);
    __m256d pos = _mm256_div_pd(one, denom);
    __m256d neg = _mm256_div_pd(e, denom);
    __m256d mask = _mm256_cmp_pd(x, zero, _CMP_GE_OQ);
    __m256d y = _mm256_blendv_pd(neg, pos, mask);
    return _mm256_min_pd(_mm256_max_pd(y, floor_v), ceil_v);
}

void sigmoid_avx2(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, sigmoid4(_mm256_loadu_pd(x + i)));
    if (i < n) {
        alignas(32) double buf[4] = {0, 0, 0, 0};
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        alignas(32) double out[4];
        _mm256_store_pd(out, sigmoid4(_mm256_load_pd(buf)));
        for (std::size_t j = i; j < n; ++j) y[j] = out[j - i];
    }
}

double exp_shift_sum_avx2(const double* x, double shift, double* y, std::size_t n) {
    const __m256d vshift = _mm256_set1_pd(shift);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d e = exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift));
        _mm256_storeu_pd(y + i, e);
        acc = _mm256_add_pd(acc, e);
    }
    double sum = hsum(acc);
    for (; i < n; ++i) {
        y[i] = std::exp(std::min(std::max(x[i] - shift, -708.0), 708.0));
        sum += y[i];
    }
    return sum;
}

double vmax_avx2(const double* x, std::size_t n) {
    std::size_t i = 0;
    double m = x[0];
    if (n >= 4) {
        __m256d vm = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
        __m128d lo = _mm256_castpd256_pd128(vm);
        __m128d hi = _mm256_extractf128_pd(vm, 1);
        lo = _mm_max_pd(lo, hi);
        __m128d shuf = _mm_unpackhi_pd(lo, lo);
        m = _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
    }
    for (; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double sum = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

const KernelTable avx2_kernels = {
    dot_avx2,     axpy_avx2, scal_avx2, decay_axpy_avx2,
    sigmoid_avx2, exp_shift_sum_avx2, vmax_avx2, sqdist_avx2,
};

} // namespace

const KernelTable* avx2_table() { return &avx2_kernels; }

} // namespace dbnt::kern

#elif defined(__x86_64__) || defined(_M_X64)

namespace dbnt::kern {
const KernelTable* avx2_table() { return nullptr; }
} // namespace dbnt::kern

#endif
