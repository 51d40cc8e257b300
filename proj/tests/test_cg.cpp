#include "dbnt/cg.hpp"

#include "dbnt/errors.hpp"
#include "dbnt/random.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace dbnt;

namespace {

struct Quadratic {
    std::vector<std::vector<double>> a;
    std::vector<double> b;

    double operator()(std::span<const double> x, std::span<double> grad) const {
        const std::size_t n = b.size();
        double value = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += a[i][j] * x[j];
            grad[i] = row - b[i];
            value += 0.5 * x[i] * row - b[i] * x[i];
        }
        return value;
    }
};

// A = Q diag(lambda) Qt with a random orthonormal Q and eigenvalues in [1, 10].
Quadratic random_quadratic(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> q(n, std::vector<double>(n));
    for (auto& row : q)
        for (double& v : row) v = rng.normal();
    // Gram-Schmidt on rows
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double proj = 0.0;
            for (std::size_t k = 0; k < n; ++k) proj += q[i][k] * q[j][k];
            for (std::size_t k = 0; k < n; ++k) q[i][k] -= proj * q[j][k];
        }
        double norm = 0.0;
        for (double v : q[i]) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : q[i]) v /= norm;
    }
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = 1.0 + 9.0 * rng.uniform();

    Quadratic f;
    f.a.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) f.a[i][j] += q[k][i] * lambda[k] * q[k][j];
    f.b.resize(n);
    for (double& v : f.b) v = 2.0 * (rng.uniform() - 0.5);
    return f;
}

} // namespace

TEST_CASE("cg reaches the exact minimum of a 1-d quadratic in one line search") {
    Quadratic f;
    f.a = {{4.0}};
    f.b = {2.0};
    std::vector<double> x{10.0};
    CgOptions options;
    options.line_searches = 1;
    const auto result = cg_minimize(f, x, options);
    CHECK(std::fabs(x[0] - 0.5) < 1e-12);
    CHECK(result.final_loss <= result.initial_loss);
}

TEST_CASE("cg terminates on convex quadratics within n line searches") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const std::size_t n = 20;
        const auto f = random_quadratic(n, seed);
        const auto expected = dbnt_test::solve_linear(f.a, f.b);

        std::vector<double> x(n, 0.0);
        CgOptions options;
        options.line_searches = n;
        cg_minimize(f, x, options);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::fabs(x[i] - expected[i]));
        MESSAGE("seed ", seed, " max coordinate error ", err);
        CHECK(err < 1e-8);
    }
}

TEST_CASE("cg leaves a stationary point untouched") {
    const auto f = random_quadratic(6, 9);
    const auto star = dbnt_test::solve_linear(f.a, f.b);

    // gradient is ~0 at the solution; force it to exact zero with a wrapper
    const Objective flat = [&](std::span<const double> x, std::span<double> grad) {
        (void)x;
        for (double& g : grad) g = 0.0;
        return 1.25;
    };
    std::vector<double> x = star;
    const auto original = x;
    CgOptions options;
    options.line_searches = 5;
    const auto result = cg_minimize(flat, x, options);
    CHECK(x == original);
    CHECK(result.line_searches_done == 0);
    CHECK(result.final_loss == 1.25);
}

TEST_CASE("cg never increases the loss on bumpy objectives") {
    // quartic with cross terms and many local features
    const Objective bumpy = [](std::span<const double> x, std::span<double> grad) {
        double v = 0.0;
        const std::size_t n = x.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double t = x[i] * x[i] - 1.0;
            v += t * t + 0.3 * std::sin(5.0 * x[i]);
            grad[i] = 4.0 * x[i] * t + 1.5 * std::cos(5.0 * x[i]);
            if (i + 1 < n) {
                v += 0.1 * x[i] * x[i + 1];
                grad[i] += 0.1 * x[i + 1];
            }
            if (i > 0) grad[i] += 0.1 * x[i - 1];
        }
        return v;
    };

    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x(8);
        for (double& v : x) v = 4.0 * (rng.uniform() - 0.5);
        std::vector<double> grad(x.size());
        const double before = bumpy(x, grad);
        CgOptions options;
        options.line_searches = 3;
        const auto result = cg_minimize(bumpy, x, options);
        CHECK(result.initial_loss == before);
        CHECK(result.final_loss <= before);
        const double after = bumpy(x, grad);
        CHECK(after == doctest::Approx(result.final_loss));
    }
}

TEST_CASE("cg reports divergence for a non-finite starting loss") {
    const Objective bad = [](std::span<const double>, std::span<double> grad) {
        for (double& g : grad) g = 0.0;
        return std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<double> x(3, 0.0);
    CgOptions options;
    CHECK_THROWS_WITH_AS(cg_minimize(bad, x, options), "divergence", divergence_error);
}
