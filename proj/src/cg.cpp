#include "dbnt/cg.hpp"

#include "dbnt/errors.hpp"
#include "dbnt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dbnt {

namespace {

struct Probe {
    double alpha = 0.0;
    double phi = std::numeric_limits<double>::quiet_NaN();
    double dphi = std::numeric_limits<double>::quiet_NaN();
};

struct LineSearchState {
    const Objective* f = nullptr;
    const std::vector<double>* x0 = nullptr;
    const std::vector<double>* dir = nullptr;
    std::size_t evals = 0;
    std::size_t max_evals = 0;
    std::vector<double> xtrial;
    std::vector<double> gtrial;
    // best strong-Wolfe point seen and its gradient (for reuse by the caller)
    Probe accepted;
    std::vector<double> accepted_grad;
    // best plain-decrease point as a fallback
    Probe fallback;
    std::vector<double> fallback_grad;
};

// Evaluate phi(alpha) = f(x0 + alpha * d) and its directional derivative.
Probe eval_probe(LineSearchState& s, double alpha) {
    const std::size_t n = s.x0->size();
    s.xtrial = *s.x0;
    s.gtrial.resize(n);
    kern::axpy(alpha, s.dir->data(), s.xtrial.data(), n);
    Probe p;
    p.alpha = alpha;
    p.phi = (*s.f)(s.xtrial, s.gtrial);
    p.dphi = kern::dot(s.gtrial.data(), s.dir->data(), n);
    ++s.evals;
    return p;
}

bool wolfe_ok(const Probe& p, double phi0, double dphi0, const CgOptions& opt) {
    if (!std::isfinite(p.phi) || !std::isfinite(p.dphi)) return false;
    return p.phi <= phi0 + opt.c1 * p.alpha * dphi0 && std::fabs(p.dphi) <= opt.c2 * std::fabs(dphi0);
}

void consider(LineSearchState& s, const Probe& p, double phi0, double dphi0,
              const CgOptions& opt) {
    if (!std::isfinite(p.phi)) return;
    if (p.phi <= phi0 && (std::isnan(s.fallback.phi) || p.phi < s.fallback.phi)) {
        s.fallback = p;
        s.fallback_grad = s.gtrial;
    }
    if (wolfe_ok(p, phi0, dphi0, opt) &&
        (std::isnan(s.accepted.phi) || p.phi < s.accepted.phi)) {
        s.accepted = p;
        s.accepted_grad = s.gtrial;
    }
}

// Minimizer of the quadratic through (0, phi0) with slope dphi0 and (a, phi_a).
double quad_interp(double phi0, double dphi0, double a, double phi_a) {
    const double denom = 2.0 * (phi_a - phi0 - dphi0 * a);
    if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return -dphi0 * a * a / denom;
}

// Minimizer of the cubic Hermite interpolant between two probes.
double cubic_interp(const Probe& lo, const Probe& hi) {
    const double d1 = lo.dphi + hi.dphi - 3.0 * (lo.phi - hi.phi) / (lo.alpha - hi.alpha);
    const double disc = d1 * d1 - lo.dphi * hi.dphi;
    if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double sign = hi.alpha > lo.alpha ? 1.0 : -1.0;
    const double d2 = sign * std::sqrt(disc);
    const double denom = hi.dphi - lo.dphi + 2.0 * d2;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return hi.alpha - (hi.alpha - lo.alpha) * (hi.dphi + d2 - d1) / denom;
}

void zoom(LineSearchState& s, Probe lo, Probe hi, double phi0, double dphi0,
          const CgOptions& opt) {
    while (s.evals < s.max_evals) {
        const double left = std::min(lo.alpha, hi.alpha);
        const double right = std::max(lo.alpha, hi.alpha);
        const double width = right - left;
        if (width <= 1e-16 * std::max(1.0, right)) return;

        double t = cubic_interp(lo, hi);
        if (!std::isfinite(t) || t <= left + 0.05 * width || t >= right - 0.05 * width)
            t = left + 0.5 * width;

        Probe p = eval_probe(s, t);
        consider(s, p, phi0, dphi0, opt);
        if (!std::isnan(s.accepted.phi)) return;

        const bool armijo_fail =
            !(p.phi <= phi0 + opt.c1 * p.alpha * dphi0) || p.phi >= lo.phi;
        if (armijo_fail) {
            hi = p;
        } else {
            if (p.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
            lo = p;
        }
    }
}

// Strong-Wolfe bracketing search. Returns true if some acceptable (or at
// least non-increasing) point was found; results live in s.accepted /
// s.fallback.
void line_search(LineSearchState& s, double phi0, double dphi0, double init_alpha,
                 const CgOptions& opt) {
    Probe prev;
    prev.alpha = 0.0;
    prev.phi = phi0;
    prev.dphi = dphi0;

    double alpha = init_alpha;
    for (std::size_t iter = 0; s.evals < s.max_evals; ++iter) {
        Probe p = eval_probe(s, alpha);
        consider(s, p, phi0, dphi0, opt);

        const bool armijo_fail = !(p.phi <= phi0 + opt.c1 * p.alpha * dphi0);
        if (armijo_fail || (iter > 0 && p.phi >= prev.phi)) {
            zoom(s, prev, p, phi0, dphi0, opt);
            break;
        }
        if (std::fabs(p.dphi) <= opt.c2 * std::fabs(dphi0)) break;
        if (p.dphi >= 0.0) {
            zoom(s, p, prev, phi0, dphi0, opt);
            break;
        }
        prev = p;
        alpha *= 4.0;
        if (!std::isfinite(alpha)) break;
    }

    // One interpolation refinement: the parabola through (0, phi0, dphi0) and
    // the best point so far lands on the exact minimizer when the objective
    // is quadratic along the direction.
    const Probe& base = !std::isnan(s.accepted.phi) ? s.accepted : s.fallback;
    if (std::isnan(base.phi) || s.evals >= s.max_evals) return;
    const double refined = quad_interp(phi0, dphi0, base.alpha, base.phi);
    if (std::isfinite(refined) && refined > 0.0 && refined < 10.0 * base.alpha &&
        std::fabs(refined - base.alpha) > 1e-12 * base.alpha) {
        Probe p = eval_probe(s, refined);
        consider(s, p, phi0, dphi0, opt);
    }
}

} // namespace

CgResult cg_minimize(const Objective& f, std::vector<double>& x, const CgOptions& options) {
    const std::size_t n = x.size();
    CgResult result;

    std::vector<double> grad(n);
    double loss = f(x, grad);
    ++result.evaluations;
    if (!std::isfinite(loss)) throw divergence_error("divergence");
    result.initial_loss = loss;
    result.final_loss = loss;

    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];

    LineSearchState s;
    s.f = &f;

    double prev_dphi0 = 0.0;
    double prev_alpha = 0.0;
    for (std::size_t ls = 0; ls < options.line_searches; ++ls) {
        double dphi0 = kern::dot(grad.data(), dir.data(), n);
        if (dphi0 >= 0.0) {
            // non-descent direction: reset to steepest descent
            for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
            dphi0 = -kern::dot(grad.data(), grad.data(), n);
        }
        if (dphi0 == 0.0) break; // stationary point

        double init_alpha = 1.0;
        if (ls > 0 && prev_dphi0 < 0.0 && dphi0 < 0.0)
            init_alpha = std::clamp(prev_alpha * prev_dphi0 / dphi0, 1e-16, 1e8);

        s.x0 = &x;
        s.dir = &dir;
        s.evals = 0;
        s.max_evals = options.max_evals_per_search;
        s.accepted = Probe{};
        s.fallback = Probe{};
        line_search(s, loss, dphi0, init_alpha, options);
        result.evaluations += s.evals;

        const bool have_accepted = !std::isnan(s.accepted.phi);
        const bool have_fallback = !std::isnan(s.fallback.phi);
        if (!have_accepted && !have_fallback) break; // no progress possible

        const Probe& chosen = have_accepted ? s.accepted : s.fallback;
        const std::vector<double>& chosen_grad =
            have_accepted ? s.accepted_grad : s.fallback_grad;
        if (chosen.phi > loss) break;

        kern::axpy(chosen.alpha, dir.data(), x.data(), n);
        loss = chosen.phi;
        ++result.line_searches_done;

        // Polak-Ribiere+ direction update
        double gg = kern::dot(grad.data(), grad.data(), n);
        double beta = 0.0;
        if (gg > 0.0) {
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i) num += chosen_grad[i] * (chosen_grad[i] - grad[i]);
            beta = std::max(0.0, num / gg);
        }
        prev_dphi0 = dphi0;
        prev_alpha = chosen.alpha;
        grad = chosen_grad;
        for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i] + beta * dir[i];
    }

    result.final_loss = loss;
    return result;
}

} // namespace dbnt
