#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace edpd {

/// Adaptive Gauss-Kronrod (G7,K15) quadrature for vector-valued integrands.
/// f(t) returns std::array<double, N>. Intervals are bisected until the
/// per-component K15-G7 error estimate satisfies the absolute + relative
/// tolerance, split proportionally to interval length.
template <std::size_t N, class F>
std::array<double, N> adaptive_gauss_kronrod(F&& f, double a, double b, double rel_tol,
                                             double abs_tol = 0.0, int max_depth = 28) {
    // QUADPACK dqk15 nodes and weights on [-1, 1].
    static constexpr double xgk[8] = {
        0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
        0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
    static constexpr double wgk[8] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
        0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
    static constexpr double wg[4] = {
        0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

    struct Panel {
        std::array<double, N> kronrod;
        double error;
    };

    auto eval_panel = [&](double lo, double hi) -> Panel {
        const double h = 0.5 * (hi - lo);
        const double mid = 0.5 * (lo + hi);
        std::array<double, N> k{}, g{};
        const auto fm = f(mid);
        for (std::size_t c = 0; c < N; ++c) {
            k[c] = wgk[7] * fm[c];
            g[c] = wg[3] * fm[c];
        }
        for (int i = 0; i < 7; ++i) {
            const auto f1 = f(mid - h * xgk[i]);
            const auto f2 = f(mid + h * xgk[i]);
            for (std::size_t c = 0; c < N; ++c) {
                k[c] += wgk[i] * (f1[c] + f2[c]);
                if (i % 2 == 1) g[c] += wg[i / 2] * (f1[c] + f2[c]);
            }
        }
        double err = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            k[c] *= h;
            g[c] *= h;
            err = std::max(err, std::abs(k[c] - g[c]));
        }
        return {k, err};
    };

    // First pass to get a magnitude scale for the relative tolerance.
    const Panel whole = eval_panel(a, b);
    double scale = 0.0;
    for (std::size_t c = 0; c < N; ++c) scale = std::max(scale, std::abs(whole.kronrod[c]));

    std::array<double, N> total{};
    struct Work {
        double lo, hi;
        int depth;
    };
    std::array<Work, 64> stack;
    int top = 0;
    stack[top++] = {a, b, 0};
    while (top > 0) {
        const Work w = stack[--top];
        const Panel p = eval_panel(w.lo, w.hi);
        const double frac = (w.hi - w.lo) / (b - a);
        const double budget = std::max(rel_tol * scale, abs_tol) * frac;
        if (p.error <= budget || w.depth >= max_depth) {
            for (std::size_t c = 0; c < N; ++c) total[c] += p.kronrod[c];
        } else {
            if (top + 2 > static_cast<int>(stack.size()))
                throw std::runtime_error("adaptive_gauss_kronrod: subdivision stack overflow");
            const double mid = 0.5 * (w.lo + w.hi);
            stack[top++] = {w.lo, mid, w.depth + 1};
            stack[top++] = {mid, w.hi, w.depth + 1};
        }
    }
    return total;
}

/// Scalar convenience wrapper.
template <class F>
double adaptive_quadrature(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0) {
    auto wrapped = [&](double t) { return std::array<double, 1>{f(t)}; };
    return adaptive_gauss_kronrod<1>(wrapped, a, b, rel_tol, abs_tol)[0];
}

} // namespace edpd
