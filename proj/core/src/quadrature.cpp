#include "remest/quadrature.hpp"

#include <cmath>
#include <limits>

namespace remest {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol) {
    if (!(a < b)) {
        return 0.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adaptive_step(f, a, b, fa, fm, fb, whole, abs_tol, 48);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
    const double inf = std::numeric_limits<double>::infinity();
    if (a == -inf && b == inf) {
        return integrate(f, a, 0.0, 0.5 * abs_tol) + integrate(f, 0.0, b, 0.5 * abs_tol);
    }
    if (a == -inf) {
        auto mirrored = [&f](double x) { return f(-x); };
        return integrate(mirrored, -b, inf, abs_tol);
    }
    if (b == inf) {
        // x = a - ln(1 - t), t in [0, 1); truncation at t_max leaves a tail
        // of mass ~ f(x) * e^{-(x-a)} beyond x ~ a + 37.
        constexpr double t_max = 1.0 - 1e-16;
        auto transformed = [&f, a](double t) {
            const double x = a - std::log1p(-t);
            return f(x) / (1.0 - t);
        };
        return adaptive_simpson(transformed, 0.0, t_max, abs_tol);
    }
    return adaptive_simpson(f, a, b, abs_tol);
}

} // namespace remest
