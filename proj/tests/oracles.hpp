// Independent reference implementations used only by tests. Everything here
// deliberately avoids the library's own quadrature and closed-form moment
// paths so that agreement between the two is meaningful.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Composite Simpson with panel doubling until successive estimates agree.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-11) {
    if (!(a < b)) {
        return 0.0;
    }
    auto composite = [&](int panels) {
        const double h = (b - a) / panels;
        double sum = f(a) + f(b);
        for (int i = 1; i < panels; ++i) {
            sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
        }
        return sum * h / 3.0;
    };
    double previous = composite(16);
    for (int panels = 32; panels <= (1 << 22); panels *= 2) {
        const double current = composite(panels);
        if (std::abs(current - previous) < tol) {
            return current;
        }
        previous = current;
    }
    return previous;
}

struct Moments {
    double mass;
    double mean;
    double variance;
};

/// Conditional moments over (a, b) by brute quadrature of the pdf. Infinite
/// bounds must be capped by the caller.
inline Moments moments(const std::function<double(double)>& pdf, double a, double b,
                       double tol = 1e-12) {
    const double mass = integrate(pdf, a, b, tol);
    const double first = integrate([&](double x) { return x * pdf(x); }, a, b, tol);
    const double second = integrate([&](double x) { return x * x * pdf(x); }, a, b, tol);
    if (mass <= 0.0) {
        return {0.0, 0.0, 0.0};
    }
    const double mean = first / mass;
    return {mass, mean, second / mass - mean * mean};
}

inline double laplace_pdf(double rate, double x) {
    return 0.5 * rate * std::exp(-rate * std::abs(x));
}

inline double laplace_cdf(double rate, double x) {
    return x < 0.0 ? 0.5 * std::exp(rate * x) : 1.0 - 0.5 * std::exp(-rate * x);
}

inline double laplace_quantile(double rate, double u) {
    return u < 0.5 ? std::log(2.0 * u) / rate : -std::log(2.0 * (1.0 - u)) / rate;
}

/// Effectively-infinite upper limit for Laplace quadrature.
inline double laplace_cap(double rate) { return 40.0 / rate; }

/// Threshold-policy cost for a Laplace source, assembled from quadrature:
/// J = 2*int_0^b1 x^2 p + 2*c1*P(band) + 2*Var(band)*P(band)/(snr+1)
///   + 2*c2*P(tail), with the band variance one-sided.
inline double laplace_threshold_cost_quad(double rate, double beta1, double beta2,
                                          double c1, double c2, double snr) {
    auto pdf = [rate](double x) { return laplace_pdf(rate, x); };
    const double cap = laplace_cap(rate);
    double cost = 2.0 * integrate([&](double x) { return x * x * pdf(x); }, 0.0,
                                  std::min(beta1, cap));
    if (beta2 > beta1 && beta1 < cap) {
        const auto band = moments(pdf, beta1, std::min(beta2, cap));
        cost += 2.0 * band.mass * (c1 + band.variance / (snr + 1.0));
    }
    if (beta2 < cap) {
        cost += 2.0 * c2 * integrate(pdf, beta2, cap);
    }
    return cost;
}

/// Closed-form ingredients for the fast 2-D threshold grid search over a
/// Laplace source. Independent derivation from the density definition:
///   G0(x) = P(X > x),  G1(x) = int_x^inf t p dt,  G2(x) = int_x^inf t^2 p dt
/// restricted to the positive half line.
struct LaplaceGrid {
    std::vector<double> beta;
    std::vector<double> tail0; // positive-side tail mass  (1/2) e^{-r b}
    std::vector<double> tail1; // (1/2)(b + 1/r) e^{-r b}
    std::vector<double> tail2; // (1/2)(b^2 + 2b/r + 2/r^2) e^{-r b}
    std::vector<double> head2; // int_0^b x^2 p dx
    double rate;

    LaplaceGrid(double rate, double beta_max, int points) : rate(rate) {
        beta.resize(points);
        tail0.resize(points);
        tail1.resize(points);
        tail2.resize(points);
        head2.resize(points);
        const double full2 = 1.0 / (rate * rate); // int_0^inf x^2 p dx = 1/r^2
        for (int i = 0; i < points; ++i) {
            const double b = beta_max * i / (points - 1);
            const double e = 0.5 * std::exp(-rate * b);
            beta[i] = b;
            tail0[i] = e;
            tail1[i] = e * (b + 1.0 / rate);
            tail2[i] = e * (b * b + 2.0 * b / rate + 2.0 / (rate * rate));
            head2[i] = full2 - tail2[i];
        }
    }

    double cost(int i, int j, double c1, double c2, double snr) const {
        double value = 2.0 * head2[i] + 2.0 * c2 * tail0[j];
        const double mass = tail0[i] - tail0[j];
        if (j > i && mass > 0.0) {
            const double first = tail1[i] - tail1[j];
            const double second = tail2[i] - tail2[j];
            const double mean = first / mass;
            const double variance = second / mass - mean * mean;
            value += 2.0 * mass * (c1 + variance / (snr + 1.0));
        }
        return value;
    }
};

/// Perfect-channel-only dynamic program (noisy channel absent), written
/// directly from the effective-cost recursion with threshold sqrt(c2t).
/// Returns values[t-1][ep] for t in 1..T+1.
inline std::vector<std::vector<double>> perfect_only_dp(int horizon, int budget,
                                                        double rate) {
    auto pdf = [rate](double x) { return laplace_pdf(rate, x); };
    const double cap = laplace_cap(rate);
    std::vector<std::vector<double>> values(horizon + 1,
                                            std::vector<double>(budget + 1, 0.0));
    for (int t = horizon; t >= 1; --t) {
        for (int ep = 0; ep <= budget; ++ep) {
            double stage;
            if (ep == 0) {
                stage = 2.0 / (rate * rate);
            } else {
                const double c2t = values[t][ep - 1] - values[t][ep];
                const double beta = std::sqrt(std::max(0.0, c2t));
                stage = 2.0 * integrate([&](double x) { return x * x * pdf(x); }, 0.0,
                                        std::min(beta, cap)) +
                        2.0 * c2t * (beta >= cap ? 0.0 : 0.5 * std::exp(-rate * beta));
            }
            values[t - 1][ep] = values[t][ep] + stage;
        }
    }
    return values;
}

} // namespace oracle
