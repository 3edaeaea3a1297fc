// Independent reference implementations used only by the tests. Nothing here
// shares code with the library.
#ifndef GRADPOWER_TESTS_ORACLES_HPP
#define GRADPOWER_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

inline double chisq_pdf(double df, double x)
{
    if (x <= 0.0) return 0.0;
    const double h = df / 2.0;
    return std::exp((h - 1.0) * std::log(x) - x / 2.0 - h * std::log(2.0) - std::lgamma(h));
}

/// Central chi-square CDF by tanh-sinh quadrature of the density (copes with
/// the x^{-1/2} singularity at 0 for df = 1).
inline double chisq_cdf_quadrature(double df, double x)
{
    if (x <= 0.0) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([df](double t) { return chisq_pdf(df, t); }, 0.0, x, 1e-15);
}

/// Central chi-square CDF through Boost's incomplete gamma.
inline double chisq_cdf(double df, double x)
{
    return x <= 0.0 ? 0.0 : boost::math::gamma_p(df / 2.0, x / 2.0);
}

/// Noncentral chi-square CDF summed term by term from j = 0 with
/// Poisson(lambda) weights. No tail tricks: sums until the weights vanish.
inline double nc_chisq_cdf_series(double df, double lambda, double x)
{
    if (lambda == 0.0) return chisq_cdf(df, x);
    double sum = 0.0;
    for (int j = 0; j < 2000; ++j) {
        const double logw = -lambda + j * std::log(lambda) - std::lgamma(j + 1.0);
        const double w = std::exp(logw);
        sum += w * chisq_cdf(df + 2.0 * j, x);
        if (j > lambda && w < 1e-18) break;
    }
    return sum;
}

inline double nc_chisq_pdf_series(double df, double lambda, double x)
{
    if (lambda == 0.0) return chisq_pdf(df, x);
    double sum = 0.0;
    for (int j = 0; j < 2000; ++j) {
        const double w = std::exp(-lambda + j * std::log(lambda) - std::lgamma(j + 1.0));
        sum += w * chisq_pdf(df + 2.0 * j, x);
        if (j > lambda && w < 1e-18) break;
    }
    return sum;
}

/// Quantile of the quadrature CDF by plain bisection.
inline double chisq_quantile_quadrature(double df, double p)
{
    double lo = 0.0, hi = df + 100.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chisq_cdf_quadrature(df, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Central finite difference of f at x with step h (fourth-order stencil).
template <typename F>
double derivative(F f, double x, double h)
{
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

template <typename F>
double second_derivative(F f, double x, double h)
{
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

/// Kolmogorov-Smirnov statistic of a sample against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    return d;
}

/// Asymptotic 1% critical value of the KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

} // namespace oracle

#endif // GRADPOWER_TESTS_ORACLES_HPP
