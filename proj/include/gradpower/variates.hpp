#ifndef GRADPOWER_VARIATES_HPP
#define GRADPOWER_VARIATES_HPP

#include <cmath>

#include "gradpower/rng.hpp"

namespace gradpower::variates {

inline double standard_exponential(Stream& s) { return -std::log(s.uniform()); }

/// Marsaglia polar method. One of the pair is discarded so each call
/// consumes a self-contained number of draws.
inline double standard_normal(Stream& s)
{
    for (;;) {
        const double u = 2.0 * s.uniform() - 1.0;
        const double v = 2.0 * s.uniform() - 1.0;
        const double r2 = u * u + v * v;
        if (r2 > 0.0 && r2 < 1.0) {
            return u * std::sqrt(-2.0 * std::log(r2) / r2);
        }
    }
}

/// Gamma(shape, rate) by Marsaglia & Tsang's squeeze/rejection method.
/// Shapes below one use the Gamma(shape + 1) * U^{1/shape} boost.
inline double gamma(Stream& s, double shape, double rate)
{
    if (shape < 1.0) {
        const double g = gamma(s, shape + 1.0, 1.0);
        return g * std::pow(s.uniform(), 1.0 / shape) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = 0.0;
        double v = 0.0;
        do {
            z = standard_normal(s);
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = s.uniform();
        if (u < 1.0 - 0.0331 * (z * z) * (z * z)) {
            return d * v / rate;
        }
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) {
            return d * v / rate;
        }
    }
}

/// Inverse Gaussian with mean mu and shape lambda (Michael, Schucany & Haas).
inline double inverse_gaussian(Stream& s, double mu, double shape)
{
    const double z = standard_normal(s);
    const double y = z * z;
    const double x = mu + mu * mu * y / (2.0 * shape)
                   - mu / (2.0 * shape) * std::sqrt(4.0 * mu * shape * y + mu * mu * y * y);
    if (s.uniform() <= mu / (mu + x)) {
        return x;
    }
    return mu * mu / x;
}

} // namespace gradpower::variates

#endif // GRADPOWER_VARIATES_HPP
