#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <boost/math/distributions/inverse_gaussian.hpp>

#include "gradpower/rng.hpp"
#include "gradpower/variates.hpp"
#include "oracles.hpp"

using namespace gradpower;

TEST_CASE("philox4x32-10 known answers")
{
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff})
          == A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0})
          == A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct")
{
    Stream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::vector<std::uint32_t> va, vb, vc, vd;
    for (int i = 0; i < 100; ++i) {
        va.push_back(a());
        vb.push_back(b());
        vc.push_back(c());
        vd.push_back(d());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
    CHECK(a.blocks_used() == 25);
}

TEST_CASE("uniform stays inside (0, 1) and has the right moments")
{
    Stream s(1, 0);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    bool inside = true;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        inside = inside && u > 0.0 && u < 1.0;
        sum += u;
        sum2 += u * u;
    }
    CHECK(inside);
    const double mean = sum / n, var = sum2 / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(var - 1.0 / 12) < 0.002);
}

TEST_CASE("works with standard distributions")
{
    Stream s(5, 5);
    std::uniform_int_distribution<int> die(1, 6);
    std::set<int> seen;
    for (int i = 0; i < 200; ++i) seen.insert(die(s));
    CHECK(seen.size() == 6);
}

namespace {

template <typename Draw, typename Cdf>
double ks(Draw draw, Cdf cdf, std::size_t n, std::uint64_t seed)
{
    Stream s(seed, 0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = draw(s);
    return oracle::ks_statistic(xs, cdf);
}

} // namespace

TEST_CASE("variates pass Kolmogorov-Smirnov at 1%")
{
    const std::size_t n = 50000;
    const double crit = oracle::ks_critical_1pct(n);

    CHECK(ks(variates::standard_exponential, [](double x) { return -std::expm1(-x); }, n, 11) < crit);
    CHECK(ks(variates::standard_normal, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }, n, 12)
          < crit);
    for (double shape : {0.5, 1.0, 2.0, 7.5}) {
        const double rate = 1.7;
        CHECK(ks([&](Stream& s) { return variates::gamma(s, shape, rate); },
                 [&](double x) { return boost::math::gamma_p(shape, rate * x); }, n, 13)
              < crit);
    }
    for (auto [mu, lam] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.3, 4.0}}) {
        const boost::math::inverse_gaussian_distribution<double> ig(mu, lam);
        CHECK(ks([&](Stream& s) { return variates::inverse_gaussian(s, mu, lam); },
                 [&](double x) { return boost::math::cdf(ig, x); }, n, 14)
              < crit);
    }
}
