#ifndef GRADPOWER_TESTSTATS_HPP
#define GRADPOWER_TESTSTATS_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "gradpower/expfam.hpp"

namespace gradpower {

enum class TestKind { LR = 1, Wald = 2, Score = 3, Gradient = 4 };

inline constexpr std::array<TestKind, 4> all_tests{TestKind::LR, TestKind::Wald, TestKind::Score,
                                                   TestKind::Gradient};

constexpr std::size_t index(TestKind k) { return static_cast<std::size_t>(k) - 1; }

std::string_view to_string(TestKind k);

struct TestResult {
    double theta_hat = 0.0;
    std::array<double, 4> s{};
    std::array<double, 4> p_values{};
    std::size_t n = 0;
    double d_bar = 0.0;

    double operator[](TestKind k) const { return s[index(k)]; }
};

/// The four statistics from the sufficient-statistic summary alone.
/// `theta_hat` must already solve beta(theta_hat) + d_bar = 0.
std::array<double, 4> statistics_from_summary(const ExpFamModel& model, std::size_t n, double d_bar,
                                              double theta_hat, double theta0);

/// Likelihood ratio, Wald, score and gradient statistics for H0: theta = theta0,
/// with chi-square(1) p-values.
TestResult compute_statistics(const ExpFamModel& model, std::span<const double> data, double theta0);

} // namespace gradpower

#endif // GRADPOWER_TESTSTATS_HPP
