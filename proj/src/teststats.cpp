#include "gradpower/teststats.hpp"

#include <cmath>

#include "gradpower/specfun.hpp"

namespace gradpower {

std::string_view to_string(TestKind k)
{
    switch (k) {
    case TestKind::LR: return "lr";
    case TestKind::Wald: return "wald";
    case TestKind::Score: return "score";
    case TestKind::Gradient: return "gradient";
    }
    return "?";
}

std::array<double, 4> statistics_from_summary(const ExpFamModel& model, std::size_t n, double d_bar,
                                              double theta_hat, double theta0)
{
    const double nn = static_cast<double>(n);
    const Jet a0 = model.alpha(theta0);
    const Jet b0 = model.beta(theta0);
    const Jet ah = model.alpha(theta_hat);
    const Jet bh = model.beta(theta_hat);
    const double score_term = b0.value + d_bar;
    const double diff = theta_hat - theta0;

    std::array<double, 4> s{};
    s[0] = 2.0 * nn
         * (model.log_zeta(theta0).value - model.log_zeta(theta_hat).value
            + (a0.value - ah.value) * d_bar);
    s[1] = nn * diff * diff * ah.d1 * bh.d1;
    s[2] = nn * a0.d1 * score_term * score_term / b0.d1;
    s[3] = -nn * diff * a0.d1 * score_term;
    // rounding noise when theta_hat is theta0 to working precision
    if (s[0] < 0.0 && s[0] > -1e-10 * nn) {
        s[0] = 0.0;
    }
    return s;
}

TestResult compute_statistics(const ExpFamModel& model, std::span<const double> data, double theta0)
{
    model.require_parameter(theta0);
    TestResult r;
    r.n = data.size();
    r.d_bar = mean_sufficient_statistic(model, data);
    r.theta_hat = mle_from_dbar(model, r.d_bar);
    r.s = statistics_from_summary(model, r.n, r.d_bar, r.theta_hat, theta0);
    for (std::size_t i = 0; i < 4; ++i) {
        r.p_values[i] = r.s[i] > 0.0 ? regularized_gamma_q(0.5, r.s[i] / 2.0) : 1.0;
    }
    return r;
}

} // namespace gradpower
