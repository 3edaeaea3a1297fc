// Catalog of one-parameter exponential families with hand-coded derivatives.

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "gradpower/errors.hpp"
#include "gradpower/expfam.hpp"
#include "gradpower/variates.hpp"

namespace gradpower {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double log_2pi = 1.8378770664093454835606594728112;

const Interval real_line{-inf, inf, false, false};
const Interval positive{0.0, inf, false, false};

std::pair<double, double> wide_positive_bracket(double) { return {1e-12, 1e12}; }

// Root of dbar - theta on (0, inf).
std::pair<double, double> identity_bracket(double dbar)
{
    return {std::numeric_limits<double>::min(), 2.0 * std::abs(dbar) + 1.0};
}

double require_fixed(const std::string& model, const std::map<std::string, double>& fixed,
                     const std::string& key, bool must_be_positive)
{
    auto it = fixed.find(key);
    if (it == fixed.end()) {
        throw DomainError(model + ": missing fixed constant '" + key + "'");
    }
    if (!std::isfinite(it->second) || (must_be_positive && !(it->second > 0.0))) {
        throw DomainError(model + ": fixed constant '" + key + "' must be "
                          + (must_be_positive ? "positive" : "finite"));
    }
    return it->second;
}

void reject_unknown(const std::string& model, const std::map<std::string, double>& fixed,
                    std::set<std::string> allowed)
{
    for (const auto& [key, value] : fixed) {
        if (!allowed.count(key)) {
            throw DomainError(model + ": unknown fixed constant '" + key + "'");
        }
    }
}

std::string num(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

ExpFamModel normal_variance(const std::map<std::string, double>& fixed)
{
    reject_unknown("normal-variance", fixed, {"mu"});
    const double mu = require_fixed("normal-variance", fixed, "mu", false);
    ExpFamModel m;
    m.name = "normal-variance";
    m.fixed = {{"mu", mu}};
    m.alpha = [](double t) { return Jet{1.0 / (2.0 * t), -1.0 / (2.0 * t * t), 1.0 / (t * t * t)}; };
    m.log_zeta = [](double t) { return Jet{0.5 * std::log(t), 0.5 / t, -0.5 / (t * t)}; };
    m.beta = [](double t) { return Jet{-t, -1.0, 0.0}; };
    m.d = [mu](double x) { return (x - mu) * (x - mu); };
    m.v = [](double) { return -0.5 * log_2pi; };
    m.support = real_line;
    m.param_space = positive;
    m.draw = [mu](double t, Stream& s) { return mu + std::sqrt(t) * variates::standard_normal(s); };
    m.mle_closed_form = [](double dbar) { return dbar; };
    m.mle_bracket = identity_bracket;
    m.text = {"theta (variance), mu = " + num(mu) + " known", "1/(2 theta)", "theta^(1/2)",
              "(x - mu)^2", "-log(2 pi)/2", "theta_hat = dbar"};
    return m;
}

ExpFamModel normal_mean(const std::map<std::string, double>& fixed)
{
    reject_unknown("normal-mean", fixed, {"theta"});
    const double var = require_fixed("normal-mean", fixed, "theta", true);
    ExpFamModel m;
    m.name = "normal-mean";
    m.fixed = {{"theta", var}};
    m.alpha = [var](double mu) { return Jet{-mu / var, -1.0 / var, 0.0}; };
    m.log_zeta = [var](double mu) { return Jet{mu * mu / (2.0 * var), mu / var, 1.0 / var}; };
    m.beta = [](double mu) { return Jet{-mu, -1.0, 0.0}; };
    m.d = [](double x) { return x; };
    m.v = [var](double x) { return -x * x / (2.0 * var) - 0.5 * (log_2pi + std::log(var)); };
    m.support = real_line;
    m.param_space = real_line;
    m.draw = [var](double mu, Stream& s) { return mu + std::sqrt(var) * variates::standard_normal(s); };
    m.mle_closed_form = [](double dbar) { return dbar; };
    m.mle_bracket = [](double dbar) {
        const double w = 1.0 + std::abs(dbar);
        return std::pair{dbar - w, dbar + w};
    };
    m.text = {"mu (mean), theta = " + num(var) + " known (variance)", "-mu/theta",
              "exp{mu^2/(2 theta)}", "x", "-x^2/(2 theta) - log(2 pi theta)/2", "mu_hat = dbar"};
    return m;
}

// Inverse Gaussian, mean mu known, shape theta is the parameter.
ExpFamModel invnormal_mu_known(const std::map<std::string, double>& fixed)
{
    reject_unknown("invnormal-mu", fixed, {"mu"});
    const double mu = require_fixed("invnormal-mu", fixed, "mu", true);
    ExpFamModel m;
    m.name = "invnormal-mu";
    m.fixed = {{"mu", mu}};
    m.alpha = [](double t) { return Jet{t, 1.0, 0.0}; };
    m.log_zeta = [](double t) { return Jet{-0.5 * std::log(t), -0.5 / t, 0.5 / (t * t)}; };
    m.beta = [](double t) { return Jet{-0.5 / t, 0.5 / (t * t), -1.0 / (t * t * t)}; };
    m.d = [mu](double x) { return (x - mu) * (x - mu) / (2.0 * mu * mu * x); };
    m.v = [](double x) { return -0.5 * (log_2pi + 3.0 * std::log(x)); };
    m.support = positive;
    m.param_space = positive;
    m.draw = [mu](double t, Stream& s) { return variates::inverse_gaussian(s, mu, t); };
    m.mle_closed_form = [](double dbar) { return 1.0 / (2.0 * dbar); };
    m.mle_bracket = wide_positive_bracket;
    m.text = {"theta (shape), mu = " + num(mu) + " known (mean)", "theta", "theta^(-1/2)",
              "(x - mu)^2/(2 mu^2 x)", "-log(2 pi x^3)/2", "theta_hat = 1/(2 dbar)"};
    return m;
}

// Inverse Gaussian, shape theta known, mean mu is the parameter.
ExpFamModel invnormal_theta_known(const std::map<std::string, double>& fixed)
{
    reject_unknown("invnormal-theta", fixed, {"theta"});
    const double shape = require_fixed("invnormal-theta", fixed, "theta", true);
    ExpFamModel m;
    m.name = "invnormal-theta";
    m.fixed = {{"theta", shape}};
    m.alpha = [shape](double mu) {
        const double mu2 = mu * mu;
        return Jet{shape / (2.0 * mu2), -shape / (mu2 * mu), 3.0 * shape / (mu2 * mu2)};
    };
    m.log_zeta = [shape](double mu) {
        return Jet{-shape / mu, shape / (mu * mu), -2.0 * shape / (mu * mu * mu)};
    };
    m.beta = [](double mu) { return Jet{-mu, -1.0, 0.0}; };
    m.d = [](double x) { return x; };
    m.v = [shape](double x) {
        return 0.5 * (std::log(shape) - log_2pi - 3.0 * std::log(x)) - shape / (2.0 * x);
    };
    m.support = positive;
    m.param_space = positive;
    m.draw = [shape](double mu, Stream& s) { return variates::inverse_gaussian(s, mu, shape); };
    m.mle_closed_form = [](double dbar) { return dbar; };
    m.mle_bracket = identity_bracket;
    m.text = {"mu (mean), theta = " + num(shape) + " known (shape)", "theta/(2 mu^2)",
              "exp(-theta/mu)", "x", "log{theta/(2 pi x^3)}/2 - theta/(2 x)", "mu_hat = dbar"};
    return m;
}

ExpFamModel gamma_model(const std::map<std::string, double>& fixed)
{
    reject_unknown("gamma", fixed, {"k"});
    const double k = require_fixed("gamma", fixed, "k", true);
    ExpFamModel m;
    m.name = "gamma";
    m.fixed = {{"k", k}};
    m.alpha = [](double t) { return Jet{t, 1.0, 0.0}; };
    m.log_zeta = [k](double t) { return Jet{-k * std::log(t), -k / t, k / (t * t)}; };
    m.beta = [k](double t) { return Jet{-k / t, k / (t * t), -2.0 * k / (t * t * t)}; };
    m.d = [](double x) { return x; };
    const double lgk = std::lgamma(k);
    m.v = [k, lgk](double x) { return (k - 1.0) * std::log(x) - lgk; };
    m.support = positive;
    m.param_space = positive;
    m.draw = [k](double t, Stream& s) { return variates::gamma(s, k, t); };
    m.mle_closed_form = [k](double dbar) { return k / dbar; };
    m.mle_bracket = wide_positive_bracket;
    m.text = {"theta (rate), k = " + num(k) + " known (shape)", "theta", "theta^(-k)", "x",
              "(k - 1) log(x) - log Gamma(k)", "theta_hat = k/xbar"};
    return m;
}

ExpFamModel truncated_extreme_value(const std::map<std::string, double>& fixed)
{
    reject_unknown("tev", fixed, {});
    ExpFamModel m;
    m.name = "tev";
    m.alpha = [](double t) { return Jet{1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t)}; };
    m.log_zeta = [](double t) { return Jet{std::log(t), 1.0 / t, -1.0 / (t * t)}; };
    m.beta = [](double t) { return Jet{-t, -1.0, 0.0}; };
    m.d = [](double x) { return std::expm1(x); };
    m.v = [](double x) { return x; };
    m.support = positive;
    m.param_space = positive;
    // F(x) = 1 - exp{-(e^x - 1)/theta}
    m.draw = [](double t, Stream& s) { return std::log1p(t * variates::standard_exponential(s)); };
    m.mle_closed_form = [](double dbar) { return dbar; };
    m.mle_bracket = identity_bracket;
    m.text = {"theta", "1/theta", "theta", "exp(x) - 1", "x", "theta_hat = dbar"};
    return m;
}

ExpFamModel pareto(const std::map<std::string, double>& fixed)
{
    reject_unknown("pareto", fixed, {"k"});
    const double k = require_fixed("pareto", fixed, "k", true);
    const double logk = std::log(k);
    ExpFamModel m;
    m.name = "pareto";
    m.fixed = {{"k", k}};
    m.alpha = [](double t) { return Jet{1.0 + t, 1.0, 0.0}; };
    m.log_zeta = [logk](double t) { return Jet{-std::log(t) - t * logk, -1.0 / t - logk, 1.0 / (t * t)}; };
    m.beta = [logk](double t) { return Jet{-1.0 / t - logk, 1.0 / (t * t), -2.0 / (t * t * t)}; };
    m.d = [](double x) { return std::log(x); };
    m.v = [](double) { return 0.0; };
    m.support = Interval{k, inf, false, false};
    m.param_space = positive;
    m.draw = [k](double t, Stream& s) { return k * std::exp(variates::standard_exponential(s) / t); };
    m.mle_closed_form = [logk](double dbar) { return 1.0 / (dbar - logk); };
    m.mle_bracket = wide_positive_bracket;
    m.text = {"theta (tail index), k = " + num(k) + " known (scale)", "1 + theta",
              "1/(theta k^theta)", "log(x)", "0", "theta_hat = 1/mean log(x/k)"};
    return m;
}

// Support is the whole real line: zeta = 2 theta normalizes exp(-|x-k|/theta) there.
ExpFamModel laplace(const std::map<std::string, double>& fixed)
{
    reject_unknown("laplace", fixed, {"k"});
    const double k = require_fixed("laplace", fixed, "k", false);
    ExpFamModel m;
    m.name = "laplace";
    m.fixed = {{"k", k}};
    m.alpha = [](double t) { return Jet{1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t)}; };
    m.log_zeta = [](double t) { return Jet{std::log(2.0 * t), 1.0 / t, -1.0 / (t * t)}; };
    m.beta = [](double t) { return Jet{-t, -1.0, 0.0}; };
    m.d = [k](double x) { return std::abs(x - k); };
    m.v = [](double) { return 0.0; };
    m.support = real_line;
    m.param_space = positive;
    m.draw = [k](double t, Stream& s) {
        const double e = t * variates::standard_exponential(s);
        return s.uniform() < 0.5 ? k - e : k + e;
    };
    m.mle_closed_form = [](double dbar) { return dbar; };
    m.mle_bracket = identity_bracket;
    m.text = {"theta (scale), k = " + num(k) + " known (location)", "1/theta", "2 theta",
              "|x - k|", "0", "theta_hat = mean |x - k|"};
    return m;
}

// Support is (0, phi): theta phi^-theta x^(theta-1) integrates to one there.
ExpFamModel power_model(const std::map<std::string, double>& fixed)
{
    reject_unknown("power", fixed, {"phi"});
    const double phi = require_fixed("power", fixed, "phi", true);
    const double logphi = std::log(phi);
    ExpFamModel m;
    m.name = "power";
    m.fixed = {{"phi", phi}};
    m.alpha = [](double t) { return Jet{1.0 - t, -1.0, 0.0}; };
    m.log_zeta = [logphi](double t) { return Jet{-std::log(t) + t * logphi, -1.0 / t + logphi, 1.0 / (t * t)}; };
    m.beta = [logphi](double t) { return Jet{1.0 / t - logphi, -1.0 / (t * t), 2.0 / (t * t * t)}; };
    m.d = [](double x) { return std::log(x); };
    m.v = [](double) { return 0.0; };
    m.support = Interval{0.0, phi, false, false};
    m.param_space = positive;
    m.draw = [phi](double t, Stream& s) { return phi * std::exp(-variates::standard_exponential(s) / t); };
    m.mle_closed_form = [logphi](double dbar) { return 1.0 / (logphi - dbar); };
    m.mle_bracket = wide_positive_bracket;
    m.text = {"theta, phi = " + num(phi) + " known (upper endpoint)", "1 - theta",
              "phi^theta/theta", "log(x)", "0", "theta_hat = 1/mean log(phi/x)"};
    return m;
}

} // namespace

const std::vector<std::string>& catalog_names()
{
    static const std::vector<std::string> names{"normal-variance", "normal-mean", "invnormal-theta",
                                                "invnormal-mu",    "gamma",       "tev",
                                                "pareto",          "laplace",     "power"};
    return names;
}

std::map<std::string, double> catalog_default_fixed(const std::string& name)
{
    if (name == "normal-variance") return {{"mu", 0.0}};
    if (name == "normal-mean") return {{"theta", 1.0}};
    if (name == "invnormal-theta") return {{"theta", 1.0}};
    if (name == "invnormal-mu") return {{"mu", 1.0}};
    if (name == "gamma" || name == "pareto") return {{"k", 1.0}};
    if (name == "laplace") return {{"k", 0.0}};
    if (name == "power") return {{"phi", 1.0}};
    if (name == "tev") return {};
    throw DomainError("unknown model '" + name + "'");
}

ExpFamModel catalog_model(const std::string& name, const std::map<std::string, double>& fixed)
{
    if (name == "normal-variance") return normal_variance(fixed);
    if (name == "normal-mean") return normal_mean(fixed);
    if (name == "invnormal-theta") return invnormal_theta_known(fixed);
    if (name == "invnormal-mu") return invnormal_mu_known(fixed);
    if (name == "gamma") return gamma_model(fixed);
    if (name == "tev") return truncated_extreme_value(fixed);
    if (name == "pareto") return pareto(fixed);
    if (name == "laplace") return laplace(fixed);
    if (name == "power") return power_model(fixed);
    throw DomainError("unknown model '" + name + "'");
}

} // namespace gradpower
