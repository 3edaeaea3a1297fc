#ifndef GRADPOWER_EXPFAM_HPP
#define GRADPOWER_EXPFAM_HPP

#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gradpower/rng.hpp"

namespace gradpower {

/// A function value with its first two derivatives.
struct Jet {
    double value;
    double d1;
    double d2;
};

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double x) const;
    std::string to_string() const;
};

/// Human-readable formulas for `model info`.
struct ModelText {
    std::string parameter;
    std::string alpha;
    std::string zeta;
    std::string d;
    std::string v;
    std::string mle;
};

/// One-parameter exponential family with density
///
///   pi(x; theta) = exp{ -log zeta(theta) - alpha(theta) d(x) + v(x) }
///
/// and beta(theta) = zeta'(theta) / {zeta(theta) alpha'(theta)}, so the
/// Fisher information per observation is K(theta) = alpha'(theta) beta'(theta).
///
/// All derivatives are supplied analytically. The model is immutable once
/// built and can be shared between threads.
struct ExpFamModel {
    std::string name;
    std::map<std::string, double> fixed;

    std::function<Jet(double)> alpha;     ///< alpha, alpha', alpha''
    std::function<Jet(double)> log_zeta;  ///< log zeta, zeta'/zeta, (log zeta)''
    std::function<Jet(double)> beta;      ///< beta, beta', beta''
    std::function<double(double)> d;      ///< sufficient statistic
    std::function<double(double)> v;      ///< carrier term

    Interval support;
    Interval param_space;

    /// Single i.i.d. draw at theta.
    std::function<double(double, Stream&)> draw;

    /// Closed-form root of beta(theta) + dbar = 0, if one exists.
    std::function<double(double)> mle_closed_form;
    /// Bracket for the root of beta(theta) + dbar = 0 (root-finding fallback).
    std::function<std::pair<double, double>(double)> mle_bracket;

    ModelText text;

    double information(double theta) const;
    /// Throws DomainError when theta is outside the parameter space.
    void require_parameter(double theta) const;
};

/// Scalar joint cumulants of log-likelihood derivatives at a point.
struct CumulantSet {
    double k_tt;     ///< kappa_{theta theta}
    double k_ttt;    ///< kappa_{theta theta theta}
    double k_t_tt;   ///< kappa_{theta, theta theta}
    double k_t_t_t;  ///< kappa_{theta, theta, theta}
    double k_inv;    ///< kappa^{theta, theta} = -1 / kappa_{theta theta}
};

const std::vector<std::string>& catalog_names();

/// Known constants each catalog family needs, with illustrative defaults.
std::map<std::string, double> catalog_default_fixed(const std::string& name);

/// Builds a catalog family. `fixed` holds the known constants; unknown keys,
/// missing keys and out-of-range values raise DomainError.
ExpFamModel catalog_model(const std::string& name, const std::map<std::string, double>& fixed = {});

CumulantSet cumulants(const ExpFamModel& model, double theta);

/// Mean of d(x) over the sample; checks support.
double mean_sufficient_statistic(const ExpFamModel& model, std::span<const double> data);

/// MLE from the sufficient statistic mean.
double mle_from_dbar(const ExpFamModel& model, double dbar);

/// MLE of theta: the root of beta(theta) + dbar = 0.
double mle(const ExpFamModel& model, std::span<const double> data);

std::vector<double> sample(const ExpFamModel& model, double theta, std::size_t n, Stream& stream);

/// Reads a whitespace/line separated data file. Lines starting with '#'
/// (after optional blanks) and blank lines are ignored.
std::vector<double> read_data_file(const std::string& path);
std::vector<double> parse_data(const std::string& text);

} // namespace gradpower

#endif // GRADPOWER_EXPFAM_HPP
