#include "gradpower/expfam.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "gradpower/errors.hpp"

namespace gradpower {

bool Interval::contains(double x) const
{
    if (std::isnan(x)) return false;
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

namespace {

std::string bound_to_string(double b)
{
    if (std::isinf(b)) return b < 0 ? "-inf" : "inf";
    std::ostringstream os;
    os.precision(17);
    os << b;
    return os.str();
}

} // namespace

std::string Interval::to_string() const
{
    return std::string(lo_closed ? "[" : "(") + bound_to_string(lo) + ", " + bound_to_string(hi)
         + (hi_closed ? "]" : ")");
}

double ExpFamModel::information(double theta) const
{
    return alpha(theta).d1 * beta(theta).d1;
}

void ExpFamModel::require_parameter(double theta) const
{
    if (!std::isfinite(theta) || !param_space.contains(theta)) {
        std::ostringstream os;
        os.precision(17);
        os << name << ": parameter " << theta << " outside " << param_space.to_string();
        throw DomainError(os.str());
    }
}

CumulantSet cumulants(const ExpFamModel& model, double theta)
{
    model.require_parameter(theta);
    const Jet a = model.alpha(theta);
    const Jet b = model.beta(theta);
    CumulantSet c{};
    c.k_tt = -a.d1 * b.d1;
    c.k_ttt = -(2.0 * a.d2 * b.d1 + a.d1 * b.d2);
    c.k_t_tt = a.d2 * b.d1;
    c.k_t_t_t = a.d1 * b.d2 - a.d2 * b.d1;
    c.k_inv = -1.0 / c.k_tt;
    return c;
}

double mean_sufficient_statistic(const ExpFamModel& model, std::span<const double> data)
{
    if (data.empty()) {
        throw DomainError(model.name + ": empty sample");
    }
    double sum = 0.0;
    double comp = 0.0;
    for (double x : data) {
        if (!model.support.contains(x)) {
            std::ostringstream os;
            os.precision(17);
            os << model.name << ": observation " << x << " outside support "
               << model.support.to_string();
            throw DomainError(os.str());
        }
        // Neumaier summation
        const double term = model.d(x);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    return (sum + comp) / static_cast<double>(data.size());
}

double mle_from_dbar(const ExpFamModel& model, double dbar)
{
    if (!std::isfinite(dbar)) {
        throw EstimationError(model.name + ": non-finite sufficient statistic mean");
    }
    double theta = 0.0;
    if (model.mle_closed_form) {
        theta = model.mle_closed_form(dbar);
    } else {
        if (!model.mle_bracket) {
            throw EstimationError(model.name + ": no closed-form MLE and no bracket");
        }
        auto [lo, hi] = model.mle_bracket(dbar);
        auto score = [&](double t) { return model.beta(t).value + dbar; };
        const double flo = score(lo);
        const double fhi = score(hi);
        if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0.0) {
            throw EstimationError(model.name + ": MLE root not bracketed");
        }
        if (flo == 0.0) return lo;
        if (fhi == 0.0) return hi;
        std::uintmax_t max_iter = 200;
        boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
        auto [a, b] = boost::math::tools::toms748_solve(score, lo, hi, flo, fhi, tol, max_iter);
        theta = std::abs(score(a)) <= std::abs(score(b)) ? a : b;
    }
    if (!std::isfinite(theta) || !model.param_space.contains(theta)) {
        std::ostringstream os;
        os.precision(17);
        os << model.name << ": MLE " << theta << " outside parameter space "
           << model.param_space.to_string() << " (degenerate sample, dbar = " << dbar << ")";
        throw EstimationError(os.str());
    }
    return theta;
}

double mle(const ExpFamModel& model, std::span<const double> data)
{
    return mle_from_dbar(model, mean_sufficient_statistic(model, data));
}

std::vector<double> sample(const ExpFamModel& model, double theta, std::size_t n, Stream& stream)
{
    model.require_parameter(theta);
    if (n == 0) {
        throw DomainError("sample size must be positive");
    }
    std::vector<double> out(n);
    for (auto& x : out) {
        x = model.draw(theta, stream);
    }
    return out;
}

std::vector<double> parse_data(const std::string& text)
{
    std::vector<double> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        const char* begin = line.data() + first;
        const char* end = line.data() + last + 1;
        if (*begin == '+') ++begin;
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
            throw DomainError("data line " + std::to_string(lineno) + ": cannot parse '"
                              + line.substr(first, last - first + 1) + "'");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<double> read_data_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DomainError("cannot open data file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_data(buf.str());
}

} // namespace gradpower
