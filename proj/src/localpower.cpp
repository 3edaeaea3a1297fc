#include "gradpower/localpower.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gradpower/errors.hpp"
#include "gradpower/specfun.hpp"

namespace gradpower {

std::string to_string(CoefficientSource s)
{
    return s == CoefficientSource::ConsistentChain ? "consistent" : "table";
}

CoefficientSource parse_coefficient_source(const std::string& s)
{
    if (s == "consistent" || s == "consistent-chain") return CoefficientSource::ConsistentChain;
    if (s == "table" || s == "paper-table") return CoefficientSource::PaperTable;
    throw DomainError("unknown coefficient source '" + s + "' (expected consistent|table)");
}

std::string to_string(Relation r)
{
    switch (r) {
    case Relation::Greater: return ">";
    case Relation::Less: return "<";
    case Relation::Equal: return "=";
    case Relation::Mixed: return "~";
    }
    return "?";
}

CoefficientTable power_coefficients(const ExpFamModel& model, double theta0, double eps,
                                    CoefficientSource source)
{
    model.require_parameter(theta0);
    if (!std::isfinite(eps)) throw DomainError("eps must be finite");
    const Jet al = model.alpha(theta0);
    const Jet be = model.beta(theta0);
    const double a1 = al.d1, a2 = al.d2, b1 = be.d1, b2 = be.d2;
    const double e1 = eps, e3 = eps * eps * eps;
    const double info = a1 * b1;

    const double skew = 2.0 * a2 * b1 + a1 * b2;  // -kappa_ttt
    const double mixed = a1 * b2 - a2 * b1;        // kappa_{t,t,t}
    const double cross = a2 * b1;                  // kappa_{t,tt}

    const double c0 = -skew * e3 / 6.0;

    CoefficientTable t;
    t.source = source;
    t.eps = eps;
    t.theta0 = theta0;
    auto& a = t.a;

    a(0, 0) = c0;
    a(0, 1) = cross * e3 / 2.0;
    a(0, 2) = mixed * e3 / 6.0;
    a(0, 3) = 0.0;

    a(1, 0) = c0;
    a(1, 1) = cross * e3 / 2.0 - skew * e1 / (2.0 * info);
    a(1, 2) = -a(1, 1);
    a(1, 3) = -c0;

    a(2, 0) = c0;
    a(2, 1) = cross * e3 / 2.0 - mixed * e1 / (2.0 * info);
    a(2, 2) = mixed * e1 / (2.0 * info);
    a(2, 3) = mixed * e3 / 6.0;

    a(3, 0) = source == CoefficientSource::ConsistentChain ? c0 : -mixed * e3 / 6.0;
    a(3, 1) = cross * e3 / 2.0 + skew * e1 / (4.0 * info);
    a(3, 2) = a1 * b2 * e3 / 4.0 - skew * e1 / (4.0 * info);
    a(3, 3) = c0 / 2.0;
    return t;
}

void PowerQuery::validate() const
{
    if (model == nullptr) throw DomainError("power query has no model");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (n < 1) throw DomainError("n must be positive");
    if (!std::isfinite(eps)) throw DomainError("eps must be finite");
    model->require_parameter(theta0);
    model->require_parameter(theta0 + eps / std::sqrt(static_cast<double>(n)));
}

double PowerQuery::critical_value() const { return central_chisq_quantile(1.0, 1.0 - alpha); }

double PowerQuery::noncentrality() const { return model->information(theta0) * eps * eps / 2.0; }

namespace {

// G_{1+2k,lambda}(x) for k = 0..3
std::array<double, 4> mixture_cdfs(double lambda, double x)
{
    std::array<double, 4> g{};
    for (int k = 0; k < 4; ++k) {
        g[k] = nc_chisq_cdf(ChiSquareParams<double>{1.0 + 2.0 * k, lambda}, x);
    }
    return g;
}

} // namespace

std::array<ClampedProbability<double>, 4> local_powers(const PowerQuery& q, CoefficientSource source)
{
    q.validate();
    const auto table = power_coefficients(*q.model, q.theta0, q.eps, source);
    const double x = q.critical_value();
    const auto g = mixture_cdfs(q.noncentrality(), x);
    const double rn = std::sqrt(static_cast<double>(q.n));
    std::array<ClampedProbability<double>, 4> out;
    for (int i = 0; i < 4; ++i) {
        double corr = 0.0;
        for (int k = 0; k < 4; ++k) corr += table.a(i, k) * g[k];
        out[i] = clamp_probability(1.0 - g[0] - corr / rn);
    }
    return out;
}

ClampedProbability<double> local_power(const PowerQuery& q, TestKind test, CoefficientSource source)
{
    return local_powers(q, source)[index(test)];
}

double power_difference(const CoefficientTable& table, TestKind i, TestKind j, double lambda, double x,
                        long long n)
{
    const auto g = mixture_cdfs(lambda, x);
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += (table(j, k) - table(i, k)) * g[k];
    return sum / std::sqrt(static_cast<double>(n));
}

TelescopedDifference telescope(const CoefficientTable& table, TestKind i, TestKind j)
{
    const Eigen::RowVector4d c = table.row(j) - table.row(i);
    TelescopedDifference d;
    d.C[2] = c(3);
    d.C[1] = c(2) + c(3);
    d.C[0] = c(1) + c(2) + c(3);
    d.defect = c.sum();
    return d;
}

namespace {

// Sign of sum_m C_m g_{1+2m}: Less when the sum is negative, i.e. Pi_i > Pi_j.
Relation certificate_relation(const TelescopedDifference& d, double tol)
{
    if (std::abs(d.defect) > tol) return Relation::Mixed;
    bool any_pos = false, any_neg = false;
    for (double c : d.C) {
        if (c > tol) any_pos = true;
        if (c < -tol) any_neg = true;
    }
    if (any_pos && any_neg) return Relation::Mixed;
    if (any_neg) return Relation::Greater;
    if (any_pos) return Relation::Less;
    return Relation::Equal;
}

Relation flip(Relation r)
{
    if (r == Relation::Greater) return Relation::Less;
    if (r == Relation::Less) return Relation::Greater;
    return r;
}

} // namespace

const PairCertificate& OrderingReport::pair(TestKind i, TestKind j) const
{
    for (const auto& p : pairs) {
        if ((p.first == i && p.second == j) || (p.first == j && p.second == i)) return p;
    }
    throw DomainError("no certificate for the requested pair");
}

Relation OrderingReport::relation(TestKind i, TestKind j) const
{
    const auto& p = pair(i, j);
    return p.first == i ? p.relation : flip(p.relation);
}

std::string OrderingReport::summary() const
{
    std::ostringstream os;
    if (groups.empty()) {
        os << "no total order";
    } else {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (g) os << " > ";
            for (std::size_t k = 0; k < groups[g].size(); ++k) {
                if (k) os << " = ";
                os << to_string(groups[g][k]);
            }
        }
    }
    os << (uniform ? " (uniform in x)" : " (not uniform in x)");
    return os.str();
}

OrderingReport power_ordering(const ExpFamModel& model, double theta0, int direction, double alpha,
                              CoefficientSource source, std::vector<double> eps_grid)
{
    model.require_parameter(theta0);
    if (direction != 1 && direction != -1) throw DomainError("direction must be +1 or -1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (eps_grid.empty()) throw DomainError("eps grid is empty");

    OrderingReport rep;
    rep.source = source;
    rep.theta0 = theta0;
    rep.alpha = alpha;
    rep.direction = direction;
    for (double e : eps_grid) {
        if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("eps grid values must be positive");
        rep.eps_grid.push_back(direction * e);
    }

    std::vector<CoefficientTable> tables;
    for (double e : rep.eps_grid) tables.push_back(power_coefficients(model, theta0, e, source));

    const double info = model.information(theta0);
    const double xcrit = central_chisq_quantile(1.0, 1.0 - alpha);
    std::vector<double> xs{xcrit};
    for (int k = 1; k <= 200; ++k) xs.push_back(40.0 * k / 200.0);

    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            PairCertificate pc;
            pc.first = all_tests[i];
            pc.second = all_tests[j];
            bool first = true;
            long long greater = 0, total = 0;
            for (std::size_t e = 0; e < tables.size(); ++e) {
                const auto& tab = tables[e];
                const double tol = 1e-12 * std::max(1.0, tab.a.cwiseAbs().maxCoeff());
                const auto d = telescope(tab, pc.first, pc.second);
                pc.terms.push_back(d);
                Relation r = certificate_relation(d, tol);
                const double lambda = info * rep.eps_grid[e] * rep.eps_grid[e] / 2.0;
                if (r == Relation::Mixed) {
                    pc.uniform = false;
                    long long g = 0, l = 0;
                    for (double x : xs) {
                        const double diff = power_difference(tab, pc.first, pc.second, lambda, x, 1);
                        if (diff > tol) ++g;
                        else if (diff < -tol) ++l;
                    }
                    greater += g;
                    total += static_cast<long long>(xs.size());
                    r = (l == 0 && g > 0) ? Relation::Greater
                      : (g == 0 && l > 0) ? Relation::Less
                      : (g == 0 && l == 0) ? Relation::Equal
                                           : Relation::Mixed;
                } else {
                    total += static_cast<long long>(xs.size());
                    if (r == Relation::Greater) greater += static_cast<long long>(xs.size());
                }
                if (first) {
                    pc.relation = r;
                    first = false;
                } else if (pc.relation != r) {
                    pc.relation = Relation::Mixed;
                    pc.uniform = false;
                }
            }
            pc.fraction_greater = total ? static_cast<double>(greater) / total : 0.0;
            if (!pc.uniform) rep.uniform = false;
            rep.pairs.push_back(std::move(pc));
        }
    }

    // Group equal tests, then rank groups by how many tests they beat.
    std::array<int, 4> group_of{0, 1, 2, 3};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            if (rep.relation(all_tests[i], all_tests[j]) == Relation::Equal) {
                const int from = group_of[j], to = group_of[i];
                for (auto& g : group_of) if (g == from) g = to;
            }
    std::vector<std::vector<TestKind>> groups;
    for (int g = 0; g < 4; ++g) {
        std::vector<TestKind> members;
        for (std::size_t i = 0; i < 4; ++i) if (group_of[i] == g) members.push_back(all_tests[i]);
        if (!members.empty()) groups.push_back(members);
    }
    auto wins = [&](const std::vector<TestKind>& g) {
        int w = 0;
        for (TestKind t : all_tests)
            if (t != g.front() && rep.relation(g.front(), t) == Relation::Greater) ++w;
        return w;
    };
    std::stable_sort(groups.begin(), groups.end(),
                     [&](const auto& a, const auto& b) { return wins(a) > wins(b); });

    bool consistent = true;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t h = 0; h < groups.size(); ++h) {
            for (TestKind a : groups[g]) {
                for (TestKind b : groups[h]) {
                    if (a == b) continue;
                    const Relation r = rep.relation(a, b);
                    const Relation want = g == h ? Relation::Equal : g < h ? Relation::Greater : Relation::Less;
                    if (r != want) consistent = false;
                }
            }
        }
    }
    if (consistent) rep.groups = std::move(groups);
    return rep;
}

} // namespace gradpower
