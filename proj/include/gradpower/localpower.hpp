#ifndef GRADPOWER_LOCALPOWER_HPP
#define GRADPOWER_LOCALPOWER_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gradpower/expansion.hpp"
#include "gradpower/expfam.hpp"
#include "gradpower/teststats.hpp"

namespace gradpower {

/// Which a_{40} entry to use for the gradient row.
///   ConsistentChain: a_40 = kappa_ttt eps^3 / 6, so the row sums to zero and
///                    matches the scalar expansion.
///   PaperTable:      a_40 = (alpha'' beta' - alpha' beta'') eps^3 / 6, the
///                    published table entry (row need not sum to zero).
enum class CoefficientSource { ConsistentChain, PaperTable };

std::string to_string(CoefficientSource s);
CoefficientSource parse_coefficient_source(const std::string& s);

/// a(i, k): row i = test (LR, Wald, Score, Gradient), column k = mixture index.
struct CoefficientTable {
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    CoefficientSource source = CoefficientSource::ConsistentChain;
    double eps = 0.0;
    double theta0 = 0.0;

    double operator()(TestKind t, int k) const { return a(static_cast<Eigen::Index>(index(t)), k); }
    Eigen::RowVector4d row(TestKind t) const { return a.row(static_cast<Eigen::Index>(index(t))); }
};

/// Coefficient table from alpha', alpha'', beta', beta'' at theta0.
CoefficientTable power_coefficients(const ExpFamModel& model, double theta0, double eps,
                                    CoefficientSource source = CoefficientSource::ConsistentChain);

struct PowerQuery {
    const ExpFamModel* model = nullptr;
    double theta0 = 0.0;
    double eps = 0.0;
    long long n = 1;
    double alpha = 0.05;

    /// Throws DomainError on invalid size/level or parameters off the space.
    void validate() const;
    double critical_value() const;
    double noncentrality() const;
};

/// Local power of one test to order n^{-1/2}.
ClampedProbability<double> local_power(const PowerQuery& q, TestKind test,
                                       CoefficientSource source = CoefficientSource::ConsistentChain);

/// All four local powers (LR, Wald, Score, Gradient).
std::array<ClampedProbability<double>, 4>
local_powers(const PowerQuery& q, CoefficientSource source = CoefficientSource::ConsistentChain);

/// Pi_i - Pi_j = n^{-1/2} sum_k (a_jk - a_ik) G_{1+2k,lambda}(x), unclamped.
double power_difference(const CoefficientTable& table, TestKind i, TestKind j, double lambda, double x,
                        long long n);

/// Telescoped form of Pi_i - Pi_j: with c_k = a_jk - a_ik and
/// C_m = sum_{k >= m} c_k,
///
///   Pi_i - Pi_j = -(2 / sqrt n) sum_{m=1}^{3} C_m g_{1+2m,lambda}(x)
///
/// valid when sum_k c_k = 0. `defect` is that sum (zero unless the
/// paper-table gradient row is involved).
struct TelescopedDifference {
    std::array<double, 3> C{};
    double defect = 0.0;
};

TelescopedDifference telescope(const CoefficientTable& table, TestKind i, TestKind j);

enum class Relation { Greater, Less, Equal, Mixed };

std::string to_string(Relation r);

struct PairCertificate {
    TestKind first = TestKind::LR;
    TestKind second = TestKind::Wald;
    /// Combined over the eps grid.
    Relation relation = Relation::Equal;
    /// true when every eps in the grid gave the same relation from the signs of
    /// the C_m alone (holds for all x and lambda).
    bool uniform = true;
    /// Telescoped partial sums per eps grid point.
    std::vector<TelescopedDifference> terms;
    /// Fraction of (x, lambda) grid points where Pi_first > Pi_second, for
    /// pairs whose certificate is not sign-definite.
    double fraction_greater = 0.0;
};

struct OrderingReport {
    CoefficientSource source = CoefficientSource::ConsistentChain;
    double theta0 = 0.0;
    double alpha = 0.05;
    int direction = 1;  ///< +1: theta above theta0, -1: below
    std::vector<double> eps_grid;
    std::vector<PairCertificate> pairs;
    /// Tests grouped by equal power, strongest group first. Empty when the
    /// pairwise relations do not form a total preorder.
    std::vector<std::vector<TestKind>> groups;
    bool uniform = true;

    const PairCertificate& pair(TestKind i, TestKind j) const;
    /// Relation of Pi_i to Pi_j.
    Relation relation(TestKind i, TestKind j) const;
    /// e.g. "gradient > lr > wald = score (uniform in x)".
    std::string summary() const;
};

/// Orders the four tests by local power. Orderings are determined from the
/// telescoped representation; pairs that are not sign-definite are evaluated
/// on an (x, lambda) grid and reported as non-uniform.
OrderingReport power_ordering(const ExpFamModel& model, double theta0, int direction, double alpha,
                              CoefficientSource source = CoefficientSource::ConsistentChain,
                              std::vector<double> eps_grid = {0.25, 0.5, 1.0, 2.0});

} // namespace gradpower

#endif // GRADPOWER_LOCALPOWER_HPP
