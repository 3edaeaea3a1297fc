///
/// \file expansion.hpp
///
/// Order n^{-1/2} expansion of the null/local-alternative distribution of the
/// gradient statistic,
///
///   Pr(S <= x) = G_{f,lambda}(x) + n^{-1/2} sum_{k=0}^{3} a_k G_{f+2k,lambda}(x),
///
/// from joint cumulants of log-likelihood derivatives evaluated at the
/// restricted point (theta_1, theta_20). The parameter vector is partitioned
/// as (nuisance block of size q, tested block of size f = p - q).
///
/// Triple-index contractions:
///   K o a o b o c = sum_{rst} k_{rst} a_r b_s c_t
///   K o M o b     = sum_{rst} k_{rst} m_{rs} b_t
/// and the block forms restrict the first index to the tested block.
///
#ifndef GRADPOWER_EXPANSION_HPP
#define GRADPOWER_EXPANSION_HPP

#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/CXX11/Tensor>

#include "gradpower/errors.hpp"
#include "gradpower/expfam.hpp"
#include "gradpower/specfun.hpp"

namespace gradpower {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Tensor3 = Eigen::Tensor<Scalar, 3>;

/// Cumulant arrays at the restricted point.
///   K    -- kappa_{r,s} (Fisher information, p x p)
///   k3   -- kappa_{rst}
///   k21  -- kappa_{r,st} (first index is the singly differentiated one)
///   k111 -- kappa_{r,s,t}, optional
template <typename Scalar>
struct CumulantTensors {
    Eigen::Index p = 0;
    Eigen::Index q = 0;
    Matrix<Scalar> K;
    Tensor3<Scalar> k3;
    Tensor3<Scalar> k21;
    std::optional<Tensor3<Scalar>> k111;
};

template <typename Scalar>
struct PowerExpansion {
    Eigen::Index f = 1;
    Scalar lambda = 0;
    std::array<Scalar, 4> a{};
};

template <typename Scalar>
struct MomentSet {
    Scalar m1 = 0;  ///< mean, as f + lambda + 2 A1 / sqrt(n)
    Scalar m2 = 0;  ///< variance
    Scalar m3 = 0;  ///< third central moment
    std::array<Scalar, 3> A{};
    /// Mean implied by the chi-square mixture: f + 2 lambda + (2/sqrt n) sum k a_k.
    Scalar mixture_mean = 0;
};

/// Result of evaluating a probability expansion, which can leave [0, 1].
template <typename Scalar>
struct ClampedProbability {
    Scalar value = 0;
    Scalar raw = 0;
    bool out_of_range = false;
};

template <typename Scalar>
ClampedProbability<Scalar> clamp_probability(Scalar raw)
{
    ClampedProbability<Scalar> r;
    r.raw = raw;
    r.value = std::min(std::max(raw, Scalar(0)), Scalar(1));
    r.out_of_range = r.value != raw;
    return r;
}

//------------------------------------------------------------------------------
// contractions
//------------------------------------------------------------------------------

template <typename Scalar>
Scalar contract(const Tensor3<Scalar>& k, const Vector<Scalar>& a, const Vector<Scalar>& b,
                const Vector<Scalar>& c)
{
    const Eigen::Index p = k.dimension(0);
    Scalar sum = 0;
    for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index s = 0; s < p; ++s)
            for (Eigen::Index t = 0; t < p; ++t)
                sum += k(r, s, t) * a(r) * b(s) * c(t);
    return sum;
}

template <typename Scalar>
Scalar contract(const Tensor3<Scalar>& k, const Matrix<Scalar>& m, const Vector<Scalar>& b)
{
    const Eigen::Index p = k.dimension(0);
    Scalar sum = 0;
    for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index s = 0; s < p; ++s)
            for (Eigen::Index t = 0; t < p; ++t)
                sum += k(r, s, t) * m(r, s) * b(t);
    return sum;
}

/// sum over r in the tested block (r = q..p-1), all s, t.
/// `a2` has length p - q.
template <typename Scalar>
Scalar contract_tested(const Tensor3<Scalar>& k, Eigen::Index q, const Vector<Scalar>& a2,
                       const Vector<Scalar>& b, const Vector<Scalar>& c)
{
    const Eigen::Index p = k.dimension(0);
    Scalar sum = 0;
    for (Eigen::Index r = q; r < p; ++r)
        for (Eigen::Index s = 0; s < p; ++s)
            for (Eigen::Index t = 0; t < p; ++t)
                sum += k(r, s, t) * a2(r - q) * b(s) * c(t);
    return sum;
}

//------------------------------------------------------------------------------
// validation
//------------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
Scalar max_abs(const Tensor3<Scalar>& k)
{
    Scalar m = 0;
    for (Eigen::Index i = 0; i < k.size(); ++i) m = std::max(m, std::abs(k.data()[i]));
    return m;
}

template <typename Scalar>
void check_tensor_symmetry(const Tensor3<Scalar>& k, Eigen::Index p, bool full, const char* name,
                           Scalar tol)
{
    if (k.dimension(0) != p || k.dimension(1) != p || k.dimension(2) != p) {
        throw DomainError(std::string(name) + " must be p x p x p");
    }
    const Scalar scale = tol * std::max(Scalar(1), max_abs(k));
    auto fail = [&](Eigen::Index r, Eigen::Index s, Eigen::Index t) {
        std::ostringstream os;
        os << name << " is not symmetric at (" << r << "," << s << "," << t << ")";
        throw DomainError(os.str());
    };
    for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index s = 0; s < p; ++s)
            for (Eigen::Index t = 0; t < p; ++t) {
                const Scalar v = k(r, s, t);
                if (std::abs(v - k(r, t, s)) > scale) fail(r, s, t);
                if (full && (std::abs(v - k(s, r, t)) > scale || std::abs(v - k(t, s, r)) > scale))
                    fail(r, s, t);
            }
}

} // namespace detail

/// Checks dimensions, symmetry (relative tolerance) and positive definiteness.
template <typename Scalar>
void validate(const CumulantTensors<Scalar>& t, Scalar tol = Scalar(1e-12))
{
    if (t.p < 1) throw DomainError("p must be at least 1");
    if (t.q < 0 || t.q >= t.p) throw DomainError("q must satisfy 0 <= q < p");
    if (t.K.rows() != t.p || t.K.cols() != t.p) throw DomainError("K must be p x p");
    if (!t.K.allFinite()) throw DomainError("K has non-finite entries");
    const Scalar kscale = tol * std::max(Scalar(1), t.K.cwiseAbs().maxCoeff());
    if ((t.K - t.K.transpose()).cwiseAbs().maxCoeff() > kscale) {
        throw DomainError("K is not symmetric");
    }
    Eigen::LLT<Matrix<Scalar>> llt(t.K);
    if (llt.info() != Eigen::Success) {
        throw DomainError("K is not positive definite");
    }
    detail::check_tensor_symmetry(t.k3, t.p, true, "k3", tol);
    detail::check_tensor_symmetry(t.k21, t.p, false, "k21", tol);
    if (t.k111) detail::check_tensor_symmetry(*t.k111, t.p, true, "k111", tol);
}

/// p = 1, q = 0 tensors from scalar cumulants.
template <typename Scalar = double>
CumulantTensors<Scalar> tensors_from_cumulants(const CumulantSet& c)
{
    CumulantTensors<Scalar> t;
    t.p = 1;
    t.q = 0;
    t.K = Matrix<Scalar>::Constant(1, 1, -c.k_tt);
    t.k3 = Tensor3<Scalar>(1, 1, 1);
    t.k3(0, 0, 0) = c.k_ttt;
    t.k21 = Tensor3<Scalar>(1, 1, 1);
    t.k21(0, 0, 0) = c.k_t_tt;
    Tensor3<Scalar> k111(1, 1, 1);
    k111(0, 0, 0) = c.k_t_t_t;
    t.k111 = k111;
    return t;
}

//------------------------------------------------------------------------------
// coefficients
//------------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
struct PartitionTerms {
    Vector<Scalar> eps_star;  // [K11^{-1} K12; -I] eps
    Matrix<Scalar> A;         // blockdiag(K11^{-1}, 0)
    Matrix<Scalar> Kinv;
    Scalar lambda;
};

template <typename Scalar>
PartitionTerms<Scalar> partition_terms(const CumulantTensors<Scalar>& t, const Vector<Scalar>& eps)
{
    const Eigen::Index p = t.p, q = t.q, f = p - q;
    if (eps.size() != f) {
        throw DomainError("eps must have length p - q");
    }
    if (!eps.allFinite()) throw DomainError("eps has non-finite entries");
    PartitionTerms<Scalar> out;
    out.Kinv = t.K.llt().solve(Matrix<Scalar>::Identity(p, p));
    out.A = Matrix<Scalar>::Zero(p, p);
    out.eps_star = Vector<Scalar>::Zero(p);
    out.eps_star.tail(f) = -eps;
    Matrix<Scalar> K221 = t.K.bottomRightCorner(f, f);
    if (q > 0) {
        const Matrix<Scalar> K11 = t.K.topLeftCorner(q, q);
        const Matrix<Scalar> K12 = t.K.topRightCorner(q, f);
        Eigen::LLT<Matrix<Scalar>> llt11(K11);
        const Matrix<Scalar> K11inv = llt11.solve(Matrix<Scalar>::Identity(q, q));
        out.A.topLeftCorner(q, q) = K11inv;
        out.eps_star.head(q) = K11inv * K12 * eps;
        K221 -= K12.transpose() * K11inv * K12;
    }
    out.lambda = eps.dot(K221 * eps) / 2;
    return out;
}

} // namespace detail

/// Coefficients for a composite null with q nuisance parameters.
template <typename Scalar>
PowerExpansion<Scalar> composite_coefficients(const CumulantTensors<Scalar>& t, const Vector<Scalar>& eps)
{
    validate(t);
    const auto pt = detail::partition_terms(t, eps);
    const Vector<Scalar>& es = pt.eps_star;

    const Scalar k3_kinv = contract(t.k3, pt.Kinv, es);
    const Scalar k3_A = contract(t.k3, pt.A, es);
    const Scalar k21_A = contract(t.k21, pt.A, es);
    const Scalar k3_ccc = contract(t.k3, es, es, es);
    const Scalar k21_ccc = contract(t.k21, es, es, es);
    const Scalar k3_block = contract_tested(t.k3, t.q, eps, es, es);
    const Scalar k21_block = contract_tested(t.k21, t.q, eps, es, es);

    PowerExpansion<Scalar> e;
    e.f = t.p - t.q;
    e.lambda = pt.lambda;
    e.a[1] = (k3_kinv - (4 * k21_A + 3 * k3_A) - 2 * (k3_ccc + 2 * k21_ccc)
              - 2 * (k3_block + k21_block))
           / 4;
    e.a[2] = -(contract(t.k3, Matrix<Scalar>(pt.Kinv - pt.A), es) - (k3_ccc + 2 * k21_ccc)) / 4;
    e.a[3] = -k3_ccc / 12;
    e.a[0] = -(e.a[1] + e.a[2] + e.a[3]);
    return e;
}

/// Simple null (q = 0) closed forms.
template <typename Scalar>
PowerExpansion<Scalar> simple_coefficients(const CumulantTensors<Scalar>& t, const Vector<Scalar>& eps)
{
    if (t.q != 0) {
        throw DomainError("simple_coefficients requires q = 0");
    }
    validate(t);
    if (eps.size() != t.p) throw DomainError("eps must have length p");
    const Matrix<Scalar> Kinv = t.K.llt().solve(Matrix<Scalar>::Identity(t.p, t.p));
    const Scalar k3_kinv = contract(t.k3, Kinv, eps);
    const Scalar k3_eee = contract(t.k3, eps, eps, eps);
    const Scalar k21_eee = contract(t.k21, eps, eps, eps);

    PowerExpansion<Scalar> e;
    e.f = t.p;
    e.lambda = eps.dot(t.K * eps) / 2;
    e.a[0] = k3_eee / 6;
    e.a[1] = -(k3_kinv - 2 * k21_eee) / 4;
    e.a[2] = (k3_kinv - (k3_eee + 2 * k21_eee)) / 4;
    e.a[3] = k3_eee / 12;
    return e;
}

/// One-parameter closed forms in terms of scalar cumulants.
inline PowerExpansion<double> scalar_coefficients(const CumulantSet& c, double eps)
{
    const double e3 = eps * eps * eps;
    PowerExpansion<double> e;
    e.f = 1;
    e.lambda = -c.k_tt * eps * eps / 2.0;
    e.a[0] = c.k_ttt * e3 / 6.0;
    e.a[1] = -(c.k_ttt * c.k_inv * eps - 2.0 * c.k_t_tt * e3) / 4.0;
    e.a[2] = (c.k_ttt * c.k_inv * eps - (c.k_ttt + 2.0 * c.k_t_tt) * e3) / 4.0;
    e.a[3] = c.k_ttt * e3 / 12.0;
    return e;
}

/// Pr(S <= x) to order n^{-1/2}. Negative x gives 0.
template <typename Scalar>
ClampedProbability<Scalar> cdf_expansion(const PowerExpansion<Scalar>& e, long long n, Scalar x)
{
    if (n < 1) throw DomainError("n must be positive");
    if (std::isnan(x)) throw DomainError("x is NaN");
    if (x <= 0) return clamp_probability(Scalar(0));
    const Scalar f = static_cast<Scalar>(e.f);
    Scalar correction = 0;
    for (int k = 0; k < 4; ++k) {
        if (e.a[k] != 0) {
            correction += e.a[k] * nc_chisq_cdf(ChiSquareParams<Scalar>{f + 2 * k, e.lambda}, x);
        }
    }
    const Scalar base = nc_chisq_cdf(ChiSquareParams<Scalar>{f, e.lambda}, x);
    return clamp_probability(base + correction / std::sqrt(static_cast<Scalar>(n)));
}

/// First three moments of the gradient statistic to order n^{-1/2}, both as
/// the closed-form moment display (m1, m2, m3) and as the mean implied by the
/// chi-square mixture (mixture_mean).
template <typename Scalar>
MomentSet<Scalar> st_moments(const CumulantTensors<Scalar>& t, const Vector<Scalar>& eps, long long n)
{
    if (n < 1) throw DomainError("n must be positive");
    const auto e = composite_coefficients(t, eps);
    const auto pt = detail::partition_terms(t, eps);
    const Vector<Scalar>& es = pt.eps_star;

    const Scalar k3_kinv = contract(t.k3, pt.Kinv, es);
    const Scalar k3_A = contract(t.k3, pt.A, es);
    const Scalar k21_A = contract(t.k21, pt.A, es);
    const Scalar k3_ccc = contract(t.k3, es, es, es);
    const Scalar k21_ccc = contract(t.k21, es, es, es);

    MomentSet<Scalar> m;
    m.A[0] = -(k3_kinv + 4 * k21_A + k3_A + k3_ccc) / 4;
    m.A[1] = -(k3_kinv - k3_A - 2 * k21_ccc) / 4;
    m.A[2] = -k3_ccc / 12;

    const Scalar f = static_cast<Scalar>(e.f);
    const Scalar rn = std::sqrt(static_cast<Scalar>(n));
    m.m1 = f + e.lambda + 2 * m.A[0] / rn;
    m.m2 = 2 * (f + 2 * e.lambda) + 8 * (m.A[0] + m.A[1]) / rn;
    m.m3 = 8 * (f + 3 * e.lambda) + 6 * (m.A[0] + 2 * m.A[1] + m.A[2]) / rn;
    m.mixture_mean = f + 2 * e.lambda + 2 * (e.a[1] + 2 * e.a[2] + 3 * e.a[3]) / rn;
    return m;
}

/// Whether k3 == 2 k111 holds entrywise (the condition under which the score
/// and gradient tests share local power). Requires k111.
template <typename Scalar>
bool score_gradient_condition(const CumulantTensors<Scalar>& t, Scalar tol = Scalar(1e-12))
{
    if (!t.k111) throw DomainError("k111 is required for this check");
    const Scalar scale = tol * std::max(Scalar(1), detail::max_abs(t.k3));
    for (Eigen::Index i = 0; i < t.k3.size(); ++i) {
        if (std::abs(t.k3.data()[i] - 2 * t.k111->data()[i]) > scale) return false;
    }
    return true;
}

} // namespace gradpower

#endif // GRADPOWER_EXPANSION_HPP
