#ifndef SBL_BOUNDS_HPP
#define SBL_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sbl/hypotheses.hpp"
#include "sbl/log_scalar.hpp"

namespace sbl {

/// Lower bound on the alpha-isoperimetric ratio of a closed manifold with
/// dimension m, Ric + Hess f >= -K g, |grad f| <= L, diameter <= diam and
/// volume vol.  Above the critical exponent m/(m-1) the bound degenerates
/// and the log-space zero is returned.
inline LogScalar in_alpha_lower_bound(const GeometricHypotheses& hyp, double alpha,
                                      double diam, double vol) {
    validate(hyp);
    if (!(alpha > 0.0))
        throw std::invalid_argument("in_alpha_lower_bound: alpha must be > 0");
    if (!(diam > 0.0))
        throw std::invalid_argument("in_alpha_lower_bound: diam must be > 0");
    if (!(vol > 0.0))
        throw std::invalid_argument("in_alpha_lower_bound: vol must be > 0");
    const int m = hyp.dimension;
    if (alpha > static_cast<double>(m) / (m - 1)) return LogScalar::zero();
    const double K = hyp.curvature_bound;
    const double L = hyp.gradient_bound;
    double log_v = -std::log(diam) - (2 * m + 1) * std::log(2.0) - m * std::log(5.0);
    if (alpha >= 1.0)
        log_v += -(24.0 - 2.0 / alpha) * L * diam - (104.0 - 1.0 / alpha) * K * diam * diam;
    else
        log_v += -22.0 * L * diam - 103.0 * K * diam * diam;
    log_v += (1.0 - 1.0 / alpha) * std::log(vol);
    return LogScalar::from_log(log_v);
}

/// Cheeger-type passage from the 1-isoperimetric ratio to the spectral gap:
/// lambda_1 >= IN_1^2 / 4.
inline LogScalar cheeger_lambda1(const LogScalar& in_one) {
    if (in_one.is_zero()) return LogScalar::zero();
    return LogScalar::from_log(2.0 * in_one.log_value() - std::log(4.0));
}

/// Explicit uniform lower bound on lambda_1:
/// (1/16) D^-2 400^-m e^{-44 L D - 206 K D^2}.
inline LogScalar lambda1_lower_bound(const GeometricHypotheses& hyp) {
    validate(hyp);
    const int m = hyp.dimension;
    const double K = hyp.curvature_bound;
    const double L = hyp.gradient_bound;
    const double D = hyp.diameter;
    const double log_v = -std::log(16.0) - 2.0 * std::log(D) - m * std::log(400.0) -
                         44.0 * L * D - 206.0 * K * D * D;
    return LogScalar::from_log(log_v);
}

enum class SobolevBranch {
    surface,             // m == 2, L4-based inequality
    higher_dimensional,  // m >= 3, critical-exponent inequality
};

/// Constants of the explicit Sobolev-type inequality
///   grad energy >= c1 * vol^{2/p} * (critical norm)  -  c2 * (L2 norm),
/// split into the dimension-only factors and the geometric factor whose
/// square carries all K, L, D dependence.  c1 = dim_c1 * geometric_factor^2
/// and c2 = c1 * dim_c2 on both branches.
struct SobolevConstants {
    SobolevBranch branch = SobolevBranch::surface;
    LogScalar c1;
    LogScalar c2;
    double dim_c1 = 0.0;
    double dim_c2 = 0.0;
    LogScalar geometric_factor;
};

inline SobolevConstants sobolev_constants(const GeometricHypotheses& hyp) {
    validate(hyp);
    const int m = hyp.dimension;
    SobolevConstants sc;
    if (m == 2) {
        sc.branch = SobolevBranch::surface;
        sc.dim_c1 = std::pow(3.0, -2.0) * std::pow(2.0, -1.0 / 6.0);
        sc.dim_c2 = std::pow(2.0, 7.0 / 6.0);
        // The surface branch rests on the isoperimetric bound at alpha = 4/3.
        sc.geometric_factor = in_alpha_lower_bound(hyp, 4.0 / 3.0, hyp.diameter, 1.0);
    } else {
        sc.branch = SobolevBranch::higher_dimensional;
        const double md = static_cast<double>(m);
        sc.dim_c1 = (md - 2.0) * (md - 2.0) / (4.0 * (md - 1.0) * (md - 1.0)) *
                    std::pow(2.0, (2.0 - md) / (md * (md - 1.0)));
        sc.dim_c2 = std::pow(2.0, (2.0 * md * md * md - 7.0 * md * md + 2.0 * md + 4.0) /
                                      (md * (md - 1.0) * (md - 2.0)));
        // Critical exponent m/(m-1); the volume power is carried by callers.
        sc.geometric_factor = in_alpha_lower_bound(hyp, md / (md - 1.0), hyp.diameter, 1.0);
    }
    sc.c1 = LogScalar::from_linear(sc.dim_c1) * sc.geometric_factor.pow(2.0);
    sc.c2 = sc.c1 * LogScalar::from_linear(sc.dim_c2);
    return sc;
}

namespace detail {

// Exponent applied to the Sobolev quotient in the sup-norm iteration.
inline double quotient_exponent(int m) { return m == 2 ? 2.0 : 0.5 * m; }

// log of 2^8 (m = 2) or 2^m (m/(m-2))^{m(m-2)/2} (m >= 3).
inline double peak_prefactor_log(int m) {
    if (m == 2) return 8.0 * std::log(2.0);
    const double md = static_cast<double>(m);
    return md * std::log(2.0) + 0.5 * md * (md - 2.0) * std::log(md / (md - 2.0));
}

// log((coeff*lambda + 2K + 2L^2 + c2) / c1) with lambda in linear scale.
inline double shifted_quotient_log(const GeometricHypotheses& hyp, const SobolevConstants& sob,
                                   double coeff, double lambda) {
    const double lin = coeff * lambda + 2.0 * hyp.curvature_bound +
                       2.0 * hyp.gradient_bound * hyp.gradient_bound;
    const double num = lin > 0.0 ? log_sum_exp(std::log(lin), sob.c2.log_value())
                                 : sob.c2.log_value();
    return num - sob.c1.log_value();
}

// Same quotient with lambda in log scale, for chain constants evaluated at
// the (possibly underflowing) first-gap bound.
inline double shifted_quotient_log(const GeometricHypotheses& hyp, const SobolevConstants& sob,
                                   double coeff, const LogScalar& lambda) {
    const double lin = 2.0 * hyp.curvature_bound +
                       2.0 * hyp.gradient_bound * hyp.gradient_bound;
    double num = lambda.is_zero() ? -std::numeric_limits<double>::infinity()
                                  : std::log(coeff) + lambda.log_value();
    if (lin > 0.0) num = log_sum_exp(num, std::log(lin));
    num = log_sum_exp(num, sob.c2.log_value());
    return num - sob.c1.log_value();
}

inline LogScalar eigenvalue_sum_bound_core(const GeometricHypotheses& hyp,
                                           const SobolevConstants& sob,
                                           const LogScalar& lambda_k) {
    const int m = hyp.dimension;
    const double L = hyp.gradient_bound;
    const LogScalar peak = lambda_k + LogScalar::from_linear(L * L);
    if (peak.is_zero()) return LogScalar::zero();
    const double log_v = std::log(m == 2 ? 2.0 : static_cast<double>(m)) +
                         peak_prefactor_log(m) +
                         quotient_exponent(m) * shifted_quotient_log(hyp, sob, 6.0, lambda_k) +
                         peak.log_value();
    return LogScalar::from_log(log_v);
}

}  // namespace detail

/// Sup-norm bound on |grad u|^2 + L^2 u^2 for an eigenfunction u with
/// eigenvalue lambda and squared L2 norm l2_norm_sq on a manifold of
/// volume vol.
inline LogScalar eigenfunction_gradient_bound(const GeometricHypotheses& hyp, double lambda,
                                              double vol, double l2_norm_sq) {
    validate(hyp);
    if (lambda < 0.0)
        throw std::invalid_argument("eigenfunction_gradient_bound: lambda must be >= 0");
    if (!(vol > 0.0))
        throw std::invalid_argument("eigenfunction_gradient_bound: vol must be > 0");
    if (l2_norm_sq < 0.0)
        throw std::invalid_argument("eigenfunction_gradient_bound: l2_norm_sq must be >= 0");
    const double L = hyp.gradient_bound;
    const double peak = lambda + L * L;
    if (peak == 0.0 || l2_norm_sq == 0.0) return LogScalar::zero();
    const SobolevConstants sob = sobolev_constants(hyp);
    const int m = hyp.dimension;
    const double log_v = detail::peak_prefactor_log(m) +
                         detail::quotient_exponent(m) *
                             detail::shifted_quotient_log(hyp, sob, 3.0, lambda) +
                         std::log(peak) - std::log(vol) + std::log(l2_norm_sq);
    return LogScalar::from_log(log_v);
}

/// Sup-norm bound on |grad w|^2 + L^2 w^2 for w a unit-coefficient
/// combination of the first k eigenfunctions, lambda_k the largest
/// eigenvalue entering the combination.
inline LogScalar combination_gradient_bound(const GeometricHypotheses& hyp, double lambda_k,
                                            double vol) {
    validate(hyp);
    if (lambda_k < 0.0)
        throw std::invalid_argument("combination_gradient_bound: lambda_k must be >= 0");
    if (!(vol > 0.0))
        throw std::invalid_argument("combination_gradient_bound: vol must be > 0");
    const double L = hyp.gradient_bound;
    const double peak = lambda_k + L * L;
    if (peak == 0.0) return LogScalar::zero();
    const SobolevConstants sob = sobolev_constants(hyp);
    const int m = hyp.dimension;
    const double log_v = detail::peak_prefactor_log(m) +
                         detail::quotient_exponent(m) *
                             detail::shifted_quotient_log(hyp, sob, 6.0, lambda_k) +
                         std::log(peak) - std::log(vol);
    return LogScalar::from_log(log_v);
}

/// Bound on lambda_1 + ... + lambda_k in terms of lambda_k alone; the
/// volume-free integrated form of the combination bound.
inline LogScalar eigenvalue_sum_bound(const GeometricHypotheses& hyp, double lambda_k) {
    validate(hyp);
    if (lambda_k < 0.0)
        throw std::invalid_argument("eigenvalue_sum_bound: lambda_k must be >= 0");
    const double L = hyp.gradient_bound;
    const double peak = lambda_k + L * L;
    if (peak == 0.0) return LogScalar::zero();
    const SobolevConstants sob = sobolev_constants(hyp);
    const int m = hyp.dimension;
    const double log_v = std::log(m == 2 ? 2.0 : static_cast<double>(m)) +
                         detail::peak_prefactor_log(m) +
                         detail::quotient_exponent(m) *
                             detail::shifted_quotient_log(hyp, sob, 6.0, lambda_k) +
                         std::log(peak);
    return LogScalar::from_log(log_v);
}

/// Recursion constant of the eigenvalue-growth lemma: for nondecreasing
/// lambda with lambda_1+...+lambda_k <= c3 * lambda_k^{m/2+1} for all k,
/// lambda_k >= C4 k^{2/m} with C4 = min(lambda_1, (m/(c3(m+2)))^{2/m}).
inline double wz_recursion_constant(int m, double c3, double lambda1) {
    if (m < 1)
        throw std::invalid_argument("wz_recursion_constant: m must be >= 1");
    if (!(c3 > 0.0))
        throw std::invalid_argument("wz_recursion_constant: c3 must be > 0");
    if (!(lambda1 > 0.0))
        throw std::invalid_argument("wz_recursion_constant: lambda1 must be > 0");
    const double md = static_cast<double>(m);
    return std::min(lambda1, std::pow(md / (c3 * (md + 2.0)), 2.0 / md));
}

/// The full constant chain behind the lambda_k growth bound.
struct BoundChain {
    LogScalar isoperimetric;       // IN_1 lower bound at scale D
    LogScalar first_gap;           // uniform lower bound on lambda_1
    SobolevConstants sobolev;
    LogScalar sum_bound_at_gap;    // eigenvalue-sum bound evaluated at lambda_k = first_gap
    LogScalar recursion_constant;  // C with sum(lambda_j) <= C lambda_k^{p/2+1}
    LogScalar growth_coefficient;  // lambda_k >= growth_coefficient * k^growth_exponent, k >= 2
    double growth_exponent = 0.0;  // 2/m for m >= 3, 1/2 for m = 2
};

inline BoundChain bound_chain(const GeometricHypotheses& hyp) {
    validate(hyp);
    BoundChain ch;
    ch.isoperimetric = in_alpha_lower_bound(hyp, 1.0, hyp.diameter, 1.0);
    ch.first_gap = lambda1_lower_bound(hyp);
    ch.sobolev = sobolev_constants(hyp);
    ch.sum_bound_at_gap = detail::eigenvalue_sum_bound_core(hyp, ch.sobolev, ch.first_gap);
    const int m = hyp.dimension;
    // On the surface branch the sum bound grows like lambda^3, which is the
    // p/2+1 scaling of an effective dimension p = 4; for m >= 3, p = m.
    const double p = m == 2 ? 4.0 : static_cast<double>(m);
    const double sum_power = 0.5 * p + 1.0;
    ch.recursion_constant = ch.first_gap.pow(-sum_power) * ch.sum_bound_at_gap;
    ch.growth_exponent = 2.0 / p;
    const LogScalar alt =
        (LogScalar::from_linear(p) / (ch.recursion_constant * LogScalar::from_linear(p + 2.0)))
            .pow(2.0 / p);
    ch.growth_coefficient = min(ch.first_gap, alt);
    return ch;
}

/// Lower bound on lambda_k: the first-gap bound at k = 1, the growth bound
/// growth_coefficient * k^growth_exponent for k >= 2.
inline LogScalar lambda_k_lower_bound(const GeometricHypotheses& hyp, int k) {
    if (k < 1)
        throw std::invalid_argument("lambda_k_lower_bound: k must be >= 1");
    if (k == 1) return lambda1_lower_bound(hyp);
    const BoundChain ch = bound_chain(hyp);
    return LogScalar::from_log(ch.growth_coefficient.log_value() +
                               ch.growth_exponent * std::log(static_cast<double>(k)));
}

enum class VolumeRatioVariant {
    ball,          // vol(B_r2)/r2^m <= bound * vol(B_r1)/r1^m
    area_element,  // A(r2,theta)/A(r1,theta) <= bound along one ray
};

/// Relative volume (or area-element) comparison factor between radii
/// r1 < r2 under the curvature hypotheses.
inline double volume_ratio_bound(const GeometricHypotheses& hyp, double r1, double r2,
                                 VolumeRatioVariant variant = VolumeRatioVariant::ball) {
    validate(hyp);
    if (!(r1 > 0.0))
        throw std::invalid_argument("volume_ratio_bound: r1 must be > 0");
    if (!(r2 > r1))
        throw std::invalid_argument("volume_ratio_bound: r2 must be > r1");
    const double K = hyp.curvature_bound;
    const double L = hyp.gradient_bound;
    if (variant == VolumeRatioVariant::ball)
        return std::exp(K * (r2 * r2 - r1 * r1) + 2.0 * L * (r2 - r1));
    return std::exp(2.0 * L * r2 + K * r2 * r2) *
           std::pow(r2 / r1, static_cast<double>(hyp.dimension - 1));
}

}  // namespace sbl

#endif  // SBL_BOUNDS_HPP
