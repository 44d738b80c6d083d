#ifndef SBL_HYPOTHESES_HPP
#define SBL_HYPOTHESES_HPP

#include <optional>
#include <stdexcept>
#include <string>

namespace sbl {

/// Geometric hypotheses a bound is evaluated under.  Matches the CLI flags:
/// --m dimension, --K curvature bound, --L drift gradient bound, --D diameter
/// upper bound, --vol volume.  K and L certify Ric + Hess f >= -K g together
/// with |grad f| <= L for some potential f; the operator under study is the
/// plain Laplace-Beltrami operator, never the drifted one.
struct GeometricHypotheses {
    int dimension = 0;              // m >= 2
    double curvature_bound = 0.0;   // K >= 0
    double gradient_bound = 0.0;    // L >= 0
    double diameter = 0.0;          // D > 0
    std::optional<double> volume;   // vol(M) > 0, only some formulas need it
};

inline void validate(const GeometricHypotheses& hyp) {
    if (hyp.dimension < 2)
        throw std::invalid_argument("GeometricHypotheses: dimension must be >= 2, got " +
                                    std::to_string(hyp.dimension));
    if (!(hyp.curvature_bound >= 0.0))
        throw std::invalid_argument("GeometricHypotheses: curvature bound K must be >= 0");
    if (!(hyp.gradient_bound >= 0.0))
        throw std::invalid_argument("GeometricHypotheses: gradient bound L must be >= 0");
    if (!(hyp.diameter > 0.0))
        throw std::invalid_argument("GeometricHypotheses: diameter must be > 0");
    if (hyp.volume && !(*hyp.volume > 0.0))
        throw std::invalid_argument("GeometricHypotheses: volume must be > 0 when given");
}

inline double require_volume(const GeometricHypotheses& hyp, const char* who) {
    if (!hyp.volume)
        throw std::invalid_argument(std::string(who) + ": hypotheses carry no volume but the formula needs vol(M)");
    return *hyp.volume;
}

}  // namespace sbl

#endif  // SBL_HYPOTHESES_HPP
