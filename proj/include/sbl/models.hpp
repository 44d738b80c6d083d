#ifndef SBL_MODELS_HPP
#define SBL_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbl/grid.hpp"
#include "sbl/hypotheses.hpp"
#include "sbl/mesh.hpp"

namespace sbl {

enum class ModelKind { sphere, torus };

/// A discretized catalog manifold together with its generator parameters.
/// Exactly one of mesh/grid is populated, matching `kind`.
struct ModelManifold {
    ModelKind kind = ModelKind::sphere;
    std::string name;         // canonical descriptor, e.g. "sphere:4", "torus:2:64"
    int dimension = 2;        // intrinsic dimension m
    int subdivisions = 0;     // sphere models
    int points_per_axis = 0;  // torus models
    TriangleMesh mesh;
    PeriodicGrid grid;

    std::size_t vertex_count() const {
        return kind == ModelKind::sphere ? mesh.vertex_count() : grid.vertex_count;
    }
};

/// Sampled potential with certified curvature data: Ric + Hess f >= -K_eff g
/// and |grad f| <= L_eff hold exactly for the catalog entries.
struct PotentialField {
    std::string spec;        // "zero" or "axcos:A"
    std::string model_name;  // model the samples were generated for
    double amplitude = 0.0;
    std::vector<double> samples;
    double K_eff = 0.0;
    double L_eff = 0.0;
};

/// Exact continuum data for a catalog model.
struct ReferenceData {
    std::vector<double> exact_eigenvalues;  // 200 lowest, with multiplicity
    double diameter = 0.0;
    double volume = 0.0;
    double ricci_lower = 0.0;
};

namespace detail {

inline int parse_int_token(const std::string& token, const std::string& descriptor) {
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(token, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != token.size())
        throw std::invalid_argument("unknown model descriptor '" + descriptor +
                                    "', expected sphere:S or torus:M:N");
    return value;
}

inline std::vector<std::string> split_descriptor(const std::string& descriptor) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = descriptor.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(descriptor.substr(start));
            return parts;
        }
        parts.push_back(descriptor.substr(start, colon - start));
        start = colon + 1;
    }
}

constexpr double pi_value = 3.141592653589793238462643383279502884;

}  // namespace detail

/// Builds a catalog model from its descriptor: "sphere:S" (icosphere with S
/// subdivisions) or "torus:M:N" (flat m-torus, N points per axis).
inline ModelManifold make_model(const std::string& descriptor) {
    const auto parts = detail::split_descriptor(descriptor);
    ModelManifold model;
    if (parts.size() == 2 && parts[0] == "sphere") {
        model.kind = ModelKind::sphere;
        model.subdivisions = detail::parse_int_token(parts[1], descriptor);
        model.dimension = 2;
        model.mesh = make_icosphere(model.subdivisions);
        model.name = "sphere:" + std::to_string(model.subdivisions);
        return model;
    }
    if (parts.size() == 3 && parts[0] == "torus") {
        model.kind = ModelKind::torus;
        model.dimension = detail::parse_int_token(parts[1], descriptor);
        model.points_per_axis = detail::parse_int_token(parts[2], descriptor);
        model.grid = make_flat_torus_grid(model.dimension, model.points_per_axis);
        model.name = "torus:" + std::to_string(model.dimension) + ":" +
                     std::to_string(model.points_per_axis);
        return model;
    }
    throw std::invalid_argument("unknown model descriptor '" + descriptor +
                                "', expected sphere:S or torus:M:N");
}

/// Exact spectrum, diameter, volume, and Ricci lower bound of the continuum
/// model. Eigenvalues are truncated to the lowest 200 with multiplicity.
inline ReferenceData analytic_reference(const ModelManifold& model) {
    ReferenceData ref;
    constexpr std::size_t kCount = 200;
    if (model.kind == ModelKind::sphere) {
        // Unit round surface: l(l+1), multiplicity 2l+1.
        for (int l = 0; ref.exact_eigenvalues.size() < kCount; ++l)
            for (int j = 0; j < 2 * l + 1 && ref.exact_eigenvalues.size() < kCount; ++j)
                ref.exact_eigenvalues.push_back(static_cast<double>(l) * (l + 1));
        ref.diameter = detail::pi_value;
        ref.volume = 4.0 * detail::pi_value;
        ref.ricci_lower = 1.0;
        return ref;
    }
    // Side-2*pi flat torus: |k|^2 over the integer lattice. The cube radius
    // is big enough that the 200th smallest value is below R^2, so no value
    // inside the truncation can be missed.
    const int m = model.dimension;
    const int radius = m == 2 ? 14 : (m == 3 ? 7 : 5);
    std::vector<double> values;
    std::array<int, 4> k{0, 0, 0, 0};
    const int side = 2 * radius + 1;
    std::size_t cube = 1;
    for (int j = 0; j < m; ++j) cube *= static_cast<std::size_t>(side);
    values.reserve(cube);
    for (std::size_t flat = 0; flat < cube; ++flat) {
        std::size_t rest = flat;
        double norm2 = 0.0;
        for (int j = 0; j < m; ++j) {
            k[j] = static_cast<int>(rest % side) - radius;
            rest /= side;
            norm2 += static_cast<double>(k[j]) * k[j];
        }
        values.push_back(norm2);
    }
    std::sort(values.begin(), values.end());
    values.resize(kCount);
    if (values.back() > static_cast<double>(radius) * radius)
        throw std::logic_error("analytic_reference: lattice cube radius too small");
    ref.exact_eigenvalues = std::move(values);
    ref.diameter = detail::pi_value * std::sqrt(static_cast<double>(m));
    ref.volume = std::pow(2.0 * detail::pi_value, m);
    ref.ricci_lower = 0.0;
    return ref;
}

/// Samples a catalog potential at the model vertices. "zero" is admissible
/// everywhere; "axcos:A" means f = A cos(x1) and needs the flat coordinates
/// of a torus for its exact curvature certificates: Hess f has eigenvalues
/// -A cos(x1) and 0, so Ric + Hess f >= -|A| g, and |grad f| = |A sin(x1)|.
inline PotentialField sample_potential(const ModelManifold& model,
                                       const std::string& spec) {
    PotentialField field;
    field.spec = spec;
    field.model_name = model.name;
    if (spec == "zero") {
        field.samples.assign(model.vertex_count(), 0.0);
        return field;
    }
    const std::string prefix = "axcos:";
    if (spec.rfind(prefix, 0) == 0) {
        if (model.kind != ModelKind::torus)
            throw std::invalid_argument(
                "sample_potential: axcos is only supported on torus models; the "
                "curvature certificate needs flat coordinates");
        std::size_t pos = 0;
        double amplitude = 0.0;
        const std::string number = spec.substr(prefix.size());
        try {
            amplitude = std::stod(number, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != number.size() || !std::isfinite(amplitude))
            throw std::invalid_argument("sample_potential: bad amplitude in '" + spec + "'");
        field.amplitude = amplitude;
        field.K_eff = std::abs(amplitude);
        field.L_eff = std::abs(amplitude);
        field.samples.resize(model.grid.vertex_count);
        for (std::size_t i = 0; i < model.grid.vertex_count; ++i) {
            const auto c = model.grid.coords(i);
            field.samples[i] = amplitude * std::cos(model.grid.coordinate(c[0]));
        }
        return field;
    }
    throw std::invalid_argument("sample_potential: unknown potential spec '" + spec +
                                "', expected zero or axcos:A");
}

/// Certified hypothesis tuple for a model/potential pair: dimension and the
/// smallest K, L for which the curvature and gradient conditions provably
/// hold, with diameter and volume from the continuum reference.
inline GeometricHypotheses hypotheses_for(const ModelManifold& model,
                                          const PotentialField& potential) {
    if (potential.model_name != model.name ||
        potential.samples.size() != model.vertex_count())
        throw std::invalid_argument("hypotheses_for: potential was sampled for '" +
                                    potential.model_name + "', not '" + model.name + "'");
    const ReferenceData ref = analytic_reference(model);
    GeometricHypotheses hyp;
    hyp.dimension = model.dimension;
    hyp.curvature_bound = potential.K_eff;
    hyp.gradient_bound = potential.L_eff;
    hyp.diameter = ref.diameter;
    hyp.volume = ref.volume;
    validate(hyp);
    return hyp;
}

}  // namespace sbl

#endif
