#ifndef SBL_OPERATORS_HPP
#define SBL_OPERATORS_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbl/models.hpp"

namespace sbl {

/// Discrete Laplacian as a stiffness/mass pair: S is sparse symmetric
/// positive semidefinite with constants in its kernel, M is diagonal
/// (lumped) and positive, and total mass equals the discrete volume.
struct OperatorPair {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd mass;
    std::size_t vertex_count = 0;

    double total_mass() const { return mass.sum(); }
};

struct BallVolumeSample {
    int center = 0;
    double radius = 0.0;
    double measured_volume = 0.0;
};

namespace detail {

inline double face_area(const TriangleMesh& mesh, const std::array<int, 3>& f) {
    const auto &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    const auto n = cross(sub(b, a), sub(c, a));
    return 0.5 * std::sqrt(dot(n, n));
}

inline Eigen::VectorXd barycentric_mass(const TriangleMesh& mesh) {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const double area = face_area(mesh, mesh.faces[fi]);
        if (area < 1e-14)
            throw std::runtime_error("stiffness_and_mass: degenerate face " +
                                     std::to_string(fi) + " (area " +
                                     std::to_string(area) + ")");
        for (int c = 0; c < 3; ++c) mass[mesh.faces[fi][c]] += area / 3.0;
    }
    return mass;
}

/// Great-circle distance between unit vectors, exact for mesh vertices.
inline double arc_length(const std::array<double, 3>& p, const std::array<double, 3>& q) {
    const auto d = sub(p, q);
    const double chord = std::sqrt(dot(d, d));
    return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

inline std::vector<std::vector<int>> mesh_adjacency(const TriangleMesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.vertex_count());
    for (const auto& f : mesh.faces)
        for (int c = 0; c < 3; ++c) {
            adj[f[c]].push_back(f[(c + 1) % 3]);
            adj[f[(c + 1) % 3]].push_back(f[c]);
        }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

/// Dijkstra over the given weighted adjacency; throws if any vertex is
/// unreachable (a generator bug, every catalog model is connected).
inline std::vector<double> shortest_distances(
    const std::vector<std::vector<std::pair<int, double>>>& graph, int source) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(graph.size(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    dist[source] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > dist[v]) continue;
        for (const auto& [w, len] : graph[v])
            if (dist[v] + len < dist[w]) {
                dist[w] = dist[v] + len;
                queue.push({dist[w], w});
            }
    }
    for (double d : dist)
        if (d == inf) throw std::runtime_error("graph distance: model graph is disconnected");
    return dist;
}

/// Geodesic arc-length graph on mesh vertices: one-ring edges plus two-ring
/// shortcuts. The shortcuts cut the zigzag overestimate of graph distances
/// to the percent level, which the ball-volume tolerances rely on.
inline std::vector<std::vector<std::pair<int, double>>> mesh_distance_graph(
    const TriangleMesh& mesh, bool with_two_ring) {
    const auto adj = mesh_adjacency(mesh);
    std::vector<std::vector<std::pair<int, double>>> graph(mesh.vertex_count());
    for (std::size_t v = 0; v < adj.size(); ++v)
        for (int w : adj[v])
            graph[v].push_back({w, arc_length(mesh.vertices[v], mesh.vertices[w])});
    if (with_two_ring) {
        std::vector<int> mark(mesh.vertex_count(), -1);
        for (std::size_t v = 0; v < adj.size(); ++v) {
            mark[v] = static_cast<int>(v);
            for (int w : adj[v]) mark[w] = static_cast<int>(v);
            for (int w : adj[v])
                for (int x : adj[w])
                    if (mark[x] != static_cast<int>(v)) {
                        mark[x] = static_cast<int>(v);
                        graph[v].push_back({x, arc_length(mesh.vertices[v], mesh.vertices[x])});
                    }
        }
    }
    return graph;
}

/// Axis-step distances on the periodic grid (L1 metric scaled by h).
inline std::vector<double> grid_step_distances(const PeriodicGrid& grid, std::size_t source) {
    std::vector<int> steps(grid.vertex_count, -1);
    std::queue<std::size_t> frontier;
    steps[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop();
        for (int axis = 0; axis < grid.dimension; ++axis)
            for (int dir : {-1, 1}) {
                const std::size_t w = grid.neighbor(v, axis, dir);
                if (steps[w] < 0) {
                    steps[w] = steps[v] + 1;
                    frontier.push(w);
                }
            }
    }
    std::vector<double> dist(grid.vertex_count);
    for (std::size_t v = 0; v < grid.vertex_count; ++v) {
        if (steps[v] < 0) throw std::runtime_error("graph distance: model graph is disconnected");
        dist[v] = steps[v] * grid.spacing;
    }
    return dist;
}

}  // namespace detail

/// Cotangent-weight stiffness with barycentric lumped mass. Off-diagonal
/// weights are accumulated per undirected edge and emitted to both triangle
/// slots, so the matrix is symmetric exactly; the diagonal is the negated
/// row sum, so constants are in the kernel up to summation rounding.
inline OperatorPair stiffness_and_mass(const TriangleMesh& mesh) {
    const std::size_t v = mesh.vertex_count();
    OperatorPair ops;
    ops.vertex_count = v;
    ops.mass = detail::barycentric_mass(mesh);

    std::vector<std::pair<std::size_t, double>> edge_weight;
    edge_weight.reserve(mesh.faces.size() * 3);
    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        for (int c = 0; c < 3; ++c) {
            const int i = f[c], j = f[(c + 1) % 3], k = f[(c + 2) % 3];
            // Half-cotangent at the corner opposite edge (i, j).
            const auto u = detail::sub(mesh.vertices[i], mesh.vertices[k]);
            const auto w = detail::sub(mesh.vertices[j], mesh.vertices[k]);
            const auto n = detail::cross(u, w);
            const double twice_area = std::sqrt(detail::dot(n, n));
            if (twice_area < 2e-14)
                throw std::runtime_error("stiffness_and_mass: degenerate face " +
                                         std::to_string(fi));
            const double half_cot = 0.5 * detail::dot(u, w) / twice_area;
            const std::size_t a = std::min(i, j), b = std::max(i, j);
            edge_weight.push_back({a * v + b, half_cot});
        }
    }
    std::sort(edge_weight.begin(), edge_weight.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(edge_weight.size() * 2 + v);
    std::vector<double> diagonal(v, 0.0);
    for (std::size_t s = 0; s < edge_weight.size();) {
        const std::size_t key = edge_weight[s].first;
        double weight = 0.0;
        for (; s < edge_weight.size() && edge_weight[s].first == key; ++s)
            weight += edge_weight[s].second;
        const auto a = static_cast<int>(key / v), b = static_cast<int>(key % v);
        triplets.emplace_back(a, b, -weight);
        triplets.emplace_back(b, a, -weight);
        diagonal[a] += weight;
        diagonal[b] += weight;
    }
    for (std::size_t i = 0; i < v; ++i)
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diagonal[i]);
    ops.stiffness.resize(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
    ops.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    ops.stiffness.makeCompressed();
    return ops;
}

/// Standard 2m-point stencil on the periodic grid as a weak-form pair:
/// mass h^m per vertex and stiffness scaled by the cell volume, so that
/// M^{-1} S is the strong operator with diagonal 2m/h^2 and off-diagonal
/// -1/h^2 per neighbor, and the generalized eigenvalues of (S, M) are the
/// exact stencil values, sums of 4 sin^2(pi k_j / n) / h^2 over the axes.
inline OperatorPair grid_laplacian(const PeriodicGrid& grid) {
    OperatorPair ops;
    ops.vertex_count = grid.vertex_count;
    double cell = 1.0;
    for (int j = 0; j < grid.dimension; ++j) cell *= grid.spacing;
    ops.mass = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.vertex_count), cell);

    const double w = std::pow(grid.spacing, grid.dimension - 2);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(grid.vertex_count * (2 * grid.dimension + 1));
    for (std::size_t i = 0; i < grid.vertex_count; ++i) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i),
                              2.0 * grid.dimension * w);
        for (int axis = 0; axis < grid.dimension; ++axis)
            for (int dir : {-1, 1})
                triplets.emplace_back(static_cast<int>(i),
                                      static_cast<int>(grid.neighbor(i, axis, dir)), -w);
    }
    ops.stiffness.resize(static_cast<Eigen::Index>(grid.vertex_count),
                         static_cast<Eigen::Index>(grid.vertex_count));
    ops.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    ops.stiffness.makeCompressed();
    return ops;
}

inline OperatorPair build_operators(const ModelManifold& model) {
    return model.kind == ModelKind::sphere ? stiffness_and_mass(model.mesh)
                                           : grid_laplacian(model.grid);
}

/// One-ring vertex adjacency for either model family.
inline std::vector<std::vector<int>> vertex_adjacency(const ModelManifold& model) {
    if (model.kind == ModelKind::sphere) return detail::mesh_adjacency(model.mesh);
    std::vector<std::vector<int>> adj(model.grid.vertex_count);
    for (std::size_t i = 0; i < model.grid.vertex_count; ++i)
        for (int axis = 0; axis < model.grid.dimension; ++axis)
            for (int dir : {-1, 1})
                adj[i].push_back(static_cast<int>(model.grid.neighbor(i, axis, dir)));
    return adj;
}

/// Squared gradient magnitude per vertex. Meshes: per-face affine gradients
/// averaged onto vertices with area weights. Grids: central differences.
inline std::vector<double> vertex_gradient_sq(const ModelManifold& model,
                                              const std::vector<double>& field) {
    if (field.size() != model.vertex_count())
        throw std::invalid_argument("vertex_gradient_sq: field length " +
                                    std::to_string(field.size()) + " does not match " +
                                    std::to_string(model.vertex_count()) + " vertices");
    std::vector<double> result(model.vertex_count(), 0.0);
    if (model.kind == ModelKind::sphere) {
        const auto& mesh = model.mesh;
        std::vector<double> weight(mesh.vertex_count(), 0.0);
        for (const auto& f : mesh.faces) {
            const auto &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]],
                       &c = mesh.vertices[f[2]];
            const auto n = detail::cross(detail::sub(b, a), detail::sub(c, a));
            const double twice_area = std::sqrt(detail::dot(n, n));
            const double area = 0.5 * twice_area;
            const std::array<double, 3> unit_n = {n[0] / twice_area, n[1] / twice_area,
                                                  n[2] / twice_area};
            // grad u = (1 / 2A) n x (u_a (c - b) + u_b (a - c) + u_c (b - a))
            const auto e0 = detail::sub(c, b), e1 = detail::sub(a, c), e2 = detail::sub(b, a);
            std::array<double, 3> s = {
                field[f[0]] * e0[0] + field[f[1]] * e1[0] + field[f[2]] * e2[0],
                field[f[0]] * e0[1] + field[f[1]] * e1[1] + field[f[2]] * e2[1],
                field[f[0]] * e0[2] + field[f[1]] * e1[2] + field[f[2]] * e2[2]};
            const auto g = detail::cross(unit_n, s);
            const double grad_sq = detail::dot(g, g) / (twice_area * twice_area);
            for (int c2 = 0; c2 < 3; ++c2) {
                result[f[c2]] += area * grad_sq;
                weight[f[c2]] += area;
            }
        }
        for (std::size_t i = 0; i < result.size(); ++i) result[i] /= weight[i];
        return result;
    }
    const auto& grid = model.grid;
    for (std::size_t i = 0; i < grid.vertex_count; ++i) {
        double sum = 0.0;
        for (int axis = 0; axis < grid.dimension; ++axis) {
            const double forward = field[grid.neighbor(i, axis, 1)];
            const double backward = field[grid.neighbor(i, axis, -1)];
            const double diff = (forward - backward) / (2.0 * grid.spacing);
            sum += diff * diff;
        }
        result[i] = sum;
    }
    return result;
}

/// Largest shortest-path distance from a deterministic sample of 32 source
/// vertices: mesh edges carry great-circle lengths, grid steps carry h each
/// (axis-aligned paths, an L1 metric). A sanity check on the analytic
/// diameter, which is what every certified hypothesis uses. The result must
/// land in an envelope above the analytic value: graph paths only
/// overestimate geodesics, by at most the L1-vs-L2 factor sqrt(m) on grids
/// and a zigzag factor well under 1.6 on meshes.
inline double graph_diameter_estimate(const ModelManifold& model) {
    const double analytic = analytic_reference(model).diameter;
    const std::size_t v = model.vertex_count();
    const std::size_t sources = std::min<std::size_t>(32, v);
    double estimate = 0.0;
    if (model.kind == ModelKind::sphere) {
        const auto graph = detail::mesh_distance_graph(model.mesh, false);
        for (std::size_t s = 0; s < sources; ++s) {
            const auto dist =
                detail::shortest_distances(graph, static_cast<int>(s * v / sources));
            estimate = std::max(estimate, *std::max_element(dist.begin(), dist.end()));
        }
    } else {
        for (std::size_t s = 0; s < sources; ++s) {
            const auto dist = detail::grid_step_distances(model.grid, s * v / sources);
            estimate = std::max(estimate, *std::max_element(dist.begin(), dist.end()));
        }
    }
    const double headroom =
        model.kind == ModelKind::sphere
            ? 1.6
            : std::max(1.6, std::sqrt(static_cast<double>(model.dimension)));
    if (estimate < analytic * (1.0 - 1e-9) || estimate > analytic * headroom * (1.0 + 1e-9))
        throw std::runtime_error("graph_diameter_estimate: estimate " +
                                 std::to_string(estimate) + " outside envelope of analytic " +
                                 std::to_string(analytic));
    return estimate;
}

/// Mass inside the graph-distance ball around `center`, for each radius.
/// Mesh distances use the two-ring geodesic graph; grid distances are L1.
inline std::vector<BallVolumeSample> ball_volume_profile(const ModelManifold& model,
                                                         int center,
                                                         const std::vector<double>& radii) {
    if (center < 0 || static_cast<std::size_t>(center) >= model.vertex_count())
        throw std::invalid_argument("ball_volume_profile: center out of range");
    const double diameter = analytic_reference(model).diameter;
    double prev = 0.0;
    for (double r : radii) {
        if (!(r > 0.0) || r < prev)
            throw std::invalid_argument(
                "ball_volume_profile: radii must be ascending and positive");
        if (r > diameter * (1.0 + 1e-9))
            throw std::invalid_argument("ball_volume_profile: radius " + std::to_string(r) +
                                        " exceeds the diameter " + std::to_string(diameter));
        prev = r;
    }
    std::vector<double> dist;
    Eigen::VectorXd mass;
    if (model.kind == ModelKind::sphere) {
        dist = detail::shortest_distances(detail::mesh_distance_graph(model.mesh, true), center);
        mass = detail::barycentric_mass(model.mesh);
    } else {
        dist = detail::grid_step_distances(model.grid, static_cast<std::size_t>(center));
        double cell = 1.0;
        for (int j = 0; j < model.grid.dimension; ++j) cell *= model.grid.spacing;
        mass = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(model.grid.vertex_count),
                                         cell);
    }
    std::vector<BallVolumeSample> samples;
    samples.reserve(radii.size());
    for (double r : radii) {
        double volume = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i)
            if (dist[i] <= r * (1.0 + 1e-12)) volume += mass[static_cast<Eigen::Index>(i)];
        samples.push_back({center, r, volume});
    }
    return samples;
}

/// Matrix Market coordinate output, 1-based, full precision.
inline void write_matrix_market(const Eigen::SparseMatrix<double>& matrix,
                                std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out.precision(17);
    out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
    for (int k = 0; k < matrix.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it)
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

/// Diagonal matrix given by its diagonal entries, same format.
inline void write_matrix_market(const Eigen::VectorXd& diagonal, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out.precision(17);
    out << diagonal.size() << ' ' << diagonal.size() << ' ' << diagonal.size() << '\n';
    for (Eigen::Index i = 0; i < diagonal.size(); ++i)
        out << i + 1 << ' ' << i + 1 << ' ' << diagonal[i] << '\n';
}

}  // namespace sbl

#endif
