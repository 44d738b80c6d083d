#ifndef SBL_MESH_HPP
#define SBL_MESH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sbl {

/// Closed oriented triangle surface. Faces are counterclockwise as seen
/// from outside; the edge set is derived from the face list.
struct TriangleMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> faces;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }
};

namespace detail {

inline std::array<double, 3> normalized(const std::array<double, 3>& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

inline std::array<double, 3> cross(const std::array<double, 3>& a,
                                   const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline double dot(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline std::array<double, 3> sub(const std::array<double, 3>& a,
                                 const std::array<double, 3>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

}  // namespace detail

/// Checks that the face list describes a watertight, consistently oriented,
/// manifold surface of sphere topology: every directed edge occurs exactly
/// once, every undirected edge twice, and V - E + F = 2.
inline void validate_mesh(const TriangleMesh& mesh) {
    const auto v = static_cast<std::int64_t>(mesh.vertex_count());
    std::map<std::pair<int, int>, int> directed;
    for (const auto& f : mesh.faces) {
        for (int c = 0; c < 3; ++c) {
            const int s = f[c], t = f[(c + 1) % 3];
            if (s < 0 || t < 0 || s >= v || t >= v)
                throw std::runtime_error("validate_mesh: face references missing vertex");
            if (s == t) throw std::runtime_error("validate_mesh: degenerate face edge");
            ++directed[{s, t}];
        }
    }
    std::int64_t edges = 0;
    for (const auto& [e, count] : directed) {
        if (count != 1)
            throw std::runtime_error("validate_mesh: directed edge repeated; inconsistent orientation");
        const auto rev = directed.find({e.second, e.first});
        if (rev == directed.end())
            throw std::runtime_error("validate_mesh: boundary edge; mesh is not watertight");
        if (e.first < e.second) ++edges;
    }
    const std::int64_t euler = v - edges + static_cast<std::int64_t>(mesh.face_count());
    if (euler != 2)
        throw std::runtime_error("validate_mesh: Euler characteristic " +
                                 std::to_string(euler) + ", expected 2");
}

/// Icosahedron subdivided `subdivisions` times with all vertices projected to
/// the unit sphere; 10*4^s + 2 vertices, 20*4^s faces, outward orientation.
inline TriangleMesh make_icosphere(int subdivisions) {
    if (subdivisions < 0 || subdivisions > 8)
        throw std::invalid_argument(
            "make_icosphere: subdivisions must be in [0, 8], got " +
            std::to_string(subdivisions));

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh mesh;
    mesh.vertices = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                     {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                     {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& p : mesh.vertices) p = detail::normalized(p);
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    // Enforce outward orientation face by face; on a convex body centered at
    // the origin this yields a globally consistent orientation.
    for (auto& f : mesh.faces) {
        const auto &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]],
                   &c = mesh.vertices[f[2]];
        const auto n = detail::cross(detail::sub(b, a), detail::sub(c, a));
        if (detail::dot(n, a) + detail::dot(n, b) + detail::dot(n, c) < 0)
            std::swap(f[1], f[2]);
    }

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto midpoint_index = [&](int i, int j) {
            const auto key = std::minmax(i, j);
            const auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const auto &p = mesh.vertices[i], &q = mesh.vertices[j];
            mesh.vertices.push_back(detail::normalized(
                {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])}));
            const int idx = static_cast<int>(mesh.vertices.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(mesh.faces.size() * 4);
        for (const auto& f : mesh.faces) {
            const int ab = midpoint_index(f[0], f[1]);
            const int bc = midpoint_index(f[1], f[2]);
            const int ca = midpoint_index(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({ab, f[1], bc});
            next.push_back({ca, bc, f[2]});
            next.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(next);
    }
    return mesh;
}

/// Wavefront OBJ export: vertex and face records only, ASCII, 1-based.
inline void write_obj(const TriangleMesh& mesh, std::ostream& out) {
    out.precision(17);
    for (const auto& p : mesh.vertices)
        out << "v " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace sbl

#endif
