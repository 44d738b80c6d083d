#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "sbl/models.hpp"

using namespace sbl;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("icosphere subdivision counts") {
    const auto s0 = make_icosphere(0);
    REQUIRE(s0.vertex_count() == 12);
    REQUIRE(s0.face_count() == 20);
    const auto s1 = make_icosphere(1);
    REQUIRE(s1.vertex_count() == 42);
    REQUIRE(s1.face_count() == 80);
    const auto s4 = make_icosphere(4);
    REQUIRE(s4.vertex_count() == 2562);
    REQUIRE(s4.face_count() == 5120);
}

TEST_CASE("icosphere vertices sit on the unit sphere") {
    const auto mesh = make_icosphere(3);
    for (const auto& p : mesh.vertices) {
        const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        REQUIRE(std::abs(norm - 1.0) <= 1e-12);
    }
}

TEST_CASE("icosphere is watertight, oriented, and spherical") {
    for (int s : {0, 1, 2, 3, 4}) {
        const auto mesh = make_icosphere(s);
        REQUIRE_NOTHROW(validate_mesh(mesh));
        // Outward orientation: each face normal points away from the origin.
        for (const auto& f : mesh.faces) {
            const auto &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]],
                       &c = mesh.vertices[f[2]];
            const std::array<double, 3> u = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
            const std::array<double, 3> v = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
            const std::array<double, 3> n = {u[1] * v[2] - u[2] * v[1],
                                             u[2] * v[0] - u[0] * v[2],
                                             u[0] * v[1] - u[1] * v[0]};
            REQUIRE(n[0] * a[0] + n[1] * a[1] + n[2] * a[2] > 0.0);
        }
    }
}

TEST_CASE("icosphere rejects out-of-range subdivision") {
    REQUIRE_THROWS_AS(make_icosphere(-1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_icosphere(9), std::invalid_argument);
}

TEST_CASE("validate_mesh detects broken surfaces") {
    auto mesh = make_icosphere(0);
    SECTION("missing face breaks watertightness") {
        mesh.faces.pop_back();
        REQUIRE_THROWS_AS(validate_mesh(mesh), std::runtime_error);
    }
    SECTION("flipped face breaks orientation") {
        std::swap(mesh.faces[0][0], mesh.faces[0][1]);
        REQUIRE_THROWS_AS(validate_mesh(mesh), std::runtime_error);
    }
}

TEST_CASE("obj export round numbers") {
    const auto mesh = make_icosphere(0);
    std::ostringstream out;
    write_obj(mesh, out);
    const std::string text = out.str();
    std::size_t v_lines = 0, f_lines = 0, pos = 0;
    for (std::size_t i = 0; i < text.size(); i = pos + 1) {
        pos = text.find('\n', i);
        if (pos == std::string::npos) break;
        if (text.compare(i, 2, "v ") == 0) ++v_lines;
        if (text.compare(i, 2, "f ") == 0) ++f_lines;
    }
    REQUIRE(v_lines == 12);
    REQUIRE(f_lines == 20);
}

TEST_CASE("periodic grid counts and neighbor structure") {
    const auto g2 = make_flat_torus_grid(2, 64);
    REQUIRE(g2.vertex_count == 4096);
    REQUIRE(g2.spacing == Catch::Approx(2.0 * kPi / 64).epsilon(1e-15));
    const auto g3 = make_flat_torus_grid(3, 24);
    REQUIRE(g3.vertex_count == 13824);

    const auto g = make_flat_torus_grid(2, 8);
    for (std::size_t i = 0; i < g.vertex_count; ++i) {
        std::set<std::size_t> neighbors;
        for (int axis = 0; axis < g.dimension; ++axis)
            for (int dir : {-1, 1}) {
                const std::size_t w = g.neighbor(i, axis, dir);
                neighbors.insert(w);
                REQUIRE(g.neighbor(w, axis, -dir) == i);
            }
        REQUIRE(neighbors.size() == 4);
        REQUIRE(neighbors.count(i) == 0);
    }
}

TEST_CASE("grid guards reject bad parameters") {
    REQUIRE_THROWS_AS(make_flat_torus_grid(2, 7), std::invalid_argument);
    REQUIRE_THROWS_AS(make_flat_torus_grid(1, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(make_flat_torus_grid(5, 8), std::invalid_argument);
    REQUIRE_THROWS_WITH(make_flat_torus_grid(4, 40),
                        Catch::Matchers::ContainsSubstring("2560000"));
}

TEST_CASE("model descriptors parse or reject") {
    const auto sphere = make_model("sphere:2");
    REQUIRE(sphere.kind == ModelKind::sphere);
    REQUIRE(sphere.dimension == 2);
    REQUIRE(sphere.vertex_count() == 162);
    REQUIRE(sphere.name == "sphere:2");
    const auto torus = make_model("torus:3:24");
    REQUIRE(torus.kind == ModelKind::torus);
    REQUIRE(torus.dimension == 3);
    REQUIRE(torus.vertex_count() == 13824);
    REQUIRE(torus.name == "torus:3:24");
    REQUIRE_THROWS_AS(make_model("cube:3"), std::invalid_argument);
    REQUIRE_THROWS_AS(make_model("sphere"), std::invalid_argument);
    REQUIRE_THROWS_AS(make_model("sphere:4x"), std::invalid_argument);
    REQUIRE_THROWS_AS(make_model("torus:2"), std::invalid_argument);
}

TEST_CASE("sphere reference data") {
    const auto ref = analytic_reference(make_model("sphere:1"));
    REQUIRE(ref.exact_eigenvalues.size() == 200);
    REQUIRE(ref.diameter == Catch::Approx(kPi).epsilon(1e-15));
    REQUIRE(ref.volume == Catch::Approx(4.0 * kPi).epsilon(1e-15));
    REQUIRE(ref.ricci_lower == 1.0);
    const double first_five[5] = {0, 2, 2, 2, 6};
    for (int i = 0; i < 5; ++i) REQUIRE(ref.exact_eigenvalues[i] == first_five[i]);
    // Independent reconstruction from the closed form.
    std::size_t idx = 0;
    for (int l = 0; idx < 200; ++l)
        for (int j = 0; j < 2 * l + 1 && idx < 200; ++j, ++idx)
            REQUIRE(ref.exact_eigenvalues[idx] == double(l) * (l + 1));
}

TEST_CASE("torus reference data matches brute-force lattice enumeration") {
    for (int m : {2, 3, 4}) {
        const auto model = make_model("torus:" + std::to_string(m) + ":" +
                                      std::to_string(m == 2 ? 64 : (m == 3 ? 24 : 12)));
        const auto ref = analytic_reference(model);
        REQUIRE(ref.exact_eigenvalues.size() == 200);
        REQUIRE(ref.diameter == Catch::Approx(kPi * std::sqrt(double(m))).epsilon(1e-15));
        REQUIRE(ref.volume == Catch::Approx(std::pow(2 * kPi, m)).epsilon(1e-14));
        REQUIRE(ref.ricci_lower == 0.0);

        // Independent enumeration over a deliberately larger cube.
        std::vector<double> brute;
        const int radius = 16;
        const int side = 2 * radius + 1;
        std::size_t cube = 1;
        for (int j = 0; j < m; ++j) cube *= side;
        for (std::size_t flat = 0; flat < cube; ++flat) {
            std::size_t rest = flat;
            double norm2 = 0.0;
            for (int j = 0; j < m; ++j) {
                const int kj = int(rest % side) - radius;
                rest /= side;
                norm2 += double(kj) * kj;
            }
            brute.push_back(norm2);
        }
        std::sort(brute.begin(), brute.end());
        for (std::size_t i = 0; i < 200; ++i)
            REQUIRE(ref.exact_eigenvalues[i] == brute[i]);
    }
    const auto ref2 = analytic_reference(make_model("torus:2:64"));
    const double first_nine[9] = {0, 1, 1, 1, 1, 2, 2, 2, 2};
    for (int i = 0; i < 9; ++i) REQUIRE(ref2.exact_eigenvalues[i] == first_nine[i]);
    const auto ref3 = analytic_reference(make_model("torus:3:24"));
    for (int i = 1; i <= 6; ++i) REQUIRE(ref3.exact_eigenvalues[i] == 1.0);
    REQUIRE(ref3.exact_eigenvalues[7] == 2.0);
}

TEST_CASE("zero potential certificates") {
    for (const char* name : {"sphere:2", "torus:2:16"}) {
        const auto model = make_model(name);
        const auto pot = sample_potential(model, "zero");
        REQUIRE(pot.K_eff == 0.0);
        REQUIRE(pot.L_eff == 0.0);
        REQUIRE(pot.samples.size() == model.vertex_count());
        for (double s : pot.samples) REQUIRE(s == 0.0);
    }
}

TEST_CASE("axial cosine potential on the torus") {
    const auto model = make_model("torus:2:64");
    const auto pot = sample_potential(model, "axcos:0.5");
    REQUIRE(pot.K_eff == 0.5);
    REQUIRE(pot.L_eff == 0.5);
    REQUIRE(pot.samples.size() == 4096);
    for (std::size_t i = 0; i < model.grid.vertex_count; ++i) {
        const auto c = model.grid.coords(i);
        const double x1 = model.grid.coordinate(c[0]);
        REQUIRE(pot.samples[i] == Catch::Approx(0.5 * std::cos(x1)).margin(1e-15));
    }
    const auto neg = sample_potential(model, "axcos:-0.75");
    REQUIRE(neg.K_eff == 0.75);
    REQUIRE(neg.L_eff == 0.75);
}

TEST_CASE("axial cosine is rejected off the torus and on bad amplitudes") {
    const auto sphere = make_model("sphere:1");
    REQUIRE_THROWS_AS(sample_potential(sphere, "axcos:0.5"), std::invalid_argument);
    const auto torus = make_model("torus:2:16");
    REQUIRE_THROWS_AS(sample_potential(torus, "axcos:abc"), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_potential(torus, "gaussian"), std::invalid_argument);
}

TEST_CASE("discrete second differences confirm the curvature certificate") {
    // Hess f for f = a cos(x1) has eigenvalues -a cos(x1) and 0; the discrete
    // scan must stay within the certified [-|a|, |a|] band up to stencil
    // attenuation, and the discrete gradient must respect |a|.
    const auto model = make_model("torus:2:64");
    const auto pot = sample_potential(model, "axcos:0.5");
    const auto& grid = model.grid;
    const double h = grid.spacing;
    double min_second = 0.0, max_grad = 0.0, max_cross = 0.0;
    for (std::size_t i = 0; i < grid.vertex_count; ++i) {
        const double fp = pot.samples[grid.neighbor(i, 0, 1)];
        const double fm = pot.samples[grid.neighbor(i, 0, -1)];
        const double f0 = pot.samples[i];
        min_second = std::min(min_second, (fp - 2 * f0 + fm) / (h * h));
        max_grad = std::max(max_grad, std::abs((fp - fm) / (2 * h)));
        // Mixed difference d2 f / dx1 dx2 should vanish identically.
        const std::size_t pp = grid.neighbor(grid.neighbor(i, 0, 1), 1, 1);
        const std::size_t pm = grid.neighbor(grid.neighbor(i, 0, 1), 1, -1);
        const std::size_t mp = grid.neighbor(grid.neighbor(i, 0, -1), 1, 1);
        const std::size_t mm = grid.neighbor(grid.neighbor(i, 0, -1), 1, -1);
        max_cross = std::max(max_cross,
                             std::abs((pot.samples[pp] - pot.samples[pm] -
                                       pot.samples[mp] + pot.samples[mm]) /
                                      (4 * h * h)));
    }
    REQUIRE(min_second >= -0.5 - 1e-12);
    REQUIRE(min_second <= -0.5 * (1.0 - h * h));  // attenuated -a at x1 = 0
    REQUIRE(max_grad <= 0.5 + 1e-12);
    REQUIRE(max_grad >= 0.5 * (1.0 - h * h));
    REQUIRE(max_cross <= 1e-12);
}

TEST_CASE("hypotheses for catalog combinations") {
    const auto sphere = make_model("sphere:4");
    const auto h1 = hypotheses_for(sphere, sample_potential(sphere, "zero"));
    REQUIRE(h1.dimension == 2);
    REQUIRE(h1.curvature_bound == 0.0);
    REQUIRE(h1.gradient_bound == 0.0);
    REQUIRE(h1.diameter == Catch::Approx(kPi).epsilon(1e-15));
    REQUIRE(h1.volume.value() == Catch::Approx(4 * kPi).epsilon(1e-15));

    const auto torus2 = make_model("torus:2:64");
    const auto h2 = hypotheses_for(torus2, sample_potential(torus2, "axcos:0.5"));
    REQUIRE(h2.dimension == 2);
    REQUIRE(h2.curvature_bound == 0.5);
    REQUIRE(h2.gradient_bound == 0.5);
    REQUIRE(h2.diameter == Catch::Approx(kPi * std::sqrt(2.0)).epsilon(1e-15));
    REQUIRE(h2.volume.value() == Catch::Approx(4 * kPi * kPi).epsilon(1e-14));

    const auto torus3 = make_model("torus:3:24");
    const auto h3 = hypotheses_for(torus3, sample_potential(torus3, "zero"));
    REQUIRE(h3.dimension == 3);
    REQUIRE(h3.diameter == Catch::Approx(kPi * std::sqrt(3.0)).epsilon(1e-15));
    REQUIRE(h3.volume.value() == Catch::Approx(8 * kPi * kPi * kPi).epsilon(1e-14));
}

TEST_CASE("hypotheses reject mismatched model and potential") {
    const auto t2 = make_model("torus:2:16");
    const auto t3 = make_model("torus:3:24");
    const auto pot = sample_potential(t2, "zero");
    REQUIRE_THROWS_AS(hypotheses_for(t3, pot), std::invalid_argument);
}
