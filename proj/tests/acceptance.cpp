// Acceptance gate: every release-blocking property, one verdict line each.
// Usage: acceptance [path-to-sbl-cli]   (the CLI path drives the last check)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sbl/bounds.hpp"
#include "sbl/models.hpp"
#include "sbl/operators.hpp"
#include "sbl/rng.hpp"
#include "sbl/solver.hpp"
#include "sbl/verifier.hpp"

namespace {

bool all_ok = true;

void verdict(int number, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", number, detail.c_str());
    all_ok = all_ok && ok;
}

struct TimedSpectrum {
    sbl::Spectrum spectrum;
    double seconds = 0.0;
};

TimedSpectrum solve(const sbl::ModelManifold& model, int k) {
    const auto start = std::chrono::steady_clock::now();
    TimedSpectrum result;
    result.spectrum = sbl::lowest_eigenpairs(sbl::build_operators(model), k, 1e-9, 1);
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string strip_runtime_lines(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream kept;
    std::string line;
    while (std::getline(in, line))
        if (line.find("runtime_ms") == std::string::npos) kept << line << "\n";
    return kept.str();
}

std::string format(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, pattern, a, b, c);
    return buffer;
}

}  // namespace

int main(int argc, char** argv) try {
    const std::string cli_path = argc > 1 ? argv[1] : "";
    const double slack = std::log(1.05);

    const sbl::ModelManifold sphere = sbl::make_model("sphere:4");
    const sbl::ModelManifold torus2 = sbl::make_model("torus:2:64");
    const sbl::ModelManifold torus3 = sbl::make_model("torus:3:24");
    const sbl::PotentialField sphere_zero = sbl::sample_potential(sphere, "zero");
    const sbl::PotentialField torus2_axcos = sbl::sample_potential(torus2, "axcos:0.5");
    const sbl::PotentialField torus3_zero = sbl::sample_potential(torus3, "zero");
    const sbl::GeometricHypotheses sphere_hyp = sbl::hypotheses_for(sphere, sphere_zero);
    const sbl::GeometricHypotheses torus2_hyp = sbl::hypotheses_for(torus2, torus2_axcos);
    const sbl::GeometricHypotheses torus3_hyp = sbl::hypotheses_for(torus3, torus3_zero);

    const TimedSpectrum sphere_run = solve(sphere, 50);
    const TimedSpectrum torus2_run = solve(torus2, 50);
    const TimedSpectrum torus3_run = solve(torus3, 50);

    // 1. Sphere spectrum convergence against the round-surface eigenvalues.
    {
        const std::vector<double>& ev = sphere_run.spectrum.eigenvalues;
        bool ok = std::abs(ev[1] - 2.0) <= 0.02 * 2.0;
        const std::vector<double> harmonic = {2.0, 2.0, 2.0, 6.0,  6.0,  6.0,
                                              6.0, 6.0, 12.0, 12.0, 12.0, 12.0};
        for (std::size_t i = 0; i < harmonic.size(); ++i)
            ok = ok && std::abs(ev[i + 1] - harmonic[i]) <= 0.05 * harmonic[i];
        ok = ok && sphere_run.seconds < 30.0;
        verdict(1, ok,
                format("sphere eigenvalues track l(l+1): lambda_1=%.6f, lambda_12=%.6f, "
                       "solve %.2f s (limit 30)",
                       ev[1], ev[12], sphere_run.seconds));
    }

    // 2. Torus spectrum exactness against the stencil closed forms.
    {
        const int n = torus2.points_per_axis;
        const double h = torus2.grid.spacing;
        std::vector<double> stencil;
        stencil.reserve(static_cast<std::size_t>(n) * n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double sa = std::sin(M_PI * a / n);
                const double sb = std::sin(M_PI * b / n);
                stencil.push_back(4.0 * (sa * sa + sb * sb) / (h * h));
            }
        std::sort(stencil.begin(), stencil.end());
        const std::vector<double>& ev = torus2_run.spectrum.eigenvalues;
        const sbl::ReferenceData reference = sbl::analytic_reference(torus2);
        bool ok = true;
        double worst_rel = 0.0;
        for (int i = 0; i <= 20; ++i) {
            if (stencil[static_cast<std::size_t>(i)] == 0.0) {
                ok = ok && std::abs(ev[static_cast<std::size_t>(i)]) <= 1e-8;
                continue;
            }
            const double rel =
                std::abs(ev[static_cast<std::size_t>(i)] / stencil[static_cast<std::size_t>(i)] - 1.0);
            worst_rel = std::max(worst_rel, rel);
            ok = ok && rel <= 1e-8;
            ok = ok && std::abs(ev[static_cast<std::size_t>(i)] /
                                    reference.exact_eigenvalues[static_cast<std::size_t>(i)] -
                                1.0) <= 0.01;
        }
        ok = ok && torus2_run.seconds < 10.0;
        verdict(2, ok,
                format("torus m=2 n=64 matches 4sin^2 stencil (worst rel %.2e, limit 1e-8) "
                       "and lattice within 1%%, solve %.2f s (limit 10)",
                       worst_rel, torus2_run.seconds));
    }

    // 3. First-eigenvalue bound on the sphere with the documented margin.
    {
        const sbl::BoundChain chain = sbl::bound_chain(sphere_hyp);
        const double c0_log = chain.first_gap.log_value();
        const double expected_log =
            -std::log(16.0) - 2.0 * std::log(M_PI) - 2.0 * std::log(400.0);
        const double margin = std::log(sphere_run.spectrum.eigenvalues[1]) - c0_log;
        const bool ok = std::abs(c0_log - expected_log) <= 1e-12 * std::abs(expected_log) &&
                        std::abs(margin - 17.7) <= 0.1;
        verdict(3, ok,
                format("c0 = (1/16) pi^-2 400^-2 (log %.12f) with log-margin %.6f in "
                       "17.7 +/- 0.1",
                       c0_log, margin));
    }

    // 4. Eigenvalue growth bound on all catalog configurations.
    {
        const auto growth_holds = [&](const sbl::GeometricHypotheses& hyp,
                                      const std::vector<double>& ev, int k_max,
                                      double& worst) {
            const sbl::BoundChain chain = sbl::bound_chain(hyp);
            bool ok = true;
            for (int k = 1; k <= k_max; ++k) {
                const double rhs = chain.growth_coefficient.log_value() +
                                   chain.growth_exponent * std::log(static_cast<double>(k));
                const double margin = std::log(ev[static_cast<std::size_t>(k)]) - rhs;
                worst = std::min(worst, margin);
                ok = ok && margin >= -slack;
            }
            return ok;
        };
        const auto start = std::chrono::steady_clock::now();
        double worst = std::numeric_limits<double>::infinity();
        bool ok = growth_holds(sphere_hyp, sphere_run.spectrum.eigenvalues, 50, worst);
        ok = ok && growth_holds(torus2_hyp, torus2_run.spectrum.eigenvalues, 50, worst);
        ok = ok && growth_holds(torus3_hyp, torus3_run.spectrum.eigenvalues, 30, worst);
        const double check_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double total_seconds =
            sphere_run.seconds + torus2_run.seconds + torus3_run.seconds + check_seconds;
        ok = ok && total_seconds < 120.0;
        verdict(4, ok,
                format("lambda_k >= c k^(2/m) on all three configurations (worst log-margin "
                       "%.3f), %.2f s total (limit 120)",
                       worst, total_seconds));
    }

    // 5. Eigenvalue sum bound for every k up to 50 on all configurations.
    {
        const auto sums_hold = [&](const sbl::GeometricHypotheses& hyp,
                                   const std::vector<double>& ev, double& worst) {
            bool ok = true;
            double running = 0.0;
            for (int k = 1; k <= 50; ++k) {
                running += ev[static_cast<std::size_t>(k)];
                const double bound_log =
                    sbl::eigenvalue_sum_bound(hyp, std::max(ev[static_cast<std::size_t>(k)], 0.0))
                        .log_value();
                const double margin = bound_log - std::log(running);
                worst = std::min(worst, margin);
                ok = ok && margin >= -slack;
            }
            return ok;
        };
        double worst = std::numeric_limits<double>::infinity();
        bool ok = sums_hold(sphere_hyp, sphere_run.spectrum.eigenvalues, worst);
        ok = ok && sums_hold(torus2_hyp, torus2_run.spectrum.eigenvalues, worst);
        ok = ok && sums_hold(torus3_hyp, torus3_run.spectrum.eigenvalues, worst);
        verdict(5, ok,
                format("sum of the first k eigenvalues stays below the bound for k <= 50 "
                       "(worst log-margin %.1f)",
                       worst));
    }

    // 6. Gradient bounds: per-eigenfunction and combinations, with the
    // first-harmonic sup oracle on the sphere.
    {
        bool ok = sbl::check_gradient_estimates(sphere, sphere_zero, 10, 1e-9, 1).pass;
        ok = ok && sbl::check_gradient_estimates(torus2, torus2_axcos, 10, 1e-9, 1).pass;
        ok = ok && sbl::check_gradient_estimates(torus3, torus3_zero, 10, 1e-9, 1).pass;

        std::vector<double> phi1(sphere.vertex_count());
        for (std::size_t i = 0; i < phi1.size(); ++i)
            phi1[i] = sphere_run.spectrum.eigenvectors(static_cast<Eigen::Index>(i), 1);
        const std::vector<double> grad_sq = sbl::vertex_gradient_sq(sphere, phi1);
        const double measured = *std::max_element(grad_sq.begin(), grad_sq.end());
        const double oracle = 3.0 / (4.0 * M_PI);
        const double bound_log = sbl::eigenfunction_gradient_bound(
                                     sphere_hyp, sphere_run.spectrum.eigenvalues[1],
                                     *sphere_hyp.volume, 1.0)
                                     .log_value();
        ok = ok && std::abs(measured / oracle - 1.0) <= 0.03;
        ok = ok && std::log(measured) < bound_log;
        verdict(6, ok,
                format("gradient bounds hold on all configurations; sphere max |grad "
                       "phi_1|^2 = %.6f vs 3/(4 pi) = %.6f, strictly below the bound",
                       measured, oracle));
    }

    // 7. Sobolev inequality on seeded random fields, both branches.
    {
        const sbl::VerificationReport higher =
            sbl::check_sobolev(torus3, torus3_zero, 100, 1);
        const sbl::VerificationReport surface =
            sbl::check_sobolev(sphere, sphere_zero, 100, 1);
        verdict(7, higher.pass && surface.pass,
                format("100 random fields satisfy the branch inequality on torus m=3 "
                       "(margin %.2f) and sphere (margin %.2f)",
                       higher.checks.front().margin_log, surface.checks.front().margin_log));
    }

    // 8. Ball-volume comparison, plus the half-sphere cap oracle.
    {
        bool ok = sbl::check_volume_comparison(sphere, 10, 1).pass;
        ok = ok && sbl::check_volume_comparison(torus2, 10, 1).pass;
        const auto cap = sbl::ball_volume_profile(sphere, 0, {M_PI / 2.0});
        const double expected = 2.0 * M_PI;
        ok = ok && std::abs(cap.front().measured_volume / expected - 1.0) <= 0.05;
        verdict(8, ok,
                format("volume ratio comparison passes on sphere and torus; vol(B_pi/2) = "
                       "%.4f vs 2 pi = %.4f within 5%%",
                       cap.front().measured_volume, expected));
    }

    // 9. Recursion lemma brute force: coverage and zero counterexamples.
    {
        const auto start = std::chrono::steady_clock::now();
        const sbl::VerificationReport recursion = sbl::check_wz_lemma(1000, 1);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const int active =
            static_cast<int>(std::lround(std::exp(recursion.checks.at(1).lhs_log)));
        const bool ok = recursion.pass && active >= 300 && seconds < 5.0;
        verdict(9, ok,
                format("1000 sequences, %.0f active (need 300), no counterexamples, %.3f s "
                       "(limit 5)",
                       static_cast<double>(active), seconds));
    }

    // 10. Composition consistency over random hypothesis tuples.
    {
        std::mt19937_64 gen(2024);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            sbl::GeometricHypotheses hyp;
            hyp.dimension = 2 + static_cast<int>(sbl::uniform_index(gen, 4));
            hyp.curvature_bound = sbl::uniform_range(gen, 0.0, 3.0);
            hyp.gradient_bound = sbl::uniform_range(gen, 0.0, 3.0);
            hyp.diameter = sbl::uniform_range(gen, 0.2, 5.0);
            const double composed =
                sbl::cheeger_lambda1(
                    sbl::in_alpha_lower_bound(hyp, 1.0, hyp.diameter, 1.0))
                    .log_value();
            const double direct = sbl::lambda1_lower_bound(hyp).log_value();
            const double rel = std::abs(composed - direct) / std::max(1.0, std::abs(direct));
            worst = std::max(worst, rel);
            ok = ok && rel <= 1e-12;
        }
        verdict(10, ok,
                format("Cheeger composition reproduces the gap constant over 1000 tuples "
                       "(worst relative log deviation %.2e, limit 1e-12)",
                       worst));
    }

    // 11. CLI determinism: identical invocations, identical reports.
    {
        bool ok = false;
        std::string detail = "no CLI path supplied";
        if (!cli_path.empty()) {
            const std::string base = "\"" + cli_path +
                                     "\" verify --model torus:2:16 --kmax 10 --seed 3 --out ";
            const int first = std::system(
                (base + "acceptance_det_a.json > acceptance_det_a.log 2>&1").c_str());
            const int second = std::system(
                (base + "acceptance_det_b.json > acceptance_det_b.log 2>&1").c_str());
            const std::string a = strip_runtime_lines("acceptance_det_a.json");
            const std::string b = strip_runtime_lines("acceptance_det_b.json");
            ok = first == 0 && second == 0 && !a.empty() && a == b;
            detail = format("two seeded verify runs agree byte-for-byte outside runtime_ms "
                            "(%.0f report bytes)",
                            static_cast<double>(a.size()));
            if (first != 0 || second != 0) detail = "verify invocation failed";
        }
        verdict(11, ok, detail);
    }

    return all_ok ? 0 : 1;
} catch (const std::exception& error) {
    std::printf("FAIL: unhandled exception: %s\n", error.what());
    return 1;
}
