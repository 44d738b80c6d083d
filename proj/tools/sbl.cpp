#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sbl/bounds.hpp"
#include "sbl/mesh.hpp"
#include "sbl/models.hpp"
#include "sbl/operators.hpp"
#include "sbl/report_json.hpp"
#include "sbl/solver.hpp"
#include "sbl/verifier.hpp"

namespace {

struct ConstantRow {
    std::string name;
    sbl::LogScalar value;
};

void print_constant_table(const std::vector<ConstantRow>& rows) {
    std::cout << std::left << std::setw(38) << "constant" << std::setw(24) << "log value"
              << "linear value\n";
    for (const auto& row : rows) {
        std::cout << std::left << std::setw(38) << row.name;
        if (row.value.is_zero()) {
            std::cout << std::setw(24) << "-inf" << "0\n";
            continue;
        }
        std::cout << std::setw(24) << std::setprecision(12) << row.value.log_value();
        if (row.value.linear_underflows())
            std::cout << "0 (underflows)\n";
        else
            std::cout << std::setprecision(12) << row.value.linear() << "\n";
    }
}

nlohmann::ordered_json constant_json(const sbl::LogScalar& value) {
    nlohmann::ordered_json j;
    if (value.is_zero()) {
        j["log"] = nullptr;
        j["linear"] = 0.0;
        j["underflows"] = true;
        return j;
    }
    j["log"] = value.log_value();
    j["linear"] = value.linear_underflows() ? 0.0 : value.linear();
    j["underflows"] = value.linear_underflows();
    return j;
}

void dump_operator_pair(const sbl::OperatorPair& ops, const std::string& path) {
    std::ofstream stiffness_out(path);
    if (!stiffness_out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    sbl::write_matrix_market(ops.stiffness, stiffness_out);
    const std::string mass_path = path + ".mass.mtx";
    std::ofstream mass_out(mass_path);
    if (!mass_out)
        throw std::runtime_error("cannot open '" + mass_path + "' for writing");
    sbl::write_matrix_market(ops.mass, mass_out);
}

void dump_mesh_obj(const sbl::ModelManifold& model, const std::string& path) {
    if (model.kind != sbl::ModelKind::sphere)
        throw std::runtime_error("--dump-mesh needs a mesh model; '" + model.name +
                                 "' is a grid");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    sbl::write_obj(model.mesh, out);
}

int run_bounds(int m, double K, double L, double D, std::optional<double> vol, int k,
               double alpha, bool as_json) {
    sbl::GeometricHypotheses hyp;
    hyp.dimension = m;
    hyp.curvature_bound = K;
    hyp.gradient_bound = L;
    hyp.diameter = D;
    hyp.volume = vol;
    sbl::validate(hyp);

    const sbl::BoundChain chain = sbl::bound_chain(hyp);
    const sbl::LogScalar in_alpha =
        sbl::in_alpha_lower_bound(hyp, alpha, D, vol.value_or(1.0));

    std::vector<ConstantRow> rows;
    rows.push_back({"IN_alpha lower bound (alpha=" + std::to_string(alpha) + ")", in_alpha});
    rows.push_back({"lambda_1 lower bound c0", chain.first_gap});
    rows.push_back({"lambda_k growth coefficient", chain.growth_coefficient});
    if (k > 1)
        rows.push_back({"lambda_k lower bound (k=" + std::to_string(k) + ")",
                        sbl::lambda_k_lower_bound(hyp, k)});
    rows.push_back({"Sobolev constant c1", chain.sobolev.c1});
    rows.push_back({"Sobolev constant c2", chain.sobolev.c2});

    if (as_json) {
        nlohmann::ordered_json j;
        j["hypotheses"] = {{"dimension", m},
                           {"curvature_bound", K},
                           {"gradient_bound", L},
                           {"diameter", D}};
        if (vol) j["hypotheses"]["volume"] = *vol;
        j["growth_exponent"] = chain.growth_exponent;
        j["constants"] = nlohmann::ordered_json::object();
        j["constants"]["in_alpha"] = constant_json(in_alpha);
        j["constants"]["c0"] = constant_json(chain.first_gap);
        j["constants"]["growth_coefficient"] = constant_json(chain.growth_coefficient);
        if (k > 1)
            j["constants"]["lambda_k"] = constant_json(sbl::lambda_k_lower_bound(hyp, k));
        j["constants"]["sobolev_c1"] = constant_json(chain.sobolev.c1);
        j["constants"]["sobolev_c2"] = constant_json(chain.sobolev.c2);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    print_constant_table(rows);
    std::cout << "growth exponent: lambda_k >= c * k^" << chain.growth_exponent
              << " for k >= 2\n";
    return 0;
}

int run_spectrum(const std::string& descriptor, int k, double tol, std::uint64_t seed,
                 const std::string& csv_path, const std::string& dump_mesh_path,
                 const std::string& dump_operator_path) {
    const sbl::ModelManifold model = sbl::make_model(descriptor);
    if (!dump_mesh_path.empty()) dump_mesh_obj(model, dump_mesh_path);
    const sbl::OperatorPair ops = sbl::build_operators(model);
    if (!dump_operator_path.empty()) dump_operator_pair(ops, dump_operator_path);

    sbl::SolverOptions options;
    options.tol = tol;
    options.seed = seed;
    sbl::Spectrum spectrum;
    try {
        spectrum = sbl::lowest_eigenpairs(ops, k, options);
    } catch (const sbl::SolverError& error) {
        std::cerr << "sbl spectrum: " << error.what() << "\n";
        return 2;
    }
    const sbl::ReferenceData reference = sbl::analytic_reference(model);

    std::ostream* out = &std::cout;
    std::ofstream csv;
    if (!csv_path.empty()) {
        csv.open(csv_path);
        if (!csv) {
            std::cerr << "sbl spectrum: cannot open '" << csv_path << "' for writing\n";
            return 2;
        }
        out = &csv;
    }
    *out << "index,eigenvalue,reference,residual\n";
    *out << std::setprecision(17);
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
        const double reference_value =
            i < reference.exact_eigenvalues.size() ? reference.exact_eigenvalues[i] : -1.0;
        *out << i << "," << spectrum.eigenvalues[i] << "," << reference_value << ","
             << spectrum.residuals[i] << "\n";
    }
    if (!csv_path.empty())
        std::cout << "wrote " << spectrum.eigenvalues.size() << " eigenvalues to "
                  << csv_path << "\n";
    return 0;
}

int run_verify(const std::string& descriptor, const std::string& potential_spec, int k_max,
               std::uint64_t seed, const std::string& out_path,
               const std::string& dump_mesh_path, const std::string& dump_operator_path) {
    const sbl::ModelManifold model = sbl::make_model(descriptor);
    if (!dump_mesh_path.empty()) dump_mesh_obj(model, dump_mesh_path);
    if (!dump_operator_path.empty()) dump_operator_pair(sbl::build_operators(model), dump_operator_path);
    const sbl::PotentialField potential = sbl::sample_potential(model, potential_spec);

    // Open before the run so a bad path fails in milliseconds, not after the solve.
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "sbl verify: cannot open '" << out_path << "' for writing\n";
        return 2;
    }
    const sbl::VerificationReport report =
        sbl::verify_model(model, potential, k_max, 1e-9, seed);
    out << sbl::report_to_json(report).dump(2) << "\n";

    int passed = 0;
    for (const auto& check : report.checks) passed += check.pass ? 1 : 0;
    std::cout << (report.pass ? "PASS" : "FAIL") << ": " << passed << "/"
              << report.checks.size() << " checks on " << report.model << " ("
              << std::setprecision(4) << report.runtime_ms << " ms), report written to "
              << out_path << "\n";
    if (!report.pass) {
        for (const auto& check : report.checks)
            if (!check.pass) {
                std::cerr << "first failing check: " << check.name << " [" << check.anchor
                          << "], margin_log=" << std::setprecision(17) << check.margin_log
                          << "\n";
                break;
            }
        return 1;
    }
    return 0;
}

void print_report_lines(const sbl::VerificationReport& report) {
    for (const auto& check : report.checks)
        std::cout << (check.pass ? "  pass  " : "  FAIL  ") << check.name << " ["
                  << check.anchor << "] margin_log=" << std::setprecision(6)
                  << check.margin_log << "\n";
}

int run_check(const std::string& which, int trials, std::uint64_t seed) {
    std::vector<sbl::VerificationReport> reports;
    if (which == "wz") {
        reports.push_back(sbl::check_wz_lemma(trials > 0 ? trials : 1000, seed));
    } else if (which == "sobolev") {
        for (const std::string& descriptor : {"torus:3:24", "sphere:4"}) {
            const sbl::ModelManifold model = sbl::make_model(descriptor);
            reports.push_back(sbl::check_sobolev(model, sbl::sample_potential(model, "zero"),
                                                 trials > 0 ? trials : 100, seed));
        }
    } else if (which == "gradient") {
        for (const std::string& descriptor : {"sphere:4", "torus:2:64", "torus:3:24"}) {
            const sbl::ModelManifold model = sbl::make_model(descriptor);
            reports.push_back(sbl::check_gradient_estimates(
                model, sbl::sample_potential(model, "zero"), 10, 1e-9, seed));
        }
    } else if (which == "volume") {
        for (const std::string& descriptor : {"sphere:4", "torus:2:64"}) {
            const sbl::ModelManifold model = sbl::make_model(descriptor);
            reports.push_back(sbl::check_volume_comparison(
                model, trials > 0 ? std::min(trials, 20) : 10, seed));
        }
    } else {
        std::cerr << "sbl check: unknown check '" << which
                  << "', expected sobolev|gradient|volume|wz\n";
        return 2;
    }

    bool all_pass = true;
    for (const auto& report : reports) {
        std::cout << report.model << ":\n";
        print_report_lines(report);
        all_pass = all_pass && report.pass;
    }
    std::cout << (all_pass ? "PASS" : "FAIL") << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification laboratory for explicit spectral lower bounds"};
    app.require_subcommand(1);

    auto* bounds = app.add_subcommand(
        "bounds", "evaluate the explicit bound constants for a hypothesis tuple");
    int bounds_m = 2;
    double bounds_K = 0.0, bounds_L = 0.0, bounds_D = 1.0, bounds_alpha = 1.0;
    std::optional<double> bounds_vol;
    int bounds_k = 1;
    bool bounds_json = false;
    bounds->add_option("--m", bounds_m, "dimension (>= 2)")->required();
    bounds->add_option("--K", bounds_K, "curvature bound K >= 0")->required();
    bounds->add_option("--L", bounds_L, "potential gradient bound L >= 0")->required();
    bounds->add_option("--D", bounds_D, "diameter upper bound D > 0")->required();
    bounds->add_option("--vol", bounds_vol, "volume (enters the isoperimetric bound)");
    bounds->add_option("--k", bounds_k, "also print the lambda_k lower bound");
    bounds->add_option("--alpha", bounds_alpha, "isoperimetric exponent (default 1)");
    bounds->add_flag("--json", bounds_json, "emit JSON instead of a table");

    auto* spectrum = app.add_subcommand(
        "spectrum", "compute the lowest eigenvalues of a catalog model");
    std::string spectrum_model;
    int spectrum_k = 10;
    double spectrum_tol = 1e-9;
    std::uint64_t spectrum_seed = 1;
    std::string spectrum_csv, spectrum_dump_mesh, spectrum_dump_operator;
    spectrum->add_option("--model", spectrum_model, "sphere:S or torus:M:N")->required();
    spectrum->add_option("--k", spectrum_k, "number of eigenvalues above the zero mode")
        ->required();
    spectrum->add_option("--tol", spectrum_tol, "residual tolerance (default 1e-9)");
    spectrum->add_option("--seed", spectrum_seed, "solver seed (default 1)");
    spectrum->add_option("--csv", spectrum_csv, "write index,eigenvalue,reference,residual");
    spectrum->add_option("--dump-mesh", spectrum_dump_mesh, "write the mesh as OBJ");
    spectrum->add_option("--dump-operator", spectrum_dump_operator,
                         "write stiffness (and .mass.mtx) in Matrix Market form");

    auto* verify = app.add_subcommand(
        "verify", "run the full bound verification chain and write a JSON report");
    std::string verify_model_arg, verify_potential = "zero", verify_out;
    int verify_kmax = 0;
    std::uint64_t verify_seed = 1;
    std::string verify_dump_mesh, verify_dump_operator;
    verify->add_option("--model", verify_model_arg, "sphere:S or torus:M:N")->required();
    verify->add_option("--potential", verify_potential, "zero or axcos:A (default zero)");
    verify->add_option("--kmax", verify_kmax, "top eigenvalue index for the chain checks")
        ->required();
    verify->add_option("--seed", verify_seed, "seed for solver and sampling (default 1)");
    verify->add_option("--out", verify_out, "report JSON path")->required();
    verify->add_option("--dump-mesh", verify_dump_mesh, "write the mesh as OBJ");
    verify->add_option("--dump-operator", verify_dump_operator,
                       "write stiffness (and .mass.mtx) in Matrix Market form");

    auto* check = app.add_subcommand(
        "check", "run one check family on its default catalog configurations");
    std::string check_which;
    int check_trials = 0;
    std::uint64_t check_seed = 1;
    check->add_option("--which", check_which, "sobolev|gradient|volume|wz")->required();
    check->add_option("--trials", check_trials, "sample count (family-specific default)");
    check->add_option("--seed", check_seed, "seed (default 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed())
            return run_bounds(bounds_m, bounds_K, bounds_L, bounds_D, bounds_vol, bounds_k,
                              bounds_alpha, bounds_json);
        if (spectrum->parsed())
            return run_spectrum(spectrum_model, spectrum_k, spectrum_tol, spectrum_seed,
                                spectrum_csv, spectrum_dump_mesh, spectrum_dump_operator);
        if (verify->parsed())
            return run_verify(verify_model_arg, verify_potential, verify_kmax, verify_seed,
                              verify_out, verify_dump_mesh, verify_dump_operator);
        if (check->parsed()) return run_check(check_which, check_trials, check_seed);
    } catch (const std::exception& error) {
        std::cerr << "sbl: " << error.what() << "\n";
        return 2;
    }
    return 2;
}
