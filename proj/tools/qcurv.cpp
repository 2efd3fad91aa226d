#include <cmath>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcurv/convexity.hpp"
#include "qcurv/moduli.hpp"
#include "qcurv/operator_io.hpp"
#include "qcurv/operators.hpp"
#include "qcurv/report_io.hpp"
#include "qcurv/simplex.hpp"
#include "qcurv/spectra.hpp"
#include "qcurv/tfim_exact.hpp"

namespace {

using nlohmann::json;

struct ModelFlags {
    std::string model = "tfim";
    int sites = 10;
    bool open_chain = false;
    int lx = 2, ly = 2;
    std::string input_path;
};

struct GridFlags {
    double g_min = 0.2;
    double g_max = 3.0;
    int steps = 200;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
    cmd->add_option("--model", mf.model, "Model: tfim, toric, or custom-json")
        ->check(CLI::IsMember({"tfim", "toric", "custom-json"}))
        ->capture_default_str();
    cmd->add_option("--sites", mf.sites, "Chain length for tfim")->capture_default_str();
    cmd->add_flag("--open", mf.open_chain, "Open boundary conditions for tfim");
    cmd->add_option("--lx", mf.lx, "Torus width for toric")->capture_default_str();
    cmd->add_option("--ly", mf.ly, "Torus height for toric")->capture_default_str();
    cmd->add_option("--in", mf.input_path, "pair-JSON input for custom-json");
}

void add_grid_flags(CLI::App* cmd, GridFlags& gf) {
    cmd->add_option("--g-min", gf.g_min, "Smallest coupling")->capture_default_str();
    cmd->add_option("--g-max", gf.g_max, "Largest coupling")->capture_default_str();
    cmd->add_option("--steps", gf.steps, "Number of grid points")->capture_default_str();
}

void validate_grid_flags(const GridFlags& gf) {
    if (!(gf.g_min < gf.g_max))
        throw qcurv::ValidationError("grid: requires g-min < g-max");
    if (gf.steps < 2) throw qcurv::ValidationError("grid: requires steps >= 2");
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

qcurv::OperatorPair build_model(const ModelFlags& mf) {
    if (mf.model == "tfim") return qcurv::build_tfim(mf.sites, !mf.open_chain);
    if (mf.model == "toric") return qcurv::build_toric_code(mf.lx, mf.ly);
    if (mf.input_path.empty())
        throw qcurv::ValidationError("custom-json model requires --in <pair.json>");
    const auto text = qcurv::read_text_file(mf.input_path);
    return qcurv::pair_from_json(qcurv::parse_json_text(text, mf.input_path));
}

std::string model_echo(const ModelFlags& mf) {
    std::ostringstream out;
    out << "--model " << mf.model;
    if (mf.model == "tfim") {
        out << " --sites " << mf.sites;
        if (mf.open_chain) out << " --open";
    } else if (mf.model == "toric") {
        out << " --lx " << mf.lx << " --ly " << mf.ly;
    } else {
        out << " --in " << mf.input_path;
    }
    return out.str();
}

std::string grid_echo(const GridFlags& gf) {
    std::ostringstream out;
    out << "--g-min " << qcurv::format_double(gf.g_min) << " --g-max "
        << qcurv::format_double(gf.g_max) << " --steps " << gf.steps;
    return out.str();
}

int run_sweep(const ModelFlags& mf, const GridFlags& gf, const std::string& out_path) {
    validate_grid_flags(gf);
    const auto pair = build_model(mf);
    const auto grid = linspace(gf.g_min, gf.g_max, gf.steps);
    const auto curve = qcurv::sweep_boundary(pair, grid);
    std::ostringstream echo;
    echo << "qcurv sweep " << model_echo(mf) << ' ' << grid_echo(gf) << " --out " << out_path;
    qcurv::write_text_file(out_path, qcurv::boundary_curve_csv(curve, echo.str()));
    return 0;
}

int run_branches(const ModelFlags& mf, const GridFlags& gf, int k_max,
                 const std::string& out_path) {
    validate_grid_flags(gf);
    const auto pair = build_model(mf);
    const auto grid = linspace(gf.g_min, gf.g_max, gf.steps);
    const auto branches = qcurv::trace_branches(pair, grid, k_max);
    std::ostringstream echo;
    echo << "qcurv branches " << model_echo(mf) << ' ' << grid_echo(gf) << " --k-max " << k_max
         << " --out " << out_path;
    qcurv::write_text_file(out_path, qcurv::branches_csv(branches, echo.str()));
    return 0;
}

int run_tfim_exact(const GridFlags& gf, const std::string& out_path) {
    validate_grid_flags(gf);
    if (!(gf.g_min > 0.0))
        throw qcurv::ValidationError("tfim-exact: couplings must be positive");
    auto grid = linspace(gf.g_min, gf.g_max, gf.steps);
    // The self-dual point is physically distinguished (kappa -> 0 there, but
    // only logarithmically): snap the nearest grid point to exactly 1 so the
    // output contains the true limit row.
    if (gf.g_min < 1.0 && 1.0 < gf.g_max) {
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (std::abs(grid[i] - 1.0) < std::abs(grid[nearest] - 1.0)) nearest = i;
        grid[nearest] = 1.0;
    }
    std::vector<qcurv::ExactRow> rows;
    rows.reserve(grid.size());
    for (const double g : grid) {
        const auto [h1, h2] = qcurv::boundary_exact(g);
        rows.push_back({g, qcurv::magnetization(g), h1, h2, qcurv::curvature_exact(g)});
    }
    std::ostringstream echo;
    echo << "qcurv tfim-exact " << grid_echo(gf) << " --out " << out_path;
    qcurv::write_text_file(out_path, qcurv::exact_curve_csv(rows, echo.str()));
    return 0;
}

int run_critical(const std::string& in_path, const std::string& jump_tol_text, double kappa_tol,
                 const std::string& out_path) {
    const auto curve = qcurv::boundary_curve_from_csv(qcurv::read_text_file(in_path));
    double jump_tol = 0.0;
    if (jump_tol_text == "auto") {
        jump_tol = qcurv::default_jump_tol(curve);
    } else {
        try {
            jump_tol = std::stod(jump_tol_text);
        } catch (const std::exception&) {
            throw qcurv::ValidationError("critical: --jump-tol must be a number or 'auto'");
        }
    }
    const auto report = qcurv::detect_transition(curve, jump_tol, kappa_tol);
    std::ostringstream echo;
    echo << "qcurv critical --in " << in_path << " --kappa-tol "
         << qcurv::format_double(kappa_tol) << " --jump-tol " << jump_tol_text;
    if (!out_path.empty()) echo << " --out " << out_path;
    const json j = qcurv::transition_report_json(report, echo.str());
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) std::cout << text;
    else qcurv::write_text_file(out_path, text);
    return 0;
}

int run_simplex(const std::string& in_path, const std::string& out_path) {
    const json j = qcurv::parse_json_text(qcurv::read_text_file(in_path), in_path);
    std::vector<qcurv::OperatorMatrix> ops;
    if (j.contains("ops")) {
        ops = qcurv::family_from_json(j);
    } else {
        const auto pair = qcurv::pair_from_json(j);
        ops = {pair.h1, pair.h2};
    }
    if (ops.size() < 2)
        throw qcurv::ValidationError("simplex: need at least two operators");

    std::ostringstream echo;
    echo << "qcurv simplex --in " << in_path << " --out " << out_path;

    const auto check = qcurv::verify_commuting(ops, qcurv::commuting_tol(ops));
    json out{{"commuting", check.commuting}, {"vertices", json::array()},
             {"config", echo.str()}};
    if (!check.commuting) {
        qcurv::write_text_file(out_path, out.dump(2) + "\n");
        std::ostringstream msg;
        msg << "simplex: operators " << check.worst_i << " and " << check.worst_j
            << " do not commute (violation " << check.max_violation << ")";
        throw qcurv::ValidationError(msg.str());
    }

    qcurv::OperatorPair pair{ops[0], ops[1], "H1", "H2", 1, false};
    for (const auto& v : qcurv::moduli_polytope_2d(pair))
        out["vertices"].push_back({v.x(), v.y()});
    qcurv::write_text_file(out_path, out.dump(2) + "\n");
    return 0;
}

int run_convexity_test(int dim, int trials, std::uint64_t seed, int samples,
                       const std::string& out_path) {
    if (dim < 2) throw qcurv::ValidationError("convexity-test: dim must be >= 2");
    if (trials < 1) throw qcurv::ValidationError("convexity-test: trials must be >= 1");
    double max_dev = 0.0;
    json failures = json::array();
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t base = seed + 4ull * static_cast<std::uint64_t>(t);
        qcurv::OperatorPair pair{qcurv::random_hermitian(dim, base),
                                 qcurv::random_hermitian(dim, base + 1), "H1", "H2", 1, false};
        const auto psi1 = qcurv::random_state(dim, base + 2);
        const auto psi2 = qcurv::random_state(dim, base + 3);
        const auto icase = qcurv::make_interpolation_case(pair, psi1, psi2);
        const double dev = qcurv::segment_deviation(icase, pair, samples);
        max_dev = std::max(max_dev, dev);
        if (dev > 1e-8) failures.push_back(t);
    }
    std::ostringstream echo;
    echo << "qcurv convexity-test --dim " << dim << " --trials " << trials << " --seed " << seed
         << " --samples " << samples << " --out " << out_path;
    const json out{{"trials", trials}, {"dim", dim}, {"seed", seed},
                   {"max_deviation", max_dev}, {"failures", failures},
                   {"config", echo.str()}};
    qcurv::write_text_file(out_path, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moduli-space geometry of competing quantum operators"};
    app.require_subcommand(1);

    ModelFlags sweep_model, branch_model;
    GridFlags sweep_grid, branch_grid;
    GridFlags exact_grid{0.2, 5.0, 400};
    std::string sweep_out, branch_out, exact_out;
    int k_max = 4;

    auto* sweep = app.add_subcommand("sweep", "Trace the ground-state boundary over a coupling grid");
    add_model_flags(sweep, sweep_model);
    add_grid_flags(sweep, sweep_grid);
    sweep->add_option("--out", sweep_out, "Boundary CSV path")->required();

    auto* branches = app.add_subcommand("branches", "Trace eigenstate branch curves");
    add_model_flags(branches, branch_model);
    add_grid_flags(branches, branch_grid);
    branches->add_option("--k-max", k_max, "Number of branches")->capture_default_str();
    branches->add_option("--out", branch_out, "Branch CSV path")->required();

    auto* exact = app.add_subcommand("tfim-exact", "Closed-form boundary and curvature");
    add_grid_flags(exact, exact_grid);
    exact->add_option("--out", exact_out, "Exact CSV path")->required();

    std::string crit_in, crit_jump = "auto", crit_out;
    double crit_kappa = 0.5;
    auto* critical = app.add_subcommand("critical", "Detect and classify a transition from a boundary CSV");
    critical->add_option("--in", crit_in, "Boundary CSV input")->required();
    critical->add_option("--kappa-tol", crit_kappa, "Type-II curvature threshold")
        ->capture_default_str();
    critical->add_option("--jump-tol", crit_jump, "Type-I jump threshold or 'auto'")
        ->capture_default_str();
    critical->add_option("--out", crit_out, "Report JSON path (stdout when omitted)");

    std::string simplex_in, simplex_out;
    auto* simplex = app.add_subcommand("simplex", "Moduli polygon of a commuting family");
    simplex->add_option("--in", simplex_in, "pair-JSON or family-JSON input")->required();
    simplex->add_option("--out", simplex_out, "Polygon JSON path")->required();

    int conv_dim = 16, conv_trials = 1000, conv_samples = 41;
    std::uint64_t conv_seed = 1;
    std::string conv_out;
    auto* convexity = app.add_subcommand("convexity-test", "Random-ensemble segment interpolation check");
    convexity->add_option("--dim", conv_dim, "Hilbert space dimension")->capture_default_str();
    convexity->add_option("--trials", conv_trials, "Number of random cases")->capture_default_str();
    convexity->add_option("--seed", conv_seed, "RNG seed")->capture_default_str();
    convexity->add_option("--samples", conv_samples, "Interpolation samples per case")
        ->capture_default_str();
    convexity->add_option("--out", conv_out, "Report JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // bad flags are validation errors
    }

    try {
        if (sweep->parsed()) return run_sweep(sweep_model, sweep_grid, sweep_out);
        if (branches->parsed()) return run_branches(branch_model, branch_grid, k_max, branch_out);
        if (exact->parsed()) return run_tfim_exact(exact_grid, exact_out);
        if (critical->parsed()) return run_critical(crit_in, crit_jump, crit_kappa, crit_out);
        if (simplex->parsed()) return run_simplex(simplex_in, simplex_out);
        if (convexity->parsed())
            return run_convexity_test(conv_dim, conv_trials, conv_seed, conv_samples, conv_out);
    } catch (const qcurv::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qcurv::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
