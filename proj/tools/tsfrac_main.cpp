// Command-line front end: solve problem configs, check solvability
// conditions, and compare the fractional derivative flavors on a grid.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tsfrac/tsfrac.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitExistenceOnly = 3;
constexpr int kExitNoGuarantee = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    double mesh_override = 0.0; // 0 = keep config value
    bool quiet = false;
};

tsfrac::ProblemConfig load_config(const CommonOpts& opts) {
    std::ifstream in(opts.config_path);
    if (!in)
        throw tsfrac::Error("cannot open config file '" + opts.config_path + "'");
    auto cfg = tsfrac::parse_config(in);
    if (opts.mesh_override > 0.0)
        cfg.solver.mesh = opts.mesh_override;
    return cfg;
}

/// Writes CSV to --out, then the [output] path, then stdout.
void write_csv(const CommonOpts& opts, const tsfrac::ProblemConfig& cfg,
               const std::string& body) {
    std::string path = opts.out_path;
    if (path.empty() && cfg.csv_path)
        path = *cfg.csv_path;
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw tsfrac::Error("cannot open output file '" + path + "'");
    out << body;
}

int run_solve(const CommonOpts& opts) {
    tsfrac::ProblemConfig cfg;
    std::unique_ptr<tsfrac::ImpulsiveProblem> problem;
    try {
        cfg = load_config(opts);
        problem = std::make_unique<tsfrac::ImpulsiveProblem>(cfg.problem());
        cfg.solver.validate();
    } catch (const tsfrac::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const auto sol = tsfrac::solve(*problem, cfg.solver);
        const auto t1 = std::chrono::steady_clock::now();
        const double seconds =
            std::chrono::duration<double>(t1 - t0).count();

        std::ostringstream body;
        tsfrac::emit_solution_csv(body, sol);
        write_csv(opts, cfg, body.str());

        if (!opts.quiet) {
            std::cout << "converged: outer_iterations " << sol.outer_iterations
                      << ", picard_sweeps " << sol.picard_sweeps
                      << ", inner_iterations " << sol.inner_iterations << "\n";
            std::cout << "residual " << tsfrac::format_double(sol.residual)
                      << "\n";
            std::cout << "p(0) " << tsfrac::format_double(sol.p.front())
                      << "  p(T) " << tsfrac::format_double(sol.p.back())
                      << "\n";
            std::cout << "runtime_seconds " << seconds << "\n";
        }
        return kExitOk;
    } catch (const tsfrac::IterationDiverged& e) {
        std::cerr << "diverged in " << e.loop << ": " << e.what()
                  << " (last iterate " << e.last_iterate << ", change ratio "
                  << e.ratio << ")\n";
        return kExitDiverged;
    } catch (const tsfrac::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int run_check(const CommonOpts& opts, const std::string& constants_path) {
    tsfrac::ProblemConfig cfg;
    std::unique_ptr<tsfrac::ImpulsiveProblem> problem;
    tsfrac::HypothesisConstants constants;
    try {
        cfg = load_config(opts);
        problem = std::make_unique<tsfrac::ImpulsiveProblem>(cfg.problem());
        if (!constants_path.empty()) {
            std::ifstream in(constants_path);
            if (!in)
                throw tsfrac::Error("cannot open constants file '" +
                                    constants_path + "'");
            constants = tsfrac::parse_constants(in);
            if (constants.M.empty())
                constants.M.assign(problem->impulses.size(), 0.0);
            if (constants.L.empty())
                constants.L.assign(problem->impulses.size(), 0.0);
        } else {
            tsfrac::SamplingBox box;
            box.theta_max = problem->ts.max();
            constants = tsfrac::estimate_constants(*problem, box);
        }
    } catch (const tsfrac::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        const double T = problem->ts.max();
        const std::size_t m = problem->impulses.size();
        const auto report =
            tsfrac::contraction_constant(constants, problem->w, T, m);
        const auto beta =
            tsfrac::existence_beta_search(constants, problem->w, T, m);

        if (!opts.quiet) {
            std::cout << (constants.estimated
                              ? "constants: estimated by sampling (lower "
                                "bounds, not certificates)\n"
                              : "constants: user supplied\n");
            std::cout << "uniqueness: U = " << tsfrac::format_double(report.U)
                      << (report.satisfied ? " < 1, satisfied"
                                           : " >= 1, not satisfied")
                      << "\n";
            std::cout << "  impulse term  " << report.term_impulses << "\n"
                      << "  phi term      " << report.term_phi << "\n"
                      << "  rhs term      " << report.term_rhs << "\n";
            if (report.sigma)
                std::cout << "  ball radius sigma = " << *report.sigma << "\n";
            if (beta)
                std::cout << "existence: beta = " << *beta << " works\n";
            else
                std::cout << "existence: no admissible beta\n";
        }
        // machine-readable block
        std::cout << "U " << tsfrac::format_double(report.U) << "\n";
        std::cout << "U_term_impulses "
                  << tsfrac::format_double(report.term_impulses) << "\n";
        std::cout << "U_term_phi " << tsfrac::format_double(report.term_phi)
                  << "\n";
        std::cout << "U_term_rhs " << tsfrac::format_double(report.term_rhs)
                  << "\n";
        std::cout << "uniqueness_satisfied " << (report.satisfied ? 1 : 0)
                  << "\n";
        if (report.sigma)
            std::cout << "sigma " << tsfrac::format_double(*report.sigma)
                      << "\n";
        std::cout << "existence_satisfied " << (beta ? 1 : 0) << "\n";
        if (beta)
            std::cout << "beta " << tsfrac::format_double(*beta) << "\n";

        if (report.satisfied)
            return kExitOk;
        return beta ? kExitExistenceOnly : kExitNoGuarantee;
    } catch (const tsfrac::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int run_compare(const CommonOpts& opts, const std::string& f_text,
                double w_value, double rho) {
    try {
        const auto cfg = load_config(opts);
        const auto f_expr =
            tsfrac::Expr::parse(f_text, {tsfrac::Var::theta}, "compare");
        const tsfrac::TimeScale ts = cfg.timescale();
        const tsfrac::FracOrder w(w_value > 0 ? w_value : cfg.w);

        auto grid = std::make_shared<const tsfrac::Grid>(
            tsfrac::build_grid(ts, cfg.solver.mesh,
                               std::vector<double>{rho}));
        const auto f = tsfrac::GridFunction::sample(grid, [&](double theta) {
            tsfrac::Bindings b;
            b.theta = theta;
            return f_expr.eval(b);
        });

        const std::size_t rho_idx = *grid->find(rho);
        std::vector<tsfrac::CompareRow> rows;
        for (std::size_t i = rho_idx + 1; i < grid->size(); ++i) {
            rows.push_back({grid->node(i),
                            tsfrac::caputo_nabla(f, w, rho_idx, i),
                            tsfrac::rl_nabla(f, w, rho_idx, i),
                            tsfrac::caputo_via_rl(f, w, rho_idx, i)});
        }
        std::ostringstream body;
        tsfrac::emit_compare_csv(body, rows);
        write_csv(opts, cfg, body.str());
        return kExitOk;
    } catch (const tsfrac::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional dynamic equations on time scales"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string constants_path;
    std::string f_text;
    double w_value = 0.0;
    double rho = 0.0;

    const auto add_common = [&](CLI::App* cmd, bool out_flag = true) {
        cmd->add_option("--config", opts.config_path, "problem config file")
            ->required();
        if (out_flag)
            cmd->add_option("--out", opts.out_path, "CSV output path");
        cmd->add_option("--mesh", opts.mesh_override, "mesh override");
        cmd->add_flag("--quiet", opts.quiet, "suppress the summary");
    };

    auto* solve_cmd =
        app.add_subcommand("solve", "solve the problem and emit a CSV");
    add_common(solve_cmd);

    auto* check_cmd = app.add_subcommand(
        "check", "evaluate the uniqueness and existence conditions");
    add_common(check_cmd, false);
    check_cmd->add_option("--constants", constants_path,
                          "constants file; omitted means estimate by sampling");

    auto* compare_cmd = app.add_subcommand(
        "compare", "tabulate Caputo vs Riemann-Liouville derivatives");
    add_common(compare_cmd);
    compare_cmd->add_option("--f", f_text, "function of theta")->required();
    compare_cmd->add_option("--w", w_value, "fractional order (default: config w)");
    compare_cmd->add_option("--rho", rho, "lower limit (default 0)");

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed())
        return run_solve(opts);
    if (check_cmd->parsed())
        return run_check(opts, constants_path);
    return run_compare(opts, f_text, w_value, rho);
}
