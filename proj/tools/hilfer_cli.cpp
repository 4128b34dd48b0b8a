#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hilfer/config.hpp"
#include "hilfer/csv.hpp"
#include "hilfer/special.hpp"

namespace fs = std::filesystem;
using namespace hilfer;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericFailure = 3;

solver::ImpulsiveSystem example_system(double nu) {
    solver::ImpulsiveSystem sys;
    sys.mode = solver::Mode::NonInstantaneous;
    sys.order = fraccalc::HilferOrder(0.4, nu);
    sys.schedule.t_points = {0.0, 1.0, 2.0};
    sys.schedule.p_points = {0.5, 1.5, 2.5};
    sys.schedule.horizon = 2.5;
    sys.g = expr::parse("t");
    sys.impulse_maps = {expr::parse("t - 0*x + y"), expr::parse("t - 1*x + y")};
    sys.x0 = 1.0;
    return sys;
}

int run_simulate(const std::string& config_path, const std::string& out_dir, int points) {
    config::RunConfig cfg;
    try {
        cfg = config::load_config(config_path);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    if (points > 0) cfg.mesh.points_per_interval = points;
    solver::PiecewiseTrajectory traj;
    try {
        traj = solver::solve(cfg.system, cfg.mesh);
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitNumericFailure;
    }
    std::string path = cfg.trajectory_csv ? *cfg.trajectory_csv
                                          : (fs::path(out_dir) / "trajectory.csv").string();
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "config error: cannot open output file " << path << "\n";
        return kExitConfigError;
    }
    csv::write_trajectory(os, traj);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int run_reproduce(const std::string& nu_csv, const std::string& out_dir, int points) {
    std::vector<std::pair<std::string, double>> nus;
    std::stringstream ss(nu_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size() || !(v >= 0.0) || !(v <= 1.0))
                throw std::invalid_argument(tok);
            nus.emplace_back(tok, v);
        } catch (...) {
            std::cerr << "config error: bad nu value '" << tok << "' (need nu in [0,1])\n";
            return kExitConfigError;
        }
    }
    if (nus.empty()) {
        std::cerr << "config error: empty nu list\n";
        return kExitConfigError;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    solver::MeshSpec mesh;
    if (points > 0) mesh.points_per_interval = points;

    for (const auto& [name, nu] : nus) {
        solver::ImpulsiveSystem sys = example_system(nu);
        solver::PiecewiseTrajectory traj;
        try {
            traj = solver::solve(sys, mesh);
        } catch (const std::exception& e) {
            std::cerr << "solver failure at nu=" << name << ": " << e.what() << "\n";
            return kExitNumericFailure;
        }
        std::string path = (fs::path(out_dir) / ("trace_nu_" + name + ".csv")).string();
        std::ofstream os(path, std::ios::binary);
        csv::write_trajectory(os, traj);
        std::cout << "wrote " << path << "\n";
    }

    // closed-form reference for nu = 1 on the same grid layout
    {
        solver::ImpulsiveSystem sys = example_system(1.0);
        solver::PiecewiseTrajectory traj = solver::solve(sys, mesh);
        std::vector<double> t, x;
        fraccalc::HilferOrder ord(0.4, 1.0);
        for (const auto& seg : traj.segments)
            for (double s : seg.grid)
                if (s > 0.0) {
                    t.push_back(s);
                    x.push_back(solver::closed_form_example(s, ord, 1.0));
                }
        std::string path = (fs::path(out_dir) / "closed_form.csv").string();
        std::ofstream os(path, std::ios::binary);
        csv::write_series(os, t, x);
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

int run_check(const std::string& config_path, int points, const std::string& envelope_param) {
    config::RunConfig cfg;
    try {
        cfg = config::load_config(config_path);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    if (points > 0) cfg.mesh.points_per_interval = points;
    stability::EnvelopeParam param = stability::EnvelopeParam::Lambda;
    if (envelope_param == "nu")
        param = stability::EnvelopeParam::Nu;
    else if (envelope_param.empty() && cfg.envelope)
        param = cfg.envelope->param;

    bool all_pass = true;
    bool ran_any = false;
    try {
        if (cfg.contraction) {
            ran_any = true;
            auto rep = solver::contraction_constant(cfg.contraction->L, cfg.contraction->I_list,
                                                    cfg.system.order, cfg.system.schedule,
                                                    cfg.contraction->p);
            std::printf("contraction: K = %.6f  (p = %.6f)\n", rep.K, rep.p_used);
            std::printf("  term[impulse sup]      = %.6f\n", rep.terms[0]);
            std::printf("  term[first interval]   = %.6f\n", rep.terms[1]);
            std::printf("  term[general interval] = %.6f\n", rep.terms[2]);
            std::printf("  verdict: %s\n",
                        rep.contraction ? "contraction (K < 1)" : "NOT a contraction");
            all_pass = all_pass && rep.contraction;
        }
        if (cfg.lyapunov) {
            ran_any = true;
            solver::PiecewiseTrajectory traj = solver::solve(cfg.system, cfg.mesh);
            auto rep = stability::verify_lyapunov(cfg.system, traj, *cfg.lyapunov, 1);
            std::printf("lyapunov conditions:\n");
            for (const auto& c : rep.checks)
                std::printf("  %-34s margin = %+.3e at t = %-8.4g %s\n", c.name.c_str(), c.margin,
                            c.location, c.pass ? "pass" : "FAIL");
            all_pass = all_pass && rep.pass;

            stability::StabilityCertificate cert;
            cert.lyap = *cfg.lyapunov;
            cert.order = cfg.system.order;
            if (cfg.envelope) {
                cert.gamma = cfg.envelope->gamma;
                cert.h = cfg.envelope->h;
            }
            cert = stability::check_envelope_dominance(traj, cert, cfg.system.schedule,
                                                       cfg.system.mode, std::fabs(cfg.system.x0),
                                                       param);
            std::printf("envelope dominance: h = %.6g gamma = %.6g margin = %+.3e  %s\n", cert.h,
                        cert.gamma, cert.margin, cert.verdict ? "pass" : "FAIL");
            all_pass = all_pass && cert.verdict;
        }
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumericFailure;
    }
    if (!ran_any) {
        std::cerr
            << "config error: config requests no checks (need 'contraction' and/or 'lyapunov')\n";
        return kExitConfigError;
    }
    return all_pass ? 0 : kExitCheckFailed;
}

struct SelftestRow {
    std::string suite, name;
    double value, tol;
    bool pass;
};

int run_selftest(int points, const std::string& suite) {
    const int n = points > 0 ? points : 128;
    std::vector<SelftestRow> rows;
    auto add = [&](const std::string& s, const std::string& name, double v, double tol) {
        rows.push_back({s, name, v, tol, std::fabs(v) <= tol});
    };
    bool want_closed = suite.empty() || suite == "closedform";
    bool want_comp = suite.empty() || suite == "composition";
    bool want_laplace = suite.empty() || suite == "laplace";
    if (!(want_closed || want_comp || want_laplace)) {
        std::cerr << "config error: unknown suite '" << suite
                  << "' (expected closedform|composition|laplace)\n";
        return kExitConfigError;
    }

    try {
        if (want_closed) {
            for (double mu : {0.3, 0.4, 0.7}) {
                for (double delta : {0.7, 1.0, 1.5, 2.0}) {
                    double w = delta < 1.0 ? delta : 1.0;
                    auto grid = fraccalc::graded_grid(0.0, 1.0, n, std::max(2.0, 1.0 / w));
                    std::vector<double> vals(grid.size());
                    for (std::size_t j = 0; j < grid.size(); ++j)
                        vals[j] = std::pow(grid[j], delta - w);
                    fraccalc::SampledFn f(0.0, w, grid, vals);
                    double got = fraccalc::frac_integral_quad(mu, f, 1.0);
                    double want = fraccalc::frac_integral_power(mu, delta, 1.0, 0.0);
                    char name[64];
                    std::snprintf(name, sizeof name, "I^%.1f (t)^{%.1f-1}", mu, delta);
                    add("closedform", name, got - want, 5e-3);
                }
                for (double nu : {0.0, 0.5, 1.0}) {
                    fraccalc::HilferOrder ord(mu, nu);
                    for (double delta : {0.7, 1.0, 1.5, 2.0}) {
                        double w = delta < 1.0 ? delta : 1.0;
                        auto grid = fraccalc::graded_grid(0.0, 1.0, n, std::max(2.0, 1.0 / w));
                        std::vector<double> vals(grid.size());
                        for (std::size_t j = 0; j < grid.size(); ++j)
                            vals[j] = std::pow(grid[j], delta - w);
                        fraccalc::SampledFn f(0.0, w, grid, vals);
                        double got = fraccalc::hilfer_deriv_quad(ord, f, 1.0);
                        double want = fraccalc::hilfer_deriv_power(ord, delta, 1.0, 0.0);
                        char name[64];
                        std::snprintf(name, sizeof name, "D^{%.1f,%.1f} (t)^{%.1f-1}", mu, nu,
                                      delta);
                        add("closedform", name, got - want, 5e-3);
                    }
                    // the lam-1 power must map to 0
                    auto grid = fraccalc::graded_grid(0.0, 1.0, n, std::max(2.0, 1.0 / ord.lam));
                    std::vector<double> ones(grid.size(), 1.0);
                    fraccalc::SampledFn f(0.0, ord.lam, grid, ones);
                    char name[64];
                    std::snprintf(name, sizeof name, "D^{%.1f,%.1f} (t)^{lam-1}", mu, nu);
                    add("closedform", name, fraccalc::hilfer_deriv_quad(ord, f, 1.0), 5e-3);
                }
            }
        }
        if (want_comp) {
            for (double mu : {0.4, 0.7}) {
                for (double nu : {0.0, 0.5, 1.0}) {
                    fraccalc::HilferOrder ord(mu, nu);
                    for (double powr : {1.0, 2.0}) {
                        auto grid =
                            fraccalc::graded_grid(0.0, 1.0, n, std::max(2.0, 1.0 / ord.lam));
                        std::vector<double> vals(grid.size());
                        for (std::size_t j = 0; j < grid.size(); ++j)
                            vals[j] = std::pow(grid[j], powr);
                        fraccalc::SampledFn f(0.0, 1.0, grid, vals);
                        auto [r1, r2] = fraccalc::composition_residuals(ord, f, 1.0);
                        char name[80];
                        std::snprintf(name, sizeof name, "D(I f)=f, f=t^%.0f, mu=%.1f nu=%.1f",
                                      powr, mu, nu);
                        add("composition", name, r1, 1e-2);
                        std::snprintf(name, sizeof name,
                                      "I(D f)=f-corr, f=t^%.0f, mu=%.1f nu=%.1f", powr, mu, nu);
                        add("composition", name, r2, 1e-2);
                    }
                }
            }
        }
        if (want_laplace) {
            add("laplace", "mu=1 lam=1 g=1 s=2 T=40",
                special::ml_laplace_residual({1.0, 1.0}, 1.0, 2.0, 40.0), 1e-8);
            add("laplace", "mu=0.4 lam=1 g=1 s=1 T=60",
                special::ml_laplace_residual({0.4, 1.0}, 1.0, 1.0, 60.0), 1e-6);
            add("laplace", "mu=0.5 lam=0.5 g=0 s=1 T=60",
                special::ml_laplace_residual({0.5, 0.5}, 0.0, 1.0, 60.0), 1e-8);
        }
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumericFailure;
    }

    bool all = true;
    std::printf("%-12s %-38s %12s %9s  %s\n", "suite", "case", "residual", "tol", "status");
    for (const auto& r : rows) {
        std::printf("%-12s %-38s %12.3e %9.0e  %s\n", r.suite.c_str(), r.name.c_str(), r.value,
                    r.tol, r.pass ? "pass" : "FAIL");
        all = all && r.pass;
    }
    std::printf("%zu cases, %s\n", rows.size(), all ? "all passed" : "FAILURES present");
    return all ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impulsive Hilfer fractional systems: simulation and stability checks"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", nu_csv, suite, envelope_param;
    int points = 0;

    auto* sim =
        app.add_subcommand("simulate", "solve a configured system and write the trajectory CSV");
    sim->add_option("--config", config_path, "JSON run configuration")->required();
    sim->add_option("--out", out_dir, "output directory (default .)");
    sim->add_option("--points", points, "override mesh points per interval");

    auto* rep = app.add_subcommand("reproduce-example",
                                   "solve the worked impulsive example for a list of nu values");
    rep->add_option("--nu", nu_csv, "comma-separated nu values in [0,1]")->required();
    rep->add_option("--out", out_dir, "output directory (default .)");
    rep->add_option("--points", points, "override mesh points per interval");

    auto* chk = app.add_subcommand("check", "contraction / Lyapunov / envelope checks");
    chk->add_option("--config", config_path, "JSON run configuration")->required();
    chk->add_option("--points", points, "override mesh points per interval");
    chk->add_option("--envelope-param", envelope_param, "lambda|nu second E parameter")
        ->check(CLI::IsMember({"lambda", "nu"}));

    auto* st = app.add_subcommand("selftest", "closed-form, composition and Laplace oracle suites");
    st->add_option("--points", points, "mesh points per interval (default 128)");
    st->add_option("--suite", suite, "run one suite: closedform|composition|laplace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    if (sim->parsed()) return run_simulate(config_path, out_dir, points);
    if (rep->parsed()) return run_reproduce(nu_csv, out_dir, points);
    if (chk->parsed()) return run_check(config_path, points, envelope_param);
    return run_selftest(points, suite);
}
