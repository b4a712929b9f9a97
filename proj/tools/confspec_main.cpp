// Command-line front end: spectrum | track | split | rigidity | windows | verify.
// Exit codes: 0 success, 1 verification failure, 2 config error, 3 step exhaustion.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "confspec/io.hpp"
#include "confspec/verify.hpp"

namespace fs = std::filesystem;
using namespace confspec;

namespace {

ConformalFactor primary_factor(const RunConfig& config, const Domain& domain) {
    if (config.factors.empty())
        throw std::invalid_argument("config: at least one factor spec required");
    return make_factor(domain, config.factors.front());
}

SpectralWindow window_of(const RunConfig& config) {
    return {config.window_lo, config.window_hi, config.tolerances.guard};
}

int cmd_spectrum(const RunConfig& config, const fs::path& out) {
    const OperatorInstance inst = build_operator(config.op);
    const Spectrum spec = solve_symmetric(inst.op.background, inst.op.entry_weights());
    atomic_write(out / "spectrum.csv", spectrum_to_csv(spec, config.tolerances.cluster_tol));

    nlohmann::json clusters = nlohmann::json::array();
    for (const Eigenspace& es : cluster(spec, config.tolerances.cluster_tol))
        clusters.push_back({{"value", es.value}, {"multiplicity", es.multiplicity}});
    atomic_write(out / "clusters.json",
                 nlohmann::json{{"schema", 1}, {"clusters", clusters}}.dump(2) + "\n");
    return 0;
}

int cmd_track(const RunConfig& config, const fs::path& out, bool emit_plots) {
    const OperatorInstance inst = build_operator(config.op);
    const ConformalFactor f = primary_factor(config, *inst.domain);
    ConjugatedFamily family(inst.op, f);

    TrackOptions topt;
    topt.cluster_tol = config.tolerances.cluster_tol;
    const std::vector<Branch> branches =
        track_branches(family, config.eps_grid, config.window_lo, config.window_hi, topt);
    atomic_write(out / "branches.csv", branches_to_csv(branches));
    if (emit_plots) atomic_write(out / "branches.svg", branches_to_svg(branches));

    // Predicted vs central-difference slopes, and the growth-bound report.
    const Spectrum base = solve_symmetric(inst.op.background, inst.op.entry_weights());
    const double fd_step = 1e-3;
    std::vector<double> predicted, measured;
    nlohmann::json growth = nlohmann::json::array();
    for (const Branch& b : branches) {
        const std::vector<Eigenspace> spaces = cluster(base, config.tolerances.cluster_tol);
        const Eigenspace& es = spaces[static_cast<std::size_t>(b.origin_cluster)];
        if (std::abs(es.value) > 1e-9) {
            const GrowthReport g = growth_bound_check(b, inst.op, f);
            growth.push_back({{"origin", b.origin_value}, {"pass", g.all_pass}});
        }
        bool has_pair = false;
        double vp = 0, vm = 0;
        for (std::size_t i = 0; i < b.eps_grid.size(); ++i) {
            if (b.eps_grid[i] == fd_step) {
                vp = b.values[i];
                has_pair = true;
            }
            if (b.eps_grid[i] == -fd_step) vm = b.values[i];
        }
        if (has_pair) measured.push_back((vp - vm) / (2.0 * fd_step));
    }
    const std::vector<Eigenspace> spaces = cluster(base, config.tolerances.cluster_tol);
    for (const Eigenspace& es : spaces) {
        if (es.value < config.window_lo || es.value > config.window_hi) continue;
        if (std::abs(es.value) <= 1e-9) continue;
        const FirstOrderMatrix fom = first_order_matrix(es, f, inst.op);
        predicted.insert(predicted.end(), fom.predicted_slopes.begin(),
                         fom.predicted_slopes.end());
    }
    std::sort(predicted.begin(), predicted.end());
    std::sort(measured.begin(), measured.end());
    nlohmann::json slopes = slope_report_to_json(predicted, measured);
    slopes["growth_bound"] = growth;
    atomic_write(out / "slopes.json", slopes.dump(2) + "\n");
    return 0;
}

int cmd_split(const RunConfig& config, const fs::path& out, int max_steps_override) {
    const OperatorInstance inst = build_operator(config.op);
    LoopOptions lopt;
    lopt.max_steps = max_steps_override > 0 ? max_steps_override : config.max_steps;
    lopt.cluster_tol = config.tolerances.cluster_tol;
    lopt.spread_tol_rel = config.tolerances.spread_tol;
    const double alpha = std::max(std::abs(config.window_lo), std::abs(config.window_hi));
    const SplitPlan plan = genericity_loop(inst.op, alpha, config.tolerances.gamma, lopt);

    atomic_write(out / "split_plan.json", split_plan_to_json(plan).dump(2) + "\n");
    std::ostringstream csv;
    csv << "index,eigenvalue\n";
    for (std::size_t i = 0; i < plan.final_spectrum.size(); ++i)
        csv << i << "," << format_double(plan.final_spectrum[i]) << "\n";
    atomic_write(out / "final_spectrum.csv", csv.str());

    std::ostringstream log;
    for (const SplitStep& s : plan.steps)
        log << "split value " << format_double(s.target_value) << " multiplicity "
            << s.target_multiplicity << " with eps " << format_double(s.epsilon)
            << "; degeneracy now " << s.degeneracy_after << "\n";
    if (!plan.diagnostics.empty()) log << plan.diagnostics << "\n";
    atomic_write(out / "split_log.txt", log.str());

    if (!plan.complete && plan.irreducible.empty()) return 3;  // steps exhausted
    return 0;
}

int cmd_rigidity(const RunConfig& config, const fs::path& out) {
    const OperatorInstance inst = build_operator(config.op);
    const Spectrum spec = solve_symmetric(inst.op.background, inst.op.entry_weights());
    nlohmann::json rows = nlohmann::json::array();
    for (const Eigenspace& es : cluster(spec, config.tolerances.cluster_tol)) {
        if (es.multiplicity < 2) continue;
        const RigidityReport r = rigidity_score(es, inst.op);
        rows.push_back({{"value", es.value},
                        {"multiplicity", es.multiplicity},
                        {"score", r.score},
                        {"threshold", r.threshold},
                        {"verdict", r.rigid ? "rigid" : "splittable"}});
    }
    atomic_write(out / "rigidity.json",
                 nlohmann::json{{"schema", 1}, {"eigenspaces", rows}}.dump(2) + "\n");
    return 0;
}

int cmd_windows(const RunConfig& config, const fs::path& out) {
    const OperatorInstance inst = build_operator(config.op);
    const ConformalFactor f = primary_factor(config, *inst.domain);
    ConjugatedFamily family(inst.op, f);
    const StabilityReport r = window_stability(family, window_of(config), config.eps_grid);
    atomic_write(out / "window_sweep.csv", window_sweep_to_csv(r));
    nlohmann::json j{{"schema", 1},
                     {"pass", r.pass},
                     {"certified_eps", r.certified_eps}};
    if (r.first_crossing_eps) j["first_crossing_eps"] = *r.first_crossing_eps;
    atomic_write(out / "window_report.json", j.dump(2) + "\n");
    return r.pass ? 0 : 1;
}

int cmd_verify(const RunConfig& config, const fs::path& out) {
    VerifyOptions vopt;
    vopt.cluster_tol = config.tolerances.cluster_tol;
    const std::vector<CriterionResult> results = run_acceptance_battery(vopt);
    bool all = true;
    std::ostringstream table;
    for (const CriterionResult& r : results) {
        table << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ")\n";
        all = all && r.pass;
    }
    std::cout << table.str();
    atomic_write(out / "verify.txt", table.str());
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for conformal deformations of covariant operators"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool emit_plots = false;
    int max_steps = 0;
    unsigned seed = 0;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (default: from config)");
    app.add_flag("--emit-plots", emit_plots, "also write SVG branch diagrams");
    app.add_option("--max-steps", max_steps, "override the splitting step budget");
    app.add_option("--seed", seed, "override the config seed");

    auto* sub_spectrum = app.add_subcommand("spectrum", "background spectrum + clusters");
    auto* sub_track = app.add_subcommand("track", "branch tracking, slopes, growth bounds");
    auto* sub_split = app.add_subcommand("split", "finite-step degeneracy breaking");
    auto* sub_rigidity = app.add_subcommand("rigidity", "rigidity scores per eigenspace");
    auto* sub_windows = app.add_subcommand("windows", "window count stability sweep");
    auto* sub_verify = app.add_subcommand("verify", "run the full acceptance battery");
    for (CLI::App* sub : {sub_spectrum, sub_track, sub_split, sub_rigidity, sub_windows,
                          sub_verify})
        sub->fallthrough();  // global flags may follow the subcommand name

    CLI11_PARSE(app, argc, argv);

    if (const char* threads = std::getenv("CONFSPEC_THREADS")) {
#ifdef _OPENMP
        const int t = std::atoi(threads);
        if (t > 0) omp_set_num_threads(t);
#else
        (void)threads;
#endif
    }

    RunConfig config;
    try {
        config = load_run_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (seed != 0) config.seed = seed;
    const fs::path out = out_dir.empty() ? fs::path(config.out_dir) : fs::path(out_dir);

    try {
        if (sub_spectrum->parsed()) return cmd_spectrum(config, out);
        if (sub_track->parsed()) return cmd_track(config, out, emit_plots);
        if (sub_split->parsed()) return cmd_split(config, out, max_steps);
        if (sub_rigidity->parsed()) return cmd_rigidity(config, out);
        if (sub_windows->parsed()) return cmd_windows(config, out);
        if (sub_verify->parsed()) return cmd_verify(config, out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
