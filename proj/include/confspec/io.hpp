#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "confspec/operators.hpp"
#include "confspec/perturb.hpp"
#include "confspec/splitter.hpp"
#include "confspec/windows.hpp"

namespace confspec {

// 17 significant digits: round-trip safe for double.
std::string format_double(double v);

// Write-then-rename so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

nlohmann::json factor_spec_to_json(const FactorSpec& spec);
FactorSpec factor_spec_from_json(const nlohmann::json& j);

struct OperatorDescriptor {
    std::string name;  // "conformal_laplacian" | "dirac"
    std::string kind;  // "circle" | "torus2"
    int resolution = 16;
    std::string spin = "antiperiodic";  // dirac only
    int power = 1;                      // >1 selects the synthetic power instance
    double bidegree_a = 0.0;            // used when power > 1
    double bidegree_b = 0.0;
};

nlohmann::json operator_descriptor_to_json(const OperatorDescriptor& d);
OperatorDescriptor operator_descriptor_from_json(const nlohmann::json& j);

// A built operator together with the domain it references.
struct OperatorInstance {
    std::unique_ptr<Domain> domain;
    CovariantOperator op;
};

OperatorInstance build_operator(const OperatorDescriptor& descriptor);

struct Tolerances {
    double cluster_tol = 1e-8;
    double zero_tol = 1e-9;  // relative to spectral scale
    double spread_tol = 1e-9;
    double gamma = 1e-3;
    double guard = 0.0;  // 0 = default window guard
};

struct RunConfig {
    OperatorDescriptor op;
    std::vector<FactorSpec> factors;
    std::vector<double> eps_grid = default_eps_grid();
    double window_lo = 0.5;
    double window_hi = 4.5;
    Tolerances tolerances;
    unsigned seed = 1;
    int max_steps = 10;
    std::string out_dir = ".";
};

nlohmann::json run_config_to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// CSV emitters ('.' decimal separator, 17 significant digits).
std::string spectrum_to_csv(const Spectrum& spectrum, double cluster_tol);
std::string branches_to_csv(const std::vector<Branch>& branches);
std::string window_sweep_to_csv(const StabilityReport& report);

nlohmann::json slope_report_to_json(const std::vector<double>& predicted,
                                    const std::vector<double>& measured);
nlohmann::json split_plan_to_json(const SplitPlan& plan);

// Branch diagram: one polyline per branch over the eps grid.
std::string branches_to_svg(const std::vector<Branch>& branches);

}  // namespace confspec
