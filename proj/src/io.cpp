#include "confspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace confspec {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

json factor_spec_to_json(const FactorSpec& spec) {
    json terms = json::array();
    for (const TrigTerm& t : spec.terms)
        terms.push_back({{"kx", t.kx},
                         {"ky", t.ky},
                         {"phase", t.is_sin ? "sin" : "cos"},
                         {"coef", t.coef}});
    return {{"terms", terms}};
}

FactorSpec factor_spec_from_json(const json& j) {
    FactorSpec spec;
    for (const json& t : j.at("terms")) {
        TrigTerm term;
        term.kx = t.at("kx").get<int>();
        term.ky = t.at("ky").get<int>();
        const std::string phase = t.at("phase").get<std::string>();
        if (phase != "cos" && phase != "sin")
            throw std::invalid_argument("factor spec: phase must be cos or sin");
        term.is_sin = phase == "sin";
        term.coef = t.at("coef").get<double>();
        spec.terms.push_back(term);
    }
    return spec;
}

json operator_descriptor_to_json(const OperatorDescriptor& d) {
    json j{{"name", d.name}, {"kind", d.kind}, {"resolution", d.resolution}};
    if (d.name == "dirac") j["spin"] = d.spin;
    if (d.power > 1) {
        j["power"] = d.power;
        j["bidegree"] = {{"a", d.bidegree_a}, {"b", d.bidegree_b}};
    }
    return j;
}

OperatorDescriptor operator_descriptor_from_json(const json& j) {
    OperatorDescriptor d;
    d.name = j.at("name").get<std::string>();
    d.kind = j.at("kind").get<std::string>();
    d.resolution = j.at("resolution").get<int>();
    if (j.contains("spin")) d.spin = j.at("spin").get<std::string>();
    if (j.contains("power")) d.power = j.at("power").get<int>();
    if (j.contains("bidegree")) {
        d.bidegree_a = j.at("bidegree").at("a").get<double>();
        d.bidegree_b = j.at("bidegree").at("b").get<double>();
    }
    return d;
}

OperatorInstance build_operator(const OperatorDescriptor& descriptor) {
    OperatorInstance inst;
    inst.domain = std::make_unique<Domain>(
        make_domain(parse_domain_kind(descriptor.kind), descriptor.resolution));

    if (descriptor.name == "conformal_laplacian") {
        inst.op = conformal_laplacian_torus(*inst.domain);
    } else if (descriptor.name == "dirac") {
        SpinStructure spin;
        if (descriptor.spin == "periodic")
            spin = SpinStructure::periodic;
        else if (descriptor.spin == "antiperiodic")
            spin = SpinStructure::antiperiodic;
        else
            throw std::invalid_argument("unknown spin structure: " + descriptor.spin);
        inst.op = dirac_circle(*inst.domain, spin);
    } else {
        throw std::invalid_argument("unknown operator name: " + descriptor.name);
    }

    if (descriptor.power > 1)
        inst.op = synthetic_power(inst.op, descriptor.power,
                                  {descriptor.bidegree_a, descriptor.bidegree_b});
    return inst;
}

json run_config_to_json(const RunConfig& c) {
    json factors = json::array();
    for (const FactorSpec& f : c.factors) factors.push_back(factor_spec_to_json(f));
    return {{"schema", 1},
            {"operator", operator_descriptor_to_json(c.op)},
            {"factors", factors},
            {"eps_grid", c.eps_grid},
            {"window", {{"lo", c.window_lo}, {"hi", c.window_hi}}},
            {"tolerances",
             {{"cluster_tol", c.tolerances.cluster_tol},
              {"zero_tol", c.tolerances.zero_tol},
              {"spread_tol", c.tolerances.spread_tol},
              {"gamma", c.tolerances.gamma},
              {"guard", c.tolerances.guard}}},
            {"seed", c.seed},
            {"max_steps", c.max_steps},
            {"out_dir", c.out_dir}};
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    c.op = operator_descriptor_from_json(j.at("operator"));
    if (j.contains("factors"))
        for (const json& f : j.at("factors")) c.factors.push_back(factor_spec_from_json(f));
    if (j.contains("eps_grid")) c.eps_grid = j.at("eps_grid").get<std::vector<double>>();
    if (j.contains("window")) {
        c.window_lo = j.at("window").at("lo").get<double>();
        c.window_hi = j.at("window").at("hi").get<double>();
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (t.contains("cluster_tol")) c.tolerances.cluster_tol = t.at("cluster_tol").get<double>();
        if (t.contains("zero_tol")) c.tolerances.zero_tol = t.at("zero_tol").get<double>();
        if (t.contains("spread_tol")) c.tolerances.spread_tol = t.at("spread_tol").get<double>();
        if (t.contains("gamma")) c.tolerances.gamma = t.at("gamma").get<double>();
        if (t.contains("guard")) c.tolerances.guard = t.at("guard").get<double>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
    if (j.contains("max_steps")) c.max_steps = j.at("max_steps").get<int>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();

    for (double tol : {c.tolerances.cluster_tol, c.tolerances.zero_tol, c.tolerances.spread_tol,
                       c.tolerances.gamma})
        if (!(tol > 0.0)) throw std::invalid_argument("config: tolerances must be positive");
    bool has_zero = false;
    for (double e : c.eps_grid) has_zero = has_zero || e == 0.0;
    if (!has_zero) throw std::invalid_argument("config: eps grid must contain 0");
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path.string());
    json j;
    in >> j;
    return run_config_from_json(j);
}

std::string spectrum_to_csv(const Spectrum& spectrum, double cluster_tol) {
    std::ostringstream out;
    out << "index,eigenvalue,multiplicity_cluster_id\n";
    const std::vector<Eigenspace> clusters = cluster(spectrum, cluster_tol);
    std::vector<int> cluster_id(spectrum.size());
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (int k = 0; k < clusters[c].multiplicity; ++k)
            cluster_id[clusters[c].first_index + k] = static_cast<int>(c);
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        out << i << "," << format_double(spectrum.eigenvalues[i]) << "," << cluster_id[i] << "\n";
    return out.str();
}

std::string branches_to_csv(const std::vector<Branch>& branches) {
    std::ostringstream out;
    out << "eps,branch_id,value,overlap_quality\n";
    for (std::size_t b = 0; b < branches.size(); ++b)
        for (std::size_t i = 0; i < branches[b].eps_grid.size(); ++i)
            out << format_double(branches[b].eps_grid[i]) << "," << b << ","
                << format_double(branches[b].values[i]) << ","
                << format_double(branches[b].overlap_quality[i]) << "\n";
    return out.str();
}

std::string window_sweep_to_csv(const StabilityReport& report) {
    std::ostringstream out;
    out << "eps,count,clean\n";
    for (const StabilityEntry& e : report.entries)
        out << format_double(e.eps) << "," << e.count << "," << (e.clean ? 1 : 0) << "\n";
    return out.str();
}

json slope_report_to_json(const std::vector<double>& predicted,
                          const std::vector<double>& measured) {
    return {{"schema", 1}, {"predicted", predicted}, {"measured", measured}};
}

json split_plan_to_json(const SplitPlan& plan) {
    json steps = json::array();
    for (const SplitStep& s : plan.steps)
        steps.push_back({{"factor", factor_spec_to_json(s.factor_spec)},
                         {"epsilon", s.epsilon},
                         {"target_value", s.target_value},
                         {"target_multiplicity", s.target_multiplicity},
                         {"degeneracy_after", s.degeneracy_after}});
    json verdicts = json::array();
    for (const RigidityReport& r : plan.irreducible)
        verdicts.push_back({{"value", r.value},
                            {"multiplicity", r.multiplicity},
                            {"score", r.score},
                            {"verdict", r.rigid ? "rigid" : "unsplittable"}});
    return {{"schema", 1},
            {"alpha", plan.alpha},
            {"gamma", plan.gamma},
            {"steps", steps},
            {"complete", plan.complete},
            {"verdicts", verdicts},
            {"kernel_dim_initial", plan.kernel_dim_initial},
            {"kernel_dim_final", plan.kernel_dim_final},
            {"final_spectrum", plan.final_spectrum},
            {"diagnostics", plan.diagnostics}};
}

std::string branches_to_svg(const std::vector<Branch>& branches) {
    const double width = 640.0, height = 480.0, margin = 40.0;
    double eps_min = 0.0, eps_max = 0.0, v_min = 0.0, v_max = 1.0;
    bool first = true;
    for (const Branch& b : branches)
        for (std::size_t i = 0; i < b.eps_grid.size(); ++i) {
            if (first) {
                eps_min = eps_max = b.eps_grid[i];
                v_min = v_max = b.values[i];
                first = false;
            }
            eps_min = std::min(eps_min, b.eps_grid[i]);
            eps_max = std::max(eps_max, b.eps_grid[i]);
            v_min = std::min(v_min, b.values[i]);
            v_max = std::max(v_max, b.values[i]);
        }
    if (eps_max == eps_min) eps_max = eps_min + 1.0;
    if (v_max == v_min) v_max = v_min + 1.0;
    auto sx = [&](double e) { return margin + (e - eps_min) / (eps_max - eps_min) * (width - 2 * margin); };
    auto sy = [&](double v) { return height - margin - (v - v_min) / (v_max - v_min) * (height - 2 * margin); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    for (std::size_t b = 0; b < branches.size(); ++b) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[b % 8] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < branches[b].eps_grid.size(); ++i)
            out << sx(branches[b].eps_grid[i]) << "," << sy(branches[b].values[i]) << " ";
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace confspec
