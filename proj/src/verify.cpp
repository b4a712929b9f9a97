#include "confspec/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "confspec/perturb.hpp"
#include "confspec/splitter.hpp"
#include "confspec/windows.hpp"

namespace confspec {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// --- independent oracles -----------------------------------------------------

// Eigenvalues of a small symmetric matrix by inertia bisection: the number of
// negative pivots of the LDL^T factorization of A - x I counts eigenvalues
// below x. Independent of the tridiagonalization path under test.
int count_eigenvalues_below(const Matrix& a, double x) {
    const std::size_t n = a.rows();
    Matrix m = a;
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= x;
    int negatives = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double pivot = m(k, k);
        if (pivot == 0.0) pivot = 1e-300;
        if (pivot < 0.0) ++negatives;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / pivot;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return negatives;
}

std::vector<double> inertia_bisection_eigenvalues(const Matrix& a) {
    const std::size_t n = a.rows();
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) r += std::abs(a(i, j));
        lo = std::min(lo, a(i, i) - r);
        hi = std::max(hi, a(i, i) + r);
    }
    lo -= 1.0;
    hi += 1.0;

    std::vector<double> evs(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a0 = lo, b0 = hi;
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (a0 + b0);
            if (count_eigenvalues_below(a, mid) <= static_cast<int>(k))
                a0 = mid;
            else
                b0 = mid;
        }
        evs[k] = 0.5 * (a0 + b0);
    }
    return evs;
}

// Composite Simpson quadrature of e^{eps*cos(theta)/2} over one period,
// independent of the grid machinery.
double simpson_circle_length(double eps) {
    const int n = 1 << 14;
    const double h = two_pi / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        s += w * std::exp(eps * std::cos(i * h) / 2.0);
    }
    return s * h / 3.0;
}

// --- shared fixtures ---------------------------------------------------------

struct Fixtures {
    Domain torus16 = make_domain(DomainKind::torus2, 16);
    Domain circle64 = make_domain(DomainKind::circle, 64);
    CovariantOperator lap16 = conformal_laplacian_torus(torus16);
    CovariantOperator dirac64 = dirac_circle(circle64, SpinStructure::antiperiodic);

    ConformalFactor cos2x_16() const {
        FactorSpec s;
        s.terms.push_back({2, 0, false, 1.0});
        return make_factor(torus16, s);
    }
    ConformalFactor cos_theta_64() const {
        FactorSpec s;
        s.terms.push_back({1, 0, false, 1.0});
        return make_factor(circle64, s);
    }
};

// --- criteria ----------------------------------------------------------------

CriterionResult c1_background_spectra(const Fixtures& fx) {
    const auto t0 = std::chrono::steady_clock::now();

    const Spectrum st = solve_symmetric(fx.lap16.background, fx.lap16.entry_weights());
    std::vector<double> expected;
    for (int j = -7; j <= 8; ++j)
        for (int k = -7; k <= 8; ++k) expected.push_back(double(j) * j + double(k) * k);
    std::sort(expected.begin(), expected.end());
    double err_t = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i)
        err_t = std::max(err_t, std::abs(st.eigenvalues[i] - expected[i]));

    const Spectrum sd = solve_symmetric(fx.dirac64.background, fx.dirac64.entry_weights());
    std::vector<double> expected_d;
    for (int k = -32; k <= 31; ++k) {
        expected_d.push_back(k + 0.5);
        expected_d.push_back(k + 0.5);
    }
    std::sort(expected_d.begin(), expected_d.end());
    double err_d = 0.0;
    for (std::size_t i = 0; i < expected_d.size(); ++i)
        err_d = std::max(err_d, std::abs(sd.eigenvalues[i] - expected_d[i]));

    const double elapsed = seconds_since(t0);
    const bool pass = err_t <= 1e-10 && err_d <= 1e-10 && elapsed < 5.0;
    return {"1 exact background spectra", pass,
            "torus err " + fmt(err_t) + ", dirac err " + fmt(err_d) + ", " + fmt(elapsed) + " s"};
}

CriterionResult c2_isospectrality(const Fixtures& fx) {
    const ConformalFactor f = fx.cos2x_16();
    ConjugatedFamily fam(fx.lap16, f);
    const std::vector<double> w = fx.lap16.entry_weights();
    const Spectrum sa = solve_symmetric(family_matrix(fam, 0.1), w);

    std::vector<double> mass(fx.torus16.node_count());
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] = std::exp(0.1 * f.values[i]);
    const Spectrum sg = solve_generalized(fx.lap16.background, mass, w);

    double err = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i)
        err = std::max(err, std::abs(sa.eigenvalues[i] - sg.eigenvalues[i]));
    return {"2 conjugation family isospectrality", err <= 1e-10, "entrywise err " + fmt(err)};
}

CriterionResult c3_dirac_oracle(const VerifyOptions& options) {
    const Domain circle256 = make_domain(DomainKind::circle, 256);
    const CovariantOperator dirac = dirac_circle(circle256, SpinStructure::antiperiodic);
    FactorSpec s;
    s.terms.push_back({1, 0, false, 1.0});
    const ConformalFactor f = make_factor(circle256, s);
    ConjugatedFamily fam(dirac, f);
    const Spectrum spec = solve_symmetric(family_matrix(fam, 0.4), dirac.entry_weights());

    const double L = simpson_circle_length(0.4);
    const double scale = two_pi / L;

    // The 40 oracle values nearest zero, each with real multiplicity 2.
    const std::size_t mid = spec.size() / 2;
    double rel_err = 0.0;
    for (int k = -20; k <= 19; ++k) {
        const double want = scale * (k + 0.5);
        const std::size_t base = mid + 2 * static_cast<std::size_t>(k + 20) - 40;
        for (int copy = 0; copy < 2; ++copy) {
            const double got = spec.eigenvalues[base + copy];
            rel_err = std::max(rel_err, std::abs(got - want) / std::abs(want));
        }
    }

    bool mult_ok = true;
    for (const Eigenspace& es : cluster(spec, options.cluster_tol))
        if (std::abs(es.value) < scale * 20 && es.multiplicity != 2) mult_ok = false;

    return {"3 dirac arc-length oracle", rel_err <= 1e-8 && mult_ok,
            "rel err " + fmt(rel_err) + (mult_ok ? ", multiplicities 2" : ", multiplicity broken")};
}

CriterionResult c4_first_order_slopes(const Fixtures& fx, const VerifyOptions& options) {
    const ConformalFactor f = fx.cos2x_16();
    const std::vector<double> w = fx.lap16.entry_weights();
    const Spectrum spec = solve_symmetric(fx.lap16.background, w);
    const std::vector<Eigenspace> clusters = cluster(spec, options.cluster_tol);
    const Eigenspace* es = nullptr;
    for (const Eigenspace& e : clusters)
        if (std::abs(e.value - 1.0) < 1e-6) es = &e;
    if (!es || es->multiplicity != 4)
        return {"4 first-order slopes", false, "lambda=1 cluster not found with multiplicity 4"};

    const FirstOrderMatrix fom = first_order_matrix(*es, f, fx.lap16);

    // Independent oracle: analytic eigenbasis {cos x, sin x, cos y, sin y},
    // normalized by quadrature, entries by direct quadrature of 2*eta*lambda*f*u_i*u_j.
    const std::size_t nn = fx.torus16.node_count();
    std::vector<std::vector<double>> basis(4, std::vector<double>(nn));
    for (std::size_t i = 0; i < nn; ++i) {
        const double x = fx.torus16.nodes[i][0], y = fx.torus16.nodes[i][1];
        basis[0][i] = std::cos(x);
        basis[1][i] = std::sin(x);
        basis[2][i] = std::cos(y);
        basis[3][i] = std::sin(y);
    }
    for (auto& u : basis) {
        double nrm2 = 0.0;
        for (std::size_t i = 0; i < nn; ++i) nrm2 += fx.torus16.quad_weights[i] * u[i] * u[i];
        const double nrm = std::sqrt(nrm2);
        for (double& v : u) v /= nrm;
    }
    const double coef = 2.0 * fx.lap16.bidegree.eta() * 1.0;
    std::vector<double> oracle_slopes;
    double max_offdiag = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            double s = 0.0;
            for (std::size_t x = 0; x < nn; ++x)
                s += fx.torus16.quad_weights[x] * f.values[x] * basis[i][x] * basis[j][x];
            if (i == j)
                oracle_slopes.push_back(coef * s);
            else
                max_offdiag = std::max(max_offdiag, std::abs(coef * s));
        }
    std::sort(oracle_slopes.begin(), oracle_slopes.end());

    double err_pred = std::max(max_offdiag, 0.0);
    for (int i = 0; i < 4; ++i)
        err_pred = std::max(err_pred, std::abs(fom.predicted_slopes[i] - oracle_slopes[i]));

    // Central-difference branch slopes at two steps.
    auto measured_slopes = [&](double h) {
        ConjugatedFamily fam(fx.lap16, f);
        const std::vector<Branch> branches =
            track_branches(fam, {-h, 0.0, h}, 0.5, 1.5);
        std::vector<double> slopes;
        for (const Branch& b : branches)
            slopes.push_back((b.value_at(h) - b.value_at(-h)) / (2.0 * h));
        std::sort(slopes.begin(), slopes.end());
        return slopes;
    };
    auto slope_error = [&](const std::vector<double>& measured) {
        double e = 0.0;
        for (std::size_t i = 0; i < measured.size(); ++i)
            e = std::max(e, std::abs(measured[i] - fom.predicted_slopes[i]));
        return e;
    };
    const double err_h = slope_error(measured_slopes(1e-3));
    const double err_h2 = slope_error(measured_slopes(5e-4));

    const bool pass = err_pred <= 1e-10 && err_h <= 1e-4 && err_h2 <= 0.6 * err_h + 1e-9;
    return {"4 first-order slopes", pass,
            "oracle err " + fmt(err_pred) + ", fd err " + fmt(err_h) + " -> " + fmt(err_h2)};
}

CriterionResult c5_growth_bound(const Fixtures& fx) {
    bool pass = true;
    std::string detail;

    auto run = [&](const CovariantOperator& op, const ConformalFactor& f, double lo, double hi,
                   const char* tag) {
        ConjugatedFamily fam(op, f);
        const std::vector<Branch> branches = track_branches(fam, default_eps_grid(), lo, hi);
        for (const Branch& b : branches) {
            const GrowthReport r = growth_bound_check(b, op, f);
            if (!r.all_pass) {
                pass = false;
                detail += std::string(tag) + " branch failed; ";
            }
        }
    };

    run(fx.lap16, fx.cos2x_16(), 0.5, 5.5, "laplacian");
    run(fx.dirac64, fx.cos_theta_64(), 0.4, 2.6, "dirac");

    const CovariantOperator power = synthetic_power(fx.lap16, 2, {0.0, 4.0});
    run(power, fx.cos2x_16(), 0.5, 26.0, "synthetic");

    return {"5 growth bound on all tracked branches", pass, pass ? "all branches within envelope" : detail};
}

CriterionResult c6_kernel_invariance(const Fixtures& fx) {
    bool pass = true;
    {
        ConjugatedFamily fam(fx.lap16, fx.cos2x_16());
        const std::vector<double> w = fx.lap16.entry_weights();
        for (double eps : default_eps_grid())
            if (kernel_dimension(solve_symmetric(family_matrix(fam, eps), w)) != 1) pass = false;
    }
    {
        const CovariantOperator dirac_p = dirac_circle(fx.circle64, SpinStructure::periodic);
        ConjugatedFamily fam(dirac_p, fx.cos_theta_64());
        const std::vector<double> w = dirac_p.entry_weights();
        for (double eps : default_eps_grid())
            if (kernel_dimension(solve_symmetric(family_matrix(fam, eps), w)) != 2) pass = false;
    }
    return {"6 kernel dimension invariance", pass,
            pass ? "torus kernel 1, periodic dirac kernel 2 at every eps" : "kernel dimension moved"};
}

CriterionResult c7_rigidity_dichotomy(const Fixtures& fx, const VerifyOptions& options) {
    bool pass = true;
    std::string detail;

    const Spectrum sd = solve_symmetric(fx.dirac64.background, fx.dirac64.entry_weights());
    const std::vector<FactorSpec> circle_candidates = default_candidate_modes(fx.circle64);
    for (const Eigenspace& es : cluster(sd, options.cluster_tol)) {
        if (std::abs(es.value) > 2.5) continue;
        const RigidityReport r = rigidity_score(es, fx.dirac64);
        if (r.score > 1e-10) {
            pass = false;
            detail += "dirac score " + fmt(r.score) + " at " + fmt(es.value) + "; ";
        }
        for (const FactorSpec& spec : circle_candidates) {
            const ConformalFactor f = make_factor(fx.circle64, spec);
            const FirstOrderMatrix fom = first_order_matrix(es, f, fx.dirac64);
            const double tr = fom.trace() / es.multiplicity;
            double dev = 0.0;
            for (std::size_t i = 0; i < fom.entries.rows(); ++i)
                for (std::size_t j = 0; j < fom.entries.cols(); ++j)
                    dev = std::max(dev, std::abs(fom.entries(i, j) - (i == j ? tr : 0.0)));
            if (dev > 1e-10) {
                pass = false;
                detail += "dirac first-order not scalar (" + fmt(dev) + "); ";
            }
        }
    }

    const Spectrum st = solve_symmetric(fx.lap16.background, fx.lap16.entry_weights());
    for (const Eigenspace& es : cluster(st, options.cluster_tol)) {
        if (std::abs(es.value - 1.0) > 1e-6) continue;
        const RigidityReport r = rigidity_score(es, fx.lap16);
        if (r.score < 0.01) {
            pass = false;
            detail += "torus score too small (" + fmt(r.score) + "); ";
        }
        const SplitSearchResult s =
            find_splitting_factor(es, fx.lap16, default_candidate_modes(fx.torus16));
        if (!s.found || s.spread < 0.99) {
            pass = false;
            detail += "torus spread " + fmt(s.spread) + "; ";
        }
    }
    return {"7 rigidity dichotomy", pass, pass ? "dirac rigid, torus splittable" : detail};
}

CriterionResult c8_genericity_loop() {
    const auto t0 = std::chrono::steady_clock::now();
    const Domain torus24 = make_domain(DomainKind::torus2, 24);
    const CovariantOperator lap = conformal_laplacian_torus(torus24);

    LoopOptions options;
    options.max_steps = 10;
    const SplitPlan plan = genericity_loop(lap, 4.5, 1e-3, options);
    const double elapsed = seconds_since(t0);

    // Final spectrum: 12 simple nonzero window eigenvalues with relative gaps
    // >= gamma, kernel untouched.
    std::vector<double> window_vals;
    const double scale = std::max(1.0, std::abs(plan.final_spectrum.back()));
    for (double v : plan.final_spectrum)
        if (std::abs(v) <= 4.5 && std::abs(v) > 1e-9 * scale) window_vals.push_back(v);
    bool gaps_ok = window_vals.size() == 12;
    for (std::size_t i = 0; i + 1 < window_vals.size(); ++i)
        if (window_vals[i + 1] - window_vals[i] <
            1e-3 * std::max(1.0, std::abs(window_vals[i])))
            gaps_ok = false;

    const bool pass = plan.complete && plan.steps.size() <= 10 && gaps_ok &&
                      plan.kernel_dim_initial == 1 && plan.kernel_dim_final == 1 &&
                      elapsed < 60.0;
    return {"8 genericity loop torus(24)", pass,
            std::to_string(plan.steps.size()) + " steps, " +
                std::to_string(window_vals.size()) + " simple window eigenvalues, " +
                fmt(elapsed) + " s" + (plan.diagnostics.empty() ? "" : "; " + plan.diagnostics)};
}

CriterionResult c9_window_stability(const Fixtures& fx) {
    bool pass = true;
    std::string detail;

    const SpectralWindow window{0.5, 4.5, 0.1};
    {
        ConjugatedFamily fam(fx.lap16, fx.cos2x_16());
        const StabilityReport r = window_stability(
            fam, window, {-0.05, -0.025, -0.01, 0.0, 0.01, 0.025, 0.05});
        for (const StabilityEntry& e : r.entries)
            if (e.count != 12) {
                pass = false;
                detail += "count " + std::to_string(e.count) + " at eps " + fmt(e.eps) + "; ";
            }
    }
    {
        ConjugatedFamily fam(fx.lap16, constant_factor(fx.torus16, 1.0));
        std::vector<double> grid;
        for (int i = 0; i <= 20; ++i) grid.push_back(0.01 * i);
        const StabilityReport r = window_stability(fam, window, grid);
        const double predicted = std::log(5.0 / 4.5);
        if (!r.first_crossing_eps || std::abs(*r.first_crossing_eps - predicted) > 0.01) {
            pass = false;
            detail += "crossing not detected near " + fmt(predicted) + "; ";
        }
        if (!r.pass) {
            pass = false;
            detail += "count moved inside certified range; ";
        }
    }
    return {"9 window count stability", pass, pass ? "count 12 stable; crossing at log(5/4.5) detected" : detail};
}

CriterionResult c10_continuity_envelope(const Fixtures& fx) {
    ConjugatedFamily fam(fx.lap16, fx.cos2x_16());
    const ContinuityReport r = continuity_check(fam, 0.5, 12, default_eps_grid());
    double worst = 0.0;
    for (const ContinuityEntry& e : r.entries) worst = std::max(worst, e.max_deviation);
    return {"10 continuity envelope", r.pass, "max deviation " + fmt(worst)};
}

CriterionResult c11_eigensolver_oracle() {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double max_err = 0.0, max_res = 0.0;

    for (int trial = 0; trial < 50; ++trial) {
        Matrix a(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j) a(i, j) = a(j, i) = dist(rng);

        const Spectrum spec = solve_symmetric(a, std::vector<double>(6, 1.0));
        const std::vector<double> oracle = inertia_bisection_eigenvalues(a);
        for (int i = 0; i < 6; ++i)
            max_err = std::max(max_err, std::abs(spec.eigenvalues[i] - oracle[i]));

        // Reconstruction sum lambda_i v_i v_i^T.
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                double s = 0.0;
                for (int k = 0; k < 6; ++k)
                    s += spec.eigenvalues[k] * spec.eigenvectors(i, k) * spec.eigenvectors(j, k);
                max_res = std::max(max_res, std::abs(s - a(i, j)));
            }
    }
    const bool pass = max_err <= 1e-9 && max_res <= 1e-8;
    return {"11 eigensolver vs inertia-bisection oracle", pass,
            "eigenvalue err " + fmt(max_err) + ", reconstruction " + fmt(max_res)};
}

}  // namespace

std::vector<CriterionResult> run_acceptance_battery(const VerifyOptions& options) {
    Fixtures fx;
    std::vector<CriterionResult> results;
    results.push_back(c1_background_spectra(fx));
    results.push_back(c2_isospectrality(fx));
    results.push_back(c3_dirac_oracle(options));
    results.push_back(c4_first_order_slopes(fx, options));
    results.push_back(c5_growth_bound(fx));
    results.push_back(c6_kernel_invariance(fx));
    results.push_back(c7_rigidity_dichotomy(fx, options));
    results.push_back(c8_genericity_loop());
    results.push_back(c9_window_stability(fx));
    results.push_back(c10_continuity_envelope(fx));
    results.push_back(c11_eigensolver_oracle());
    return results;
}

}  // namespace confspec
