#include "confspec/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "confspec/perturb.hpp"

namespace confspec {

WindowCount count_in_window(const Spectrum& spectrum, const SpectralWindow& window) {
    if (!(window.lo < window.hi)) throw std::invalid_argument("count_in_window: lo must be < hi");
    const double g = window.effective_guard();
    WindowCount wc{0, true};
    for (double v : spectrum.eigenvalues) {
        if (v >= window.lo && v <= window.hi) ++wc.count;
        if (std::abs(v - window.lo) < g || std::abs(v - window.hi) < g) wc.clean = false;
    }
    return wc;
}

StabilityReport window_stability(const ConjugatedFamily& family, const SpectralWindow& window,
                                 const std::vector<double>& eps_grid) {
    const std::vector<double> w = family.op->entry_weights();
    const Spectrum base = solve_symmetric(family.op->background, w);
    const WindowCount base_count = count_in_window(base, window);
    if (!base_count.clean)
        throw std::invalid_argument("window_stability: window not clean at eps = 0");

    // Largest |eps| for which the growth bound keeps every eigenvalue away from
    // both endpoints.
    const double rate = 2.0 * std::abs(family.op->bidegree.eta()) * family.factor.sup_norm;
    double certified = std::numeric_limits<double>::infinity();
    for (double v : base.eigenvalues) {
        if (v == 0.0) continue;  // the kernel does not move
        for (double endpoint : {window.lo, window.hi}) {
            const double dist = std::abs(v - endpoint);
            certified = std::min(certified, std::log1p(dist / std::abs(v)) / rate);
        }
    }

    StabilityReport report;
    report.certified_eps = certified;
    report.pass = true;

    std::vector<double> grid = eps_grid;
    std::sort(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (double eps : grid) {
        const Spectrum spec = solve_symmetric(family_matrix(family, eps), w);
        const WindowCount wc = count_in_window(spec, window);
        StabilityEntry entry{eps, wc.count, wc.clean, std::abs(eps) < certified};
        if (entry.certified && wc.count != base_count.count) report.pass = false;
        if (wc.count != base_count.count && !report.first_crossing_eps)
            report.first_crossing_eps = eps;
        report.entries.push_back(entry);
    }
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const StabilityEntry& a, const StabilityEntry& b) { return a.eps < b.eps; });
    return report;
}

ContinuityReport continuity_check(const ConjugatedFamily& family, double c, int index_count,
                                  const std::vector<double>& eps_grid) {
    const std::vector<double> w = family.op->entry_weights();
    const Spectrum base = solve_symmetric(family.op->background, w);

    const double scale = std::max(1.0, base.spectral_scale());
    for (double v : base.eigenvalues)
        if (std::abs(v - c) <= 1e-8 * scale)
            throw std::invalid_argument("continuity_check: c is (numerically) in the spectrum");

    auto mu_of = [&](const Spectrum& s) {
        std::vector<double> mu;
        for (double v : s.eigenvalues)
            if (v > c) mu.push_back(v);
        return mu;
    };
    const std::vector<double> mu0 = mu_of(base);
    if (static_cast<int>(mu0.size()) < index_count)
        throw std::invalid_argument("continuity_check: fewer eigenvalues above c than requested");

    const double rate = 2.0 * std::abs(family.op->bidegree.eta()) * family.factor.sup_norm;

    ContinuityReport report;
    report.mu_at_zero.assign(mu0.begin(), mu0.begin() + index_count);
    report.pass = true;
    for (double eps : eps_grid) {
        const Spectrum spec = solve_symmetric(family_matrix(family, eps), w);
        const std::vector<double> mu = mu_of(spec);
        ContinuityEntry entry{eps, 0.0, true};
        const double envelope_factor = std::exp(rate * std::abs(eps)) - 1.0;
        for (int i = 0; i < index_count && i < static_cast<int>(mu.size()); ++i) {
            const double dev = std::abs(mu[i] - mu0[i]);
            entry.max_deviation = std::max(entry.max_deviation, dev);
            if (dev > std::abs(mu0[i]) * envelope_factor + 1e-8) entry.pass = false;
        }
        if (static_cast<int>(mu.size()) < index_count) entry.pass = false;
        report.pass = report.pass && entry.pass;
        report.entries.push_back(entry);
    }
    return report;
}

std::vector<MultiplicityRow> multiplicity_report(const Spectrum& spectrum,
                                                 const CovariantOperator& op,
                                                 double cluster_tol) {
    std::vector<MultiplicityRow> rows;
    const double zero_tol = 1e-9 * std::max(1.0, spectrum.spectral_scale());
    for (const Eigenspace& es : cluster(spectrum, cluster_tol)) {
        MultiplicityRow row;
        row.value = es.value;
        row.multiplicity = es.multiplicity;
        row.within_rank =
            std::abs(es.value) <= zero_tol || es.multiplicity <= op.rank;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace confspec
