#pragma once

#include <optional>
#include <vector>

#include "confspec/eigensolve.hpp"
#include "confspec/operators.hpp"

namespace confspec {

struct SpectralWindow {
    double lo;
    double hi;
    double guard = 0.0;  // 0 means the default 1e-3 * width

    double effective_guard() const { return guard > 0.0 ? guard : 1e-3 * (hi - lo); }
};

struct WindowCount {
    int count;
    bool clean;  // no eigenvalue within guard of either endpoint
};

// Eigenvalue count with multiplicity in [lo, hi].
WindowCount count_in_window(const Spectrum& spectrum, const SpectralWindow& window);

struct StabilityEntry {
    double eps;
    int count;
    bool clean;
    bool certified;  // growth bound certifies no endpoint crossing at this eps
};

struct StabilityReport {
    std::vector<StabilityEntry> entries;
    bool pass;                   // count constant over the certified sub-grid
    double certified_eps;        // |eps| below this is certified clean
    std::optional<double> first_crossing_eps;  // first grid eps whose count differs
};

// Local constancy of the window count under the deformation family. The window
// must be clean at eps = 0.
StabilityReport window_stability(const ConjugatedFamily& family, const SpectralWindow& window,
                                 const std::vector<double>& eps_grid);

struct ContinuityEntry {
    double eps;
    double max_deviation;  // max_i |mu_i(eps) - mu_i(0)|
    bool pass;
};

struct ContinuityReport {
    std::vector<double> mu_at_zero;  // mu_1..mu_index_count
    std::vector<ContinuityEntry> entries;
    bool pass;
};

// mu_i(eps) are the eigenvalues in (c, +inf) counted with multiplicity; checks
// the envelope |mu_i(eps)-mu_i(0)| <= |mu_i(0)|(e^{2|eta| ||f||oo |eps|}-1)+1e-8.
// c must stay away from the spectrum at eps = 0.
ContinuityReport continuity_check(const ConjugatedFamily& family, double c, int index_count,
                                  const std::vector<double>& eps_grid);

struct MultiplicityRow {
    double value;
    int multiplicity;
    bool within_rank;  // multiplicity <= fiber rank (nonzero clusters)
};

// Observational table: flags nonzero clusters whose multiplicity exceeds the
// bundle rank.
std::vector<MultiplicityRow> multiplicity_report(const Spectrum& spectrum,
                                                 const CovariantOperator& op,
                                                 double cluster_tol = 1e-8);

}  // namespace confspec
