#include "confspec/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace confspec {

RigidityReport rigidity_score(const Eigenspace& eigenspace, const CovariantOperator& op) {
    RigidityReport report;
    report.value = eigenspace.value;
    report.multiplicity = eigenspace.multiplicity;

    if (eigenspace.multiplicity < 2) {
        report.score = std::numeric_limits<double>::infinity();
        report.rigid = false;
        return report;
    }

    const std::size_t nn = op.domain->node_count();
    const int l = eigenspace.multiplicity;
    double score = 0.0;
    double trace_sum = 0.0;
    const std::size_t sample_stride = std::max<std::size_t>(1, nn / 8);

    for (std::size_t x = 0; x < nn; ++x) {
        Matrix g(l, l);
        for (int i = 0; i < l; ++i)
            for (int j = i; j < l; ++j) {
                double s = 0.0;
                for (int c = 0; c < op.rank; ++c) {
                    const std::size_t r = static_cast<std::size_t>(c) * nn + x;
                    s += eigenspace.basis(r, i) * eigenspace.basis(r, j);
                }
                g(i, j) = g(j, i) = s;
            }
        double tr = 0.0;
        for (int i = 0; i < l; ++i) tr += g(i, i);
        trace_sum += tr;

        double dev = 0.0;
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j) {
                const double e = g(i, j) - (i == j ? tr / l : 0.0);
                dev += e * e;
            }
        score = std::max(score, std::sqrt(dev));
        if (x % sample_stride == 0 && report.gram_samples.size() < 8)
            report.gram_samples.push_back(std::move(g));
    }

    report.score = score;
    report.threshold = 1e-6 * (trace_sum / nn);
    report.rigid = score <= report.threshold;
    return report;
}

std::vector<FactorSpec> default_candidate_modes(const Domain& domain, int max_mode) {
    std::vector<FactorSpec> out;
    auto push = [&](int kx, int ky) {
        for (bool is_sin : {false, true}) {
            FactorSpec s;
            s.terms.push_back({kx, ky, is_sin, 1.0});
            out.push_back(std::move(s));
        }
    };
    if (domain.kind == DomainKind::circle) {
        for (int k = 1; k <= max_mode; ++k) push(k, 0);
    } else {
        // Canonical half-lattice: (0,k>0) then (j>0, any k); the mirrored modes
        // are the same functions up to sign.
        for (int k = 1; k <= max_mode; ++k) push(0, k);
        for (int j = 1; j <= max_mode; ++j)
            for (int k = -max_mode; k <= max_mode; ++k) push(j, k);
    }
    return out;
}

SplitSearchResult find_splitting_factor(const Eigenspace& eigenspace, const CovariantOperator& op,
                                        const std::vector<FactorSpec>& candidate_modes,
                                        double spread_tol_rel) {
    if (candidate_modes.empty())
        throw std::invalid_argument("find_splitting_factor: empty candidate set");
    if (std::abs(eigenspace.value) <= 1e-9)
        throw std::invalid_argument("find_splitting_factor: zero eigenvalue");

    SplitSearchResult result;
    for (const FactorSpec& spec : candidate_modes) {
        const ConformalFactor f = make_factor(*op.domain, spec);
        FirstOrderMatrix fom = first_order_matrix(eigenspace, f, op);
        const double spread = fom.spread();
        if (spread > result.spread) {
            result.spread = spread;
            result.factor_spec = spec;
            result.first_order = std::move(fom);
        }
    }

    if (result.spread > spread_tol_rel * std::abs(eigenspace.value)) {
        result.found = true;
    } else {
        result.rigidity = rigidity_score(eigenspace, op);
    }
    return result;
}

double epsilon_budget(const std::vector<BudgetConstraint>& constraints, double eta,
                      double factor_sup_norm) {
    if (eta == 0.0 || !(factor_sup_norm > 0.0))
        throw std::invalid_argument("epsilon_budget: eta and factor sup norm must be nonzero");
    const double rate = 2.0 * std::abs(eta) * factor_sup_norm;
    double eps = std::numeric_limits<double>::infinity();
    for (const BudgetConstraint& c : constraints) {
        if (c.lambda == 0.0) continue;
        if (!(c.dist > 0.0))
            throw std::invalid_argument("epsilon_budget: nonpositive gap between distinct clusters");
        eps = std::min(eps, std::log1p(c.dist / std::abs(c.lambda)) / rate);
    }
    if (!std::isfinite(eps))
        throw std::invalid_argument("epsilon_budget: no active constraints");
    return eps;
}

std::vector<BudgetConstraint> budget_constraints_for(const std::vector<Eigenspace>& clusters,
                                                     double alpha) {
    std::vector<BudgetConstraint> out;
    const std::size_t n = clusters.size();
    auto half_gap = [&](std::size_t j) {
        double g = std::numeric_limits<double>::infinity();
        if (j > 0) g = std::min(g, clusters[j].value - clusters[j - 1].value);
        if (j + 1 < n) g = std::min(g, clusters[j + 1].value - clusters[j].value);
        return g / 2.0;
    };

    for (std::size_t j = 0; j < n; ++j) {
        const double v = clusters[j].value;
        if (std::abs(v) > alpha) continue;
        const double d = half_gap(j);
        if (std::isfinite(d)) out.push_back({v, d});
    }

    // Guards: first clusters beyond each window boundary must not enter.
    for (std::size_t j = 0; j < n; ++j) {
        const double v = clusters[j].value;
        if (v > alpha) {
            double dist = v - alpha;
            if (j > 0 && std::abs(clusters[j - 1].value) <= alpha)
                dist = std::min(dist, v - clusters[j - 1].value - half_gap(j - 1));
            out.push_back({v, dist});
            break;
        }
    }
    for (std::size_t j = n; j-- > 0;) {
        const double v = clusters[j].value;
        if (v < -alpha) {
            double dist = -alpha - v;
            if (j + 1 < n && std::abs(clusters[j + 1].value) <= alpha)
                dist = std::min(dist, clusters[j + 1].value - half_gap(j + 1) - v);
            out.push_back({v, dist});
            break;
        }
    }
    return out;
}

namespace {

struct WindowState {
    int degeneracy = 0;                  // sum of (mult - 1) over nonzero window clusters
    std::vector<double> simple_values;   // currently simple nonzero window values
};

WindowState window_state(const std::vector<Eigenspace>& clusters, double alpha, double zero_tol) {
    WindowState st;
    for (const Eigenspace& es : clusters) {
        if (std::abs(es.value) <= zero_tol || std::abs(es.value) > alpha) continue;
        st.degeneracy += es.multiplicity - 1;
        if (es.multiplicity == 1) st.simple_values.push_back(es.value);
    }
    return st;
}

}  // namespace

SplitPlan genericity_loop(const CovariantOperator& op, double alpha, double gamma,
                          const LoopOptions& options) {
    if (!(alpha > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("genericity_loop: alpha and gamma must be positive");

    SplitPlan plan;
    plan.alpha = alpha;
    plan.gamma = gamma;

    CovariantOperator cur = op;  // background is re-based after every step
    const std::vector<double> w = cur.entry_weights();
    std::ostringstream diag;

    Spectrum spec = solve_symmetric(cur.background, w);
    plan.kernel_dim_initial = kernel_dimension(spec);

    for (int step = 0;; ++step) {
        const double zero_tol =
            options.zero_tol_rel * std::max(1.0, spec.spectral_scale());
        // gamma doubles as the working cluster tolerance: anything closer than
        // the required gap still counts as degenerate.
        std::vector<Eigenspace> clusters = cluster(spec, gamma);
        const WindowState before = window_state(clusters, alpha, zero_tol);

        if (before.degeneracy == 0) {
            plan.complete = true;
            break;
        }
        if (step >= options.max_steps) {
            diag << "max_steps reached with degeneracy " << before.degeneracy << "; ";
            break;
        }

        // Most degenerate first, then smallest |lambda|; skip known-irreducible.
        const Eigenspace* target = nullptr;
        for (const Eigenspace& es : clusters) {
            if (std::abs(es.value) <= zero_tol || std::abs(es.value) > alpha) continue;
            if (es.multiplicity < 2) continue;
            bool irreducible = false;
            for (const RigidityReport& r : plan.irreducible)
                if (std::abs(r.value - es.value) <= std::max(gamma, 1e-6) * std::max(1.0, std::abs(es.value)))
                    irreducible = true;
            if (irreducible) continue;
            if (!target || es.multiplicity > target->multiplicity ||
                (es.multiplicity == target->multiplicity &&
                 std::abs(es.value) < std::abs(target->value)))
                target = &es;
        }
        if (!target) {
            diag << "remaining degenerate clusters are irreducible; ";
            break;
        }

        SplitSearchResult search = find_splitting_factor(
            *target, cur, default_candidate_modes(*cur.domain, options.candidate_max_mode),
            options.spread_tol_rel);
        if (!search.found && options.escalated_max_mode > options.candidate_max_mode) {
            search = find_splitting_factor(
                *target, cur, default_candidate_modes(*cur.domain, options.escalated_max_mode),
                options.spread_tol_rel);
        }
        if (!search.found) {
            plan.irreducible.push_back(*search.rigidity);
            diag << "cluster at " << target->value
                 << (search.rigidity->rigid ? " is rigid; " : " unsplittable at candidate set; ");
            continue;
        }

        const ConformalFactor factor = make_factor(*cur.domain, search.factor_spec);
        // Budget only the window-boundary guards a priori. Constraining interior
        // half-gaps would shrink eps geometrically as earlier splits open small
        // gaps, stalling the loop; interior safety (kernel, window count,
        // degeneracy) is verified on the computed spectrum below instead.
        std::vector<BudgetConstraint> constraints;
        for (const BudgetConstraint& c : budget_constraints_for(clusters, alpha))
            if (std::abs(c.lambda) > alpha) constraints.push_back(c);
        if (constraints.empty())
            constraints = budget_constraints_for(clusters, alpha);
        const double budget =
            epsilon_budget(constraints, cur.bidegree.eta(), factor.sup_norm);

        // Post-step invariants: kernel unchanged, window count unchanged, and
        // degeneracy strictly down. Halve eps and retry on violation.
        double eps = options.safety * budget;
        bool ok = false;
        Matrix deformed;
        Spectrum next;
        int after_degeneracy = 0;
        int window_count = 0;
        for (double v : spec.eigenvalues)
            if (std::abs(v) <= alpha) ++window_count;
        ConjugatedFamily family(cur, factor);
        for (int attempt = 0; attempt < 5; ++attempt, eps /= 2.0) {
            deformed = family_matrix(family, eps);
            next = solve_symmetric(deformed, w);
            const double next_zero_tol =
                options.zero_tol_rel * std::max(1.0, next.spectral_scale());
            const WindowState after =
                window_state(cluster(next, gamma), alpha, next_zero_tol);
            int count = 0;
            for (double v : next.eigenvalues)
                if (std::abs(v) <= alpha) ++count;
            if (kernel_dimension(next, next_zero_tol) == kernel_dimension(spec, zero_tol) &&
                count == window_count && after.degeneracy < before.degeneracy) {
                after_degeneracy = after.degeneracy;
                ok = true;
                break;
            }
        }
        if (!ok) {
            diag << "step at " << target->value
                 << " violated a post-step invariant at every retry; ";
            break;
        }

        SplitStep record;
        record.factor_spec = search.factor_spec;
        record.epsilon = eps;
        record.target_value = target->value;
        record.target_multiplicity = target->multiplicity;
        record.degeneracy_after = after_degeneracy;
        plan.steps.push_back(std::move(record));

        cur.background = std::move(deformed);
        spec = std::move(next);
    }

    plan.final_spectrum = spec.eigenvalues;
    plan.kernel_dim_final = kernel_dimension(spec);
    plan.diagnostics = diag.str();
    return plan;
}

}  // namespace confspec
