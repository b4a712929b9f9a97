#pragma once

#include <optional>
#include <string>
#include <vector>

#include "confspec/perturb.hpp"

namespace confspec {

// Pointwise Gram diagnostic for an eigenspace: G(x)_ij = (u_i(x), u_j(x))_x for
// an orthonormal basis. A rigid eigenspace has G(x) proportional to the
// identity at every node; the score is the worst-node deviation.
struct RigidityReport {
    double value = 0.0;
    int multiplicity = 0;
    double score = 0.0;      // max_x || G(x) - (tr G(x)/l) I ||_F ; +inf for multiplicity 1
    double threshold = 0.0;  // default 1e-6 * mean trace of G
    bool rigid = false;
    std::vector<Matrix> gram_samples;  // thinned, at most 8 nodes
};

RigidityReport rigidity_score(const Eigenspace& eigenspace, const CovariantOperator& op);

// Candidate trigonometric factors for splitting searches: all cos/sin modes
// with |kx|,|ky| <= max_mode, constants excluded, in canonical order.
std::vector<FactorSpec> default_candidate_modes(const Domain& domain, int max_mode = 4);

struct SplitSearchResult {
    bool found = false;
    FactorSpec factor_spec;          // valid when found
    std::optional<FirstOrderMatrix> first_order;  // best candidate's matrix (when any candidate exists)
    double spread = 0.0;
    std::optional<RigidityReport> rigidity;  // set when not found
};

// Maximizes the first-order slope spread over the candidate set; ties keep the
// earlier candidate. If every spread is below spread_tol_rel * |lambda| the
// rigidity report is returned instead (verdict rigid only if the score also
// vanishes; otherwise it is a failure to split at this candidate set).
SplitSearchResult find_splitting_factor(const Eigenspace& eigenspace, const CovariantOperator& op,
                                        const std::vector<FactorSpec>& candidate_modes,
                                        double spread_tol_rel = 1e-9);

// One constraint |lambda| (e^{2|eta| ||f||oo eps} - 1) <= dist.
struct BudgetConstraint {
    double lambda;
    double dist;
};

// Largest eps satisfying every constraint: min over log(1 + dist/|lambda|) /
// (2 |eta| ||f||oo). Constraints with lambda = 0 are vacuous (the kernel does
// not move).
double epsilon_budget(const std::vector<BudgetConstraint>& constraints, double eta,
                      double factor_sup_norm);

// Constraints keeping every cluster inside disjoint half-gap intervals and the
// first eigenvalues beyond the window boundary out of it.
std::vector<BudgetConstraint> budget_constraints_for(const std::vector<Eigenspace>& clusters,
                                                     double alpha);

struct SplitStep {
    FactorSpec factor_spec;
    double epsilon;
    double target_value;
    int target_multiplicity;
    int degeneracy_after;  // sum of (multiplicity - 1) over nonzero window clusters
};

struct SplitPlan {
    double alpha = 0.0;
    double gamma = 0.0;
    std::vector<SplitStep> steps;
    bool complete = false;
    std::vector<RigidityReport> irreducible;
    std::vector<double> final_spectrum;
    int kernel_dim_initial = 0;
    int kernel_dim_final = 0;
    std::string diagnostics;
};

struct LoopOptions {
    int max_steps = 10;
    double cluster_tol = 1e-8;
    int candidate_max_mode = 4;
    int escalated_max_mode = 6;
    double safety = 0.5;        // fraction of the epsilon budget actually taken
    double spread_tol_rel = 1e-9;
    double zero_tol_rel = 1e-9;
};

// Finite-step degeneracy breaking: repeatedly pick the most degenerate nonzero
// cluster in [-alpha, alpha] (largest multiplicity, then smallest |lambda|),
// choose the best splitting factor, take a bound-budgeted step, re-base the
// operator to the deformed matrix, and repeat until every nonzero eigenvalue in
// the window is simple with pairwise relative gaps >= gamma.
SplitPlan genericity_loop(const CovariantOperator& op, double alpha, double gamma,
                          const LoopOptions& options = {});

}  // namespace confspec
