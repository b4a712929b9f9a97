#pragma once

#include <vector>

#include "confspec/eigensolve.hpp"
#include "confspec/operators.hpp"

namespace confspec {

// Projected first-order perturbation on a degenerate eigenspace:
// entries(i,j) = 2*eta*lambda*<f u_i, u_j>. Its eigenvalues are the slopes
// lambda_i'(0) of the perturbed eigenvalue branches.
struct FirstOrderMatrix {
    double eigenvalue;                     // lambda of the eigenspace
    Matrix entries;                        // l x l, symmetric
    std::vector<double> predicted_slopes;  // ascending
    Matrix slope_basis;  // l x l rotation whose columns diagonalize `entries`

    double spread() const {
        return predicted_slopes.empty()
                   ? 0.0
                   : predicted_slopes.back() - predicted_slopes.front();
    }
    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < entries.rows(); ++i) t += entries(i, i);
        return t;
    }
};

FirstOrderMatrix first_order_matrix(const Eigenspace& eigenspace, const ConformalFactor& factor,
                                    const CovariantOperator& op);

struct Branch {
    std::vector<double> eps_grid;  // ascending, contains 0
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    std::vector<double> overlap_quality;  // |<v_prev, v_cur>|, 1 at eps = 0
    int origin_cluster = -1;
    double origin_value = 0.0;
    bool uncertain = false;

    std::size_t index_of_zero() const;
    double value_at(double eps) const;
};

struct TrackOptions {
    double cluster_tol = 1e-8;
    double quality_floor = 0.7;
    bool include_kernel = false;
    double zero_tol_rel = 1e-9;  // relative to spectral scale
};

// Continues the eigenvalue curves of the family over the grid. Branches start
// from the clusters whose value lies in [window_lo, window_hi] at eps = 0;
// degenerate clusters are seeded with the basis diagonalizing the first-order
// matrix of the family's own factor. Matching between consecutive eps solves is
// greedy on the weighted eigenvector overlap, largest first; a match below the
// quality floor flags the branch "uncertain" instead of being trusted.
std::vector<Branch> track_branches(const ConjugatedFamily& family,
                                   std::vector<double> eps_grid, double window_lo,
                                   double window_hi, const TrackOptions& options = {});

struct GrowthMargin {
    double eps;
    double deviation;  // |lambda(eps) - lambda(0)|
    double bound;      // |lambda(0)| (e^{2|eta| ||f||_inf |eps|} - 1)
    bool pass;
};

struct GrowthReport {
    std::vector<GrowthMargin> margins;
    bool all_pass;
};

// Exponential envelope |lambda(eps)-lambda| <= |lambda|(e^{2|eta|||f||oo|eps|}-1)
// checked at every grid point, with slack 1e-8*(1+|lambda|).
GrowthReport growth_bound_check(const Branch& branch, const CovariantOperator& op,
                                const ConformalFactor& factor);

// Number of eigenvalues within zero_tol of 0.
int kernel_dimension(const Spectrum& spectrum, double zero_tol);
// Same with the default zero_tol = 1e-9 * spectral scale.
int kernel_dimension(const Spectrum& spectrum);

// The default eps grid used by sweeps and the CLI.
std::vector<double> default_eps_grid();

}  // namespace confspec
