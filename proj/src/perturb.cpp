#include "confspec/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace confspec {

FirstOrderMatrix first_order_matrix(const Eigenspace& eigenspace, const ConformalFactor& factor,
                                    const CovariantOperator& op) {
    if (std::abs(eigenspace.value) <= 1e-9)
        throw std::invalid_argument(
            "first_order_matrix: zero eigenvalue; the kernel is conformally invariant and is "
            "excluded from perturbation analysis");
    if (factor.values.size() != op.domain->node_count())
        throw std::invalid_argument("first_order_matrix: factor/operator domain mismatch");

    const std::size_t nn = op.domain->node_count();
    const int l = eigenspace.multiplicity;
    const double coef = 2.0 * op.bidegree.eta() * eigenspace.value;

    FirstOrderMatrix fom;
    fom.eigenvalue = eigenspace.value;
    fom.entries = Matrix(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = i; j < l; ++j) {
            double s = 0.0;
            for (std::size_t x = 0; x < nn; ++x) {
                double fib = 0.0;
                for (int c = 0; c < op.rank; ++c) {
                    const std::size_t r = static_cast<std::size_t>(c) * nn + x;
                    fib += eigenspace.basis(r, i) * eigenspace.basis(r, j);
                }
                s += op.domain->quad_weights[x] * factor.values[x] * fib;
            }
            fom.entries(i, j) = fom.entries(j, i) = coef * s;
        }

    kernels::jacobi_eigen(fom.entries, fom.predicted_slopes, fom.slope_basis);
    return fom;
}

std::size_t Branch::index_of_zero() const {
    for (std::size_t i = 0; i < eps_grid.size(); ++i)
        if (eps_grid[i] == 0.0) return i;
    throw std::logic_error("Branch: grid does not contain 0");
}

double Branch::value_at(double eps) const {
    for (std::size_t i = 0; i < eps_grid.size(); ++i)
        if (eps_grid[i] == eps) return values[i];
    throw std::invalid_argument("Branch: eps not on grid");
}

namespace {

struct Seed {
    std::vector<double> vector;
    double value;
    int origin_cluster;
};

// March one half-axis of the grid, filling branch entries via greedy overlap
// matching against the previous step's vectors.
void march(const ConjugatedFamily& family, const std::vector<double>& eps_values,
           const std::vector<std::size_t>& grid_positions, std::vector<Branch>& branches,
           std::vector<std::vector<double>> current, const TrackOptions& options) {
    const std::vector<double> w = family.op->entry_weights();
    const std::size_t nb = branches.size();

    for (std::size_t step = 0; step < eps_values.size(); ++step) {
        const double eps = eps_values[step];
        const Spectrum spec = solve_symmetric(family_matrix(family, eps), w);
        const std::size_t n = spec.size();

        // Overlap of every branch with every eigenvector.
        Matrix overlap(nb, n);
        for (std::size_t a = 0; a < nb; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                double s = 0.0;
                for (std::size_t r = 0; r < current[a].size(); ++r)
                    s += w[r] * current[a][r] * spec.eigenvectors(r, b);
                overlap(a, b) = std::abs(s);
            }

        std::vector<bool> a_done(nb, false);
        std::vector<bool> b_done(n, false);
        for (std::size_t assigned = 0; assigned < nb; ++assigned) {
            double best = -1.0;
            std::size_t ba = 0, bb = 0;
            for (std::size_t a = 0; a < nb; ++a) {
                if (a_done[a]) continue;
                for (std::size_t b = 0; b < n; ++b) {
                    if (b_done[b]) continue;
                    if (overlap(a, b) > best) {
                        best = overlap(a, b);
                        ba = a;
                        bb = b;
                    }
                }
            }
            a_done[ba] = true;
            b_done[bb] = true;

            std::vector<double> v = spec.eigenvector(bb);
            // Orient along the previous vector.
            double s = 0.0;
            for (std::size_t r = 0; r < v.size(); ++r) s += w[r] * current[ba][r] * v[r];
            if (s < 0.0)
                for (double& x : v) x = -x;

            const std::size_t pos = grid_positions[step];
            branches[ba].values[pos] = spec.eigenvalues[bb];
            branches[ba].vectors[pos] = v;
            branches[ba].overlap_quality[pos] = best;
            if (best < options.quality_floor) branches[ba].uncertain = true;
            current[ba] = std::move(v);
        }
    }
}

}  // namespace

std::vector<Branch> track_branches(const ConjugatedFamily& family, std::vector<double> eps_grid,
                                   double window_lo, double window_hi,
                                   const TrackOptions& options) {
    std::sort(eps_grid.begin(), eps_grid.end());
    eps_grid.erase(std::unique(eps_grid.begin(), eps_grid.end()), eps_grid.end());
    if (std::find(eps_grid.begin(), eps_grid.end(), 0.0) == eps_grid.end())
        throw std::invalid_argument("track_branches: eps grid must contain 0");

    const std::vector<double> w = family.op->entry_weights();
    const Spectrum base = solve_symmetric(family.op->background, w);
    const double zero_tol = options.zero_tol_rel * std::max(1.0, base.spectral_scale());
    const std::vector<Eigenspace> spaces = cluster(base, options.cluster_tol);

    // Seed vectors at eps = 0.
    std::vector<Seed> seeds;
    for (std::size_t ci = 0; ci < spaces.size(); ++ci) {
        const Eigenspace& es = spaces[ci];
        if (es.value < window_lo || es.value > window_hi) continue;
        const bool is_kernel = std::abs(es.value) <= zero_tol;
        if (is_kernel && !options.include_kernel) continue;

        Matrix basis = es.basis;
        if (!is_kernel && es.multiplicity >= 2) {
            // Rotate to the first-order eigenbasis so slopes are well defined.
            const FirstOrderMatrix fom = first_order_matrix(es, family.factor, *family.op);
            Matrix rotated(basis.rows(), basis.cols());
            for (std::size_t r = 0; r < basis.rows(); ++r)
                for (int c = 0; c < es.multiplicity; ++c) {
                    double s = 0.0;
                    for (int k = 0; k < es.multiplicity; ++k)
                        s += basis(r, k) * fom.slope_basis(k, c);
                    rotated(r, c) = s;
                }
            basis = std::move(rotated);
        }
        for (int c = 0; c < es.multiplicity; ++c) {
            Seed s;
            s.value = base.eigenvalues[es.first_index + c];
            s.origin_cluster = static_cast<int>(ci);
            s.vector.resize(basis.rows());
            for (std::size_t r = 0; r < basis.rows(); ++r) s.vector[r] = basis(r, c);
            seeds.push_back(std::move(s));
        }
    }

    std::vector<Branch> branches(seeds.size());
    const std::size_t zero_pos =
        std::find(eps_grid.begin(), eps_grid.end(), 0.0) - eps_grid.begin();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        Branch& b = branches[i];
        b.eps_grid = eps_grid;
        b.values.assign(eps_grid.size(), 0.0);
        b.vectors.assign(eps_grid.size(), {});
        b.overlap_quality.assign(eps_grid.size(), 0.0);
        b.origin_cluster = seeds[i].origin_cluster;
        b.origin_value = seeds[i].value;
        b.values[zero_pos] = seeds[i].value;
        b.vectors[zero_pos] = seeds[i].vector;
        b.overlap_quality[zero_pos] = 1.0;
    }
    if (seeds.empty()) return branches;

    std::vector<std::vector<double>> start;
    start.reserve(seeds.size());
    for (const Seed& s : seeds) start.push_back(s.vector);

    // Outward from 0 on each side.
    std::vector<double> pos_eps, neg_eps;
    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = zero_pos + 1; i < eps_grid.size(); ++i) {
        pos_eps.push_back(eps_grid[i]);
        pos_idx.push_back(i);
    }
    for (std::size_t i = zero_pos; i-- > 0;) {
        neg_eps.push_back(eps_grid[i]);
        neg_idx.push_back(i);
    }
    march(family, pos_eps, pos_idx, branches, start, options);
    march(family, neg_eps, neg_idx, branches, std::move(start), options);
    return branches;
}

GrowthReport growth_bound_check(const Branch& branch, const CovariantOperator& op,
                                const ConformalFactor& factor) {
    const double lambda0 = branch.values[branch.index_of_zero()];
    if (std::abs(lambda0) <= 1e-12)
        throw std::invalid_argument("growth_bound_check: branch must start from a nonzero eigenvalue");
    const double rate = 2.0 * std::abs(op.bidegree.eta()) * factor.sup_norm;
    const double slack = 1e-8 * (1.0 + std::abs(lambda0));

    GrowthReport report{{}, true};
    for (std::size_t i = 0; i < branch.eps_grid.size(); ++i) {
        GrowthMargin m;
        m.eps = branch.eps_grid[i];
        m.deviation = std::abs(branch.values[i] - lambda0);
        m.bound = std::abs(lambda0) * (std::exp(rate * std::abs(m.eps)) - 1.0);
        m.pass = m.deviation <= m.bound + slack;
        report.all_pass = report.all_pass && m.pass;
        report.margins.push_back(m);
    }
    return report;
}

int kernel_dimension(const Spectrum& spectrum, double zero_tol) {
    if (!(zero_tol > 0.0)) throw std::invalid_argument("kernel_dimension: zero_tol must be positive");
    int count = 0;
    for (double v : spectrum.eigenvalues)
        if (std::abs(v) <= zero_tol) ++count;
    return count;
}

int kernel_dimension(const Spectrum& spectrum) {
    return kernel_dimension(spectrum, 1e-9 * std::max(1.0, spectrum.spectral_scale()));
}

std::vector<double> default_eps_grid() {
    return {-0.5, -0.35, -0.2, -0.1, -0.05, -0.01, -0.001, 0.0,
            0.001, 0.01,  0.05, 0.1,  0.2,   0.35,  0.5};
}

}  // namespace confspec
