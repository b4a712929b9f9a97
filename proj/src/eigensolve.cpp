#include "confspec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace confspec {

namespace kernels {

void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);

    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                // e[j] <- (A v)_j / h over the leading block; rows independent.
#pragma omp parallel for schedule(static)
                for (long long jj = 0; jj <= static_cast<long long>(l); ++jj) {
                    const auto j = static_cast<std::size_t>(jj);
                    a(j, i) = a(i, j) / h;
                    double gj = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) gj += a(j, k) * a(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) gj += a(k, j) * a(i, k);
                    e[j] = gj / h;
                }
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) f += e[j] * a(i, j);
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) e[j] -= hh * a(i, j);
                // Rank-2 update of the lower triangle; rows independent.
#pragma omp parallel for schedule(static)
                for (long long jj = 0; jj <= static_cast<long long>(l); ++jj) {
                    const auto j = static_cast<std::size_t>(jj);
                    const double fj = a(i, j), gj = e[j];
                    for (std::size_t k = 0; k <= j; ++k) a(j, k) -= fj * e[k] + gj * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }

    d[0] = 0.0;
    e[0] = 0.0;
    // Accumulate the orthogonal transform.
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
#pragma omp parallel for schedule(static)
            for (long long jj = 0; jj < static_cast<long long>(i); ++jj) {
                const auto j = static_cast<std::size_t>(jj);
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
                for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    }
}

void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("tridiagonal_ql: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                long long i;
                for (i = static_cast<long long>(m) - 1; i >= static_cast<long long>(l); --i) {
                    const auto iu = static_cast<std::size_t>(i);
                    double f = s * e[iu];
                    const double b = c * e[iu];
                    r = std::hypot(f, g);
                    e[iu + 1] = r;
                    if (r == 0.0) {
                        d[iu + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[iu + 1] - p;
                    r = (d[iu] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[iu + 1] = g + p;
                    g = c * r - b;
#pragma omp parallel for schedule(static)
                    for (long long kk = 0; kk < static_cast<long long>(n); ++kk) {
                        const auto k = static_cast<std::size_t>(kk);
                        const double fk = z(k, iu + 1);
                        z(k, iu + 1) = s * z(k, iu) + c * fk;
                        z(k, iu) = c * z(k, iu) - s * fk;
                    }
                }
                if (r == 0.0 && i >= static_cast<long long>(l)) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void jacobi_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
    const std::size_t n = a.rows();
    eigenvectors = Matrix::identity(n);

    auto offdiag = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };
    const double scale = std::max(1.0, a.max_abs());

    for (int sweep = 0; sweep < 100 && offdiag() > 1e-14 * scale * n; ++sweep) {
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = eigenvectors(k, p), vkq = eigenvectors(k, q);
                    eigenvectors(k, p) = c * vkp - s * vkq;
                    eigenvectors(k, q) = s * vkp + c * vkq;
                }
            }
    }

    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a(i, i);

    // Sort ascending, permuting vector columns, and fix signs.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return eigenvalues[x] < eigenvalues[y]; });
    std::vector<double> ev(n);
    Matrix v(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        ev[c] = eigenvalues[idx[c]];
        std::size_t imax = 0;
        double vmax = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double av = std::abs(eigenvectors(r, idx[c]));
            if (av > vmax) {
                vmax = av;
                imax = r;
            }
        }
        const double sgn = eigenvectors(imax, idx[c]) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r) v(r, c) = sgn * eigenvectors(r, idx[c]);
    }
    eigenvalues = std::move(ev);
    eigenvectors = std::move(v);
}

}  // namespace kernels

namespace {

void check_weights(const std::vector<double>& w) {
    for (double x : w)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("weights must be positive and finite");
}

Spectrum solve_plain_weighted(const Matrix& matrix, const std::vector<double>& weights) {
    const std::size_t n = matrix.rows();
    std::vector<double> sq(n), isq(n);
    for (std::size_t i = 0; i < n; ++i) {
        sq[i] = std::sqrt(weights[i]);
        isq[i] = 1.0 / sq[i];
    }

    // Similarity B = S A S^{-1}, S = diag(sqrt w); symmetrize to kill roundoff.
    Matrix b = scale_rows(scale_cols(matrix, isq), sq);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (b(i, j) + b(j, i));
            b(i, j) = b(j, i) = m;
        }

    std::vector<double> d, e;
    kernels::tridiagonalize(b, d, e);
    kernels::tridiagonal_ql(d, e, b);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.eigenvectors = Matrix(n, n);
    spec.weights = weights;
    for (std::size_t c = 0; c < n; ++c) {
        spec.eigenvalues[c] = d[idx[c]];
        // Map back: v = S^{-1} y, then sign-fix by largest-magnitude entry.
        std::size_t imax = 0;
        double vmax = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double av = std::abs(b(r, idx[c]) * isq[r]);
            if (av > vmax) {
                vmax = av;
                imax = r;
            }
        }
        const double sgn = (b(imax, idx[c]) * isq[imax]) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r)
            spec.eigenvectors(r, c) = sgn * b(r, idx[c]) * isq[r];
    }
    return spec;
}

}  // namespace

Spectrum solve_symmetric(const Matrix& matrix, const std::vector<double>& weights) {
    if (matrix.rows() != matrix.cols()) throw std::invalid_argument("solve_symmetric: not square");
    if (weights.size() != matrix.rows())
        throw std::invalid_argument("solve_symmetric: weights size mismatch");
    if (!matrix.all_finite()) throw std::invalid_argument("solve_symmetric: non-finite entries");
    check_weights(weights);

    // Weighted symmetry: diag(w) * A must be symmetric.
    const Matrix wa = scale_rows(matrix, weights);
    const double scale = std::max(1.0, wa.max_abs());
    if (asymmetry(wa) > 1e-8 * scale)
        throw std::invalid_argument("solve_symmetric: matrix not symmetric w.r.t. weights");

    return solve_plain_weighted(matrix, weights);
}

Spectrum solve_generalized(const Matrix& stiffness, const std::vector<double>& mass_diagonal,
                           const std::vector<double>& weights) {
    const std::size_t n = stiffness.rows();
    if (mass_diagonal.size() != n || weights.size() != n)
        throw std::invalid_argument("solve_generalized: size mismatch");
    for (double m : mass_diagonal)
        if (!(m > 0.0)) throw std::invalid_argument("solve_generalized: nonpositive mass entry");

    std::vector<double> isqm(n);
    for (std::size_t i = 0; i < n; ++i) isqm[i] = 1.0 / std::sqrt(mass_diagonal[i]);

    const Matrix c = scale_rows(scale_cols(stiffness, isqm), isqm);
    Spectrum reduced = solve_symmetric(c, weights);

    // Map back u = mass^{-1/2} y; orthonormal in the (w * mass)-inner product.
    Spectrum spec;
    spec.eigenvalues = std::move(reduced.eigenvalues);
    spec.eigenvectors = Matrix(n, n);
    spec.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) spec.weights[i] = weights[i] * mass_diagonal[i];
    for (std::size_t col = 0; col < n; ++col)
        for (std::size_t r = 0; r < n; ++r)
            spec.eigenvectors(r, col) = reduced.eigenvectors(r, col) * isqm[r];
    return spec;
}

std::vector<Eigenspace> cluster(const Spectrum& spectrum, double cluster_tol) {
    if (!(cluster_tol > 0.0)) throw std::invalid_argument("cluster: cluster_tol must be positive");
    std::vector<Eigenspace> spaces;
    const std::size_t n = spectrum.size();
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n) {
            const double gap = spectrum.eigenvalues[end] - spectrum.eigenvalues[end - 1];
            if (gap > cluster_tol * std::max(1.0, std::abs(spectrum.eigenvalues[end - 1]))) break;
            ++end;
        }
        Eigenspace es;
        es.multiplicity = static_cast<int>(end - start);
        es.cluster_tol = cluster_tol;
        es.first_index = start;
        double mean = 0.0;
        for (std::size_t i = start; i < end; ++i) mean += spectrum.eigenvalues[i];
        es.value = mean / es.multiplicity;
        es.basis = Matrix(spectrum.eigenvectors.rows(), end - start);
        for (std::size_t c = start; c < end; ++c)
            for (std::size_t r = 0; r < spectrum.eigenvectors.rows(); ++r)
                es.basis(r, c - start) = spectrum.eigenvectors(r, c);
        spaces.push_back(std::move(es));
        start = end;
    }
    return spaces;
}

}  // namespace confspec
