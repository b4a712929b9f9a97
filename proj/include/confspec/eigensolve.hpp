#pragma once

#include <vector>

#include "confspec/linalg.hpp"

namespace confspec {

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Matrix eigenvectors;              // columns, orthonormal in the weighted inner product
    std::vector<double> weights;      // inner product used

    std::size_t size() const { return eigenvalues.size(); }
    std::vector<double> eigenvector(std::size_t i) const {
        std::vector<double> v(eigenvectors.rows());
        for (std::size_t r = 0; r < v.size(); ++r) v[r] = eigenvectors(r, i);
        return v;
    }
    double spectral_scale() const {
        double m = 0.0;
        for (double v : eigenvalues) m = std::max(m, std::abs(v));
        return m;
    }
};

struct Eigenspace {
    double value;            // mean of the cluster
    Matrix basis;            // N x multiplicity, orthonormal columns
    int multiplicity;
    double cluster_tol;
    std::size_t first_index;  // index of the first member in the parent spectrum
};

// Weighted symmetric eigenproblem: reduce by diag(w)^{1/2} similarity, then
// Householder tridiagonalization + implicit-shift QL. Deterministic: ascending
// eigenvalues, each eigenvector sign-fixed by its largest-magnitude entry.
Spectrum solve_symmetric(const Matrix& matrix, const std::vector<double>& weights);

// K u = lambda diag(mass) u, symmetric-reduced by mass^{-1/2}. Eigenvectors are
// orthonormal in the (weights * mass)-inner product.
Spectrum solve_generalized(const Matrix& stiffness, const std::vector<double>& mass_diagonal,
                           const std::vector<double>& weights);

// Greedy ascending-scan clustering: consecutive eigenvalues join a cluster iff
// the gap is <= cluster_tol * max(1, |value|).
std::vector<Eigenspace> cluster(const Spectrum& spectrum, double cluster_tol);

namespace kernels {

// Householder reduction of a symmetric matrix to tridiagonal form (d, e),
// accumulating the orthogonal transform in-place. OpenMP-parallel inner loops.
void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e);

// Implicit-shift QL on a tridiagonal matrix; z accumulates eigenvectors.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix& z);

// Serial cyclic Jacobi, kept as an independent reference path for testing and
// benchmarks. Returns ascending eigenvalues and orthonormal eigenvector columns.
void jacobi_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& eigenvectors);

}  // namespace kernels

}  // namespace confspec
