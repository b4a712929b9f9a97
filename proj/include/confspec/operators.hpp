#pragma once

#include <optional>
#include <string>
#include <vector>

#include "confspec/domains.hpp"
#include "confspec/linalg.hpp"

namespace confspec {

// Conformal weights (a,b) of the covariance law, with the derived constants
// c = (a+b)/4 and eta = (a-b)/4. a != b always, so eta != 0.
struct Bidegree {
    double a;
    double b;

    double c() const { return (a + b) / 4.0; }
    double eta() const { return (a - b) / 4.0; }
};

enum class SpinStructure { periodic, antiperiodic };

struct CovariantOperator {
    std::string name;
    Bidegree bidegree;
    int rank = 1;    // fiber dimension (real)
    int order = 1;   // differential order
    const Domain* domain = nullptr;
    Matrix background;  // N x N, N = rank * node_count, weighted-symmetric

    // Set for the circle Dirac: deformed spectrum is (2pi/L)*(Z + spin_offset).
    bool has_arclength_oracle = false;
    double spin_offset = 0.0;  // 0 periodic, 1/2 antiperiodic
    bool synthetic = false;

    std::size_t size() const { return background.rows(); }
    // Quadrature weights replicated across fiber components.
    std::vector<double> entry_weights() const;
};

// n=2 conformal Laplacian on the flat torus: the Fourier Laplacian, bidegree
// (0,2). The scalar curvature term vanishes on the flat background.
CovariantOperator conformal_laplacian_torus(const Domain& domain);

// Dirac operator on the circle in its real rank-2 form, bidegree (0,1). The
// bundle isomorphism kappa of the covariance law is the identity here
// (trivialized spinor bundle); future curved instances would hook in here.
CovariantOperator dirac_circle(const Domain& domain, SpinStructure spin);

// Matrix power of a base operator with a user-supplied bidegree. Exercises the
// order-m machinery through the conjugation family only; carries no geometric
// deformed-operator claim.
CovariantOperator synthetic_power(const CovariantOperator& base, int power, Bidegree bidegree);

// The deformation family A_f(eps) = E(eps) * P * E(eps), E = diag(e^{eta*eps*f}).
struct ConjugatedFamily {
    const CovariantOperator* op = nullptr;
    ConformalFactor factor;
    std::vector<double> eta_f;  // eta * f per node, cached

    ConjugatedFamily(const CovariantOperator& o, ConformalFactor f);
    // Diagonal of E(eps), replicated across fiber components.
    std::vector<double> exponential_diag(double eps) const;
};

Matrix family_matrix(const ConjugatedFamily& family, double eps);

// k-th epsilon-derivative of the family at eps = 0 (no 1/k! factor):
//   eta^k * sum_l C(k,l) diag(f)^{k-l} * P * diag(f)^l.
Matrix derivative_matrix(const ConjugatedFamily& family, int k);

struct BoundSample {
    double lhs;  // ||(1/k!) d^k A u||
    double rhs;  // (2|eta| ||f||_inf)^k / k! * ||A u||
    bool pass;
};

struct BoundReport {
    int k;
    std::vector<BoundSample> samples;
    bool all_pass;
};

// Checks ||A^(k) u|| <= (2|eta| ||f||_inf)^k / k! * ||A u|| on sample sections
// (norms in the quadrature-weighted inner product).
BoundReport derivative_bound_check(const ConjugatedFamily& family, int k,
                                   const std::vector<std::vector<double>>& samples);

// Arc length of the deformed circle, L = integral of e^{eps*f/2}.
double deformed_circle_length(const Domain& domain, const ConformalFactor& factor, double eps);

// Exact deformed Dirac eigenvalues (2pi/L)*(k + offset) for |k| <= max_mode,
// sorted ascending (each appears once; real multiplicity is 2).
std::vector<double> dirac_oracle_spectrum(const CovariantOperator& op,
                                          const ConformalFactor& factor, double eps,
                                          int max_mode);

}  // namespace confspec
