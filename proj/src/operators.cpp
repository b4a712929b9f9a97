#include "confspec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace confspec {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

// 1D positive Fourier Laplacian -d^2/dx^2 on n uniform points: circulant with
// symbol k^2 over modes k = -n/2+1 .. n/2.
Matrix fourier_laplacian_1d(int n) {
    std::vector<double> stencil(n, 0.0);
    for (int d = 0; d < n; ++d) {
        const double theta = two_pi * d / n;
        double s = 0.0;
        for (int k = -n / 2 + 1; k <= n / 2; ++k)
            s += static_cast<double>(k) * k * std::cos(k * theta);
        stencil[d] = s / n;
    }
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = stencil[((i - j) % n + n) % n];
    return a;
}
}  // namespace

std::vector<double> CovariantOperator::entry_weights() const {
    std::vector<double> w;
    w.reserve(size());
    for (int c = 0; c < rank; ++c)
        w.insert(w.end(), domain->quad_weights.begin(), domain->quad_weights.end());
    return w;
}

CovariantOperator conformal_laplacian_torus(const Domain& domain) {
    if (domain.kind != DomainKind::torus2)
        throw std::invalid_argument("conformal_laplacian_torus: torus2 domain required");
    const int n = domain.resolution;
    const Matrix a1 = fourier_laplacian_1d(n);

    CovariantOperator op;
    op.name = "conformal_laplacian";
    op.bidegree = {0.0, 2.0};
    op.rank = 1;
    op.order = 2;
    op.domain = &domain;
    op.background = Matrix(domain.node_count(), domain.node_count());
    // Kronecker sum over the product grid; node index j*n + k.
    for (int j1 = 0; j1 < n; ++j1)
        for (int k1 = 0; k1 < n; ++k1) {
            const std::size_t i1 = static_cast<std::size_t>(j1) * n + k1;
            for (int j2 = 0; j2 < n; ++j2)
                op.background(i1, static_cast<std::size_t>(j2) * n + k1) += a1(j1, j2);
            for (int k2 = 0; k2 < n; ++k2)
                op.background(i1, static_cast<std::size_t>(j1) * n + k2) += a1(k1, k2);
        }
    return op;
}

CovariantOperator dirac_circle(const Domain& domain, SpinStructure spin) {
    if (domain.kind != DomainKind::circle)
        throw std::invalid_argument("dirac_circle: circle domain required");
    const int n = domain.resolution;
    const double sigma = (spin == SpinStructure::antiperiodic) ? 0.5 : 0.0;

    // Complex symbol matrix C_{jl} = (1/n) sum_k (k+sigma) e^{i(k+sigma)(th_j-th_l)},
    // modes k = -n/2 .. n/2-1. Hermitian; embedded as the real form [[X,-Y],[Y,X]].
    // The half-integer phase makes C depend on the signed offset j-l, so the
    // tables run over d in (-n, n).
    std::vector<double> re(2 * n - 1), im(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) {
        const double theta = two_pi * d / n;
        double sr = 0.0, si = 0.0;
        for (int k = -n / 2; k <= n / 2 - 1; ++k) {
            const double mu = k + sigma;
            sr += mu * std::cos(mu * theta);
            si += mu * std::sin(mu * theta);
        }
        re[d + n - 1] = sr / n;
        im[d + n - 1] = si / n;
    }

    CovariantOperator op;
    op.name = "dirac";
    op.bidegree = {0.0, 1.0};
    op.rank = 2;
    op.order = 1;
    op.domain = &domain;
    op.has_arclength_oracle = true;
    op.spin_offset = sigma;
    const std::size_t nn = domain.node_count();
    op.background = Matrix(2 * nn, 2 * nn);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const int d = j - l + n - 1;
            const double X = re[d], Y = im[d];
            op.background(j, l) = X;
            op.background(j, nn + l) = -Y;
            op.background(nn + j, l) = Y;
            op.background(nn + j, nn + l) = X;
        }
    return op;
}

CovariantOperator synthetic_power(const CovariantOperator& base, int power, Bidegree bidegree) {
    if (power < 1) throw std::invalid_argument("synthetic_power: power must be >= 1");
    if (bidegree.a == bidegree.b)
        throw std::invalid_argument("synthetic_power: bidegree must have a != b");

    CovariantOperator op;
    op.name = base.name + "^" + std::to_string(power);
    op.bidegree = bidegree;
    op.rank = base.rank;
    op.order = base.order * power;
    op.domain = base.domain;
    op.synthetic = true;
    op.background = base.background;
    for (int p = 1; p < power; ++p) op.background = matmul(op.background, base.background);
    return op;
}

ConjugatedFamily::ConjugatedFamily(const CovariantOperator& o, ConformalFactor f)
    : op(&o), factor(std::move(f)) {
    if (factor.values.size() != o.domain->node_count())
        throw std::invalid_argument("ConjugatedFamily: factor/domain mismatch");
    const double eta = o.bidegree.eta();
    eta_f.reserve(factor.values.size());
    for (double v : factor.values) eta_f.push_back(eta * v);
}

std::vector<double> ConjugatedFamily::exponential_diag(double eps) const {
    const std::size_t nn = op->domain->node_count();
    std::vector<double> e(op->size());
    for (std::size_t x = 0; x < nn; ++x) {
        const double v = std::exp(eps * eta_f[x]);
        for (int c = 0; c < op->rank; ++c) e[static_cast<std::size_t>(c) * nn + x] = v;
    }
    return e;
}

Matrix family_matrix(const ConjugatedFamily& family, double eps) {
    if (!std::isfinite(eps)) throw std::invalid_argument("family_matrix: eps must be finite");
    if (eps == 0.0) return family.op->background;
    const std::vector<double> e = family.exponential_diag(eps);
    return scale_rows(scale_cols(family.op->background, e), e);
}

Matrix derivative_matrix(const ConjugatedFamily& family, int k) {
    if (k < 1) throw std::invalid_argument("derivative_matrix: k must be >= 1");
    const std::size_t nn = family.op->domain->node_count();
    const std::size_t n = family.op->size();
    const double eta = family.op->bidegree.eta();

    // f^p replicated over fiber components, for p = 0..k.
    auto f_power = [&](int p) {
        std::vector<double> d(n);
        for (std::size_t x = 0; x < nn; ++x) {
            const double v = std::pow(family.factor.values[x], p);
            for (int c = 0; c < family.op->rank; ++c) d[static_cast<std::size_t>(c) * nn + x] = v;
        }
        return d;
    };

    Matrix result(n, n);
    double binom = 1.0;
    for (int l = 0; l <= k; ++l) {
        const Matrix term = scale_rows(scale_cols(family.op->background, f_power(l)), f_power(k - l));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) result(i, j) += binom * term(i, j);
        binom = binom * (k - l) / (l + 1);
    }
    const double etak = std::pow(eta, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) result(i, j) *= etak;
    return result;
}

BoundReport derivative_bound_check(const ConjugatedFamily& family, int k,
                                   const std::vector<std::vector<double>>& samples) {
    BoundReport report{k, {}, true};
    const Matrix dk = derivative_matrix(family, k);
    const Matrix& a = family.op->background;
    const std::vector<double> w = family.op->entry_weights();
    const double eta = family.op->bidegree.eta();

    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    const double factor = std::pow(2.0 * std::abs(eta) * family.factor.sup_norm, k) / kfact;

    for (const auto& u : samples) {
        if (u.size() != a.rows())
            throw std::invalid_argument("derivative_bound_check: sample size mismatch");
        const std::vector<double> dku = matvec(dk, u);
        const std::vector<double> au = matvec(a, u);
        BoundSample s;
        s.lhs = std::sqrt(inner_product(dku, dku, w)) / kfact;
        s.rhs = factor * std::sqrt(inner_product(au, au, w));
        s.pass = s.lhs <= s.rhs * (1.0 + 1e-8);
        report.all_pass = report.all_pass && s.pass;
        report.samples.push_back(s);
    }
    return report;
}

double deformed_circle_length(const Domain& domain, const ConformalFactor& factor, double eps) {
    double L = 0.0;
    for (std::size_t i = 0; i < domain.node_count(); ++i)
        L += domain.quad_weights[i] * std::exp(eps * factor.values[i] / 2.0);
    return L;
}

std::vector<double> dirac_oracle_spectrum(const CovariantOperator& op,
                                          const ConformalFactor& factor, double eps,
                                          int max_mode) {
    if (!op.has_arclength_oracle)
        throw std::invalid_argument("dirac_oracle_spectrum: operator has no arc-length oracle");
    const double L = deformed_circle_length(*op.domain, factor, eps);
    const double scale = two_pi / L;
    std::vector<double> evs;
    if (op.spin_offset == 0.0) {
        for (int k = -max_mode; k <= max_mode; ++k) evs.push_back(scale * k);
    } else {
        // k + 1/2 for k = -max_mode .. max_mode-1: symmetric half-integers.
        for (int k = -max_mode; k <= max_mode - 1; ++k) evs.push_back(scale * (k + 0.5));
    }
    std::sort(evs.begin(), evs.end());
    return evs;
}

}  // namespace confspec
