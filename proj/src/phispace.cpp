#include "flagf/phispace.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace flagf {

AutomorphismSpec build_automorphism(int n, int m_blocks, int k)
{
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("build_automorphism: " + what);
    };
    if (n < 4)
        fail("n must be >= 4");
    if (m_blocks < 1)
        fail("m_blocks must be >= 1");
    if (k % 2 != 0)
        fail("k must be even");
    if (k <= 2)
        fail("k must be > 2");
    if (k < 2 * m_blocks - 2)
        fail("k must be >= 2*m_blocks - 2");
    if (n - 2 * m_blocks - 1 < 0)
        fail("n - 2*m_blocks - 1 must be >= 0");

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    B(0, 0) = 1.0;
    for (int t = 1; t <= m_blocks; ++t) {
        const double a = 2.0 * std::numbers::pi * t / k;
        const int r = 2 * t - 1;
        B(r, r) = std::cos(a);
        B(r, r + 1) = std::sin(a);
        B(r + 1, r) = -std::sin(a);
        B(r + 1, r + 1) = std::cos(a);
    }
    for (int i = 2 * m_blocks + 1; i < n; ++i)
        B(i, i) = -1.0;
    return {n, m_blocks, k, std::move(B)};
}

int expected_isotropy_dim(int n, int m_blocks)
{
    const int rest = n - 2 * m_blocks - 1;
    return m_blocks + rest * (rest - 1) / 2;
}

int operator_order(const EndoOnM& phi, int max_order)
{
    const int d = phi.dim();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd p = id;
    for (int j = 1; j <= max_order; ++j) {
        p = p * phi.matrix();
        if ((p - id).cwiseAbs().maxCoeff() <= tol::num)
            return j;
    }
    return 0;
}

PhiSpace build_phi_space_from_conjugator(const Eigen::MatrixXd& B, int order)
{
    const int n = static_cast<int>(B.rows());
    if (B.cols() != n)
        throw std::invalid_argument("build_phi_space: conjugator must be square");
    if ((B.transpose() * B - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > tol::num)
        throw std::invalid_argument("build_phi_space: conjugator is not orthogonal");

    auto g = std::make_shared<const Subspace>(Subspace::full(n));
    EndoOnM phi = EndoOnM::from_map(g, [&](const LieElement& x) {
        return LieElement(Eigen::MatrixXd(B * x.matrix() * B.transpose()));
    });
    const int found = operator_order(phi, order);
    if (found != order)
        throw std::runtime_error("build_phi_space: conjugation has order " + std::to_string(found) +
                                 ", expected " + std::to_string(order));

    const EndoOnM a = phi - EndoOnM::identity(g);
    auto h = std::make_shared<const Subspace>(nullspace(a));
    auto m = std::make_shared<const Subspace>(image(a));
    EndoOnM theta = EndoOnM::from_map(m, [&](const LieElement& x) { return phi.apply(x); });

    AutomorphismSpec spec{n, 0, order, B};
    return PhiSpace{std::move(spec), order, std::move(g), std::move(phi),
                    std::move(h), std::move(m), std::move(theta)};
}

PhiSpace build_phi_space(const AutomorphismSpec& spec)
{
    PhiSpace ps = build_phi_space_from_conjugator(spec.B, spec.k);
    ps.spec = spec;
    return ps;
}

RegularityReport check_regularity(const PhiSpace& ps)
{
    RegularityReport r;
    const int big_n = ps.g->dim();
    const EndoOnM a = ps.phi - EndoOnM::identity(ps.g);

    // g = h + A g: dimensions add up and the union spans g.
    {
        Eigen::MatrixXd cols(big_n, ps.h->dim() + ps.m->dim());
        for (int j = 0; j < ps.h->dim(); ++j)
            cols.col(j) = ps.g->coords((*ps.h)[j]);
        for (int j = 0; j < ps.m->dim(); ++j)
            cols.col(ps.h->dim() + j) = ps.g->coords((*ps.m)[j]);
        r.direct_sum = ps.h->dim() + ps.m->dim() == big_n && numerical_rank(cols) == big_n;
    }

    // A restricted to A g, read off as an operator on m.
    {
        const int d = ps.m->dim();
        if (d == 0) {
            r.restricted_nonsingular = true;
            r.min_singular_restricted = 0.0;
        } else {
            Eigen::MatrixXd am(d, d);
            double leak = 0.0;
            for (int j = 0; j < d; ++j) {
                const LieElement y = a.apply((*ps.m)[j]);
                am.col(j) = ps.m->coords(y);
                leak = std::max(leak, ps.m->distance(y));
            }
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(am);
            r.min_singular_restricted = svd.singularValues()(d - 1);
            r.restricted_nonsingular = leak <= tol::num && r.min_singular_restricted > tol::num;
        }
    }

    // ker A^2 = ker A
    {
        const Eigen::MatrixXd a2 = a.matrix() * a.matrix();
        r.kernel_stable = nullspace_basis(a2).cols() == nullspace_basis(a.matrix()).cols();
    }

    // Eigenvalues of theta stay away from 1.
    {
        const int d = ps.theta.dim();
        if (d == 0) {
            r.theta_no_unit_eigenvalue = true;
        } else {
            Eigen::EigenSolver<Eigen::MatrixXd> es(ps.theta.matrix(), false);
            double gap = std::numeric_limits<double>::infinity();
            for (int i = 0; i < d; ++i)
                gap = std::min(gap, std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0)));
            r.min_eigen_gap = gap;
            r.theta_no_unit_eigenvalue = gap > 1e-6;
        }
    }
    return r;
}

}  // namespace flagf
