#include "flagf/metricgeom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flagf {

namespace {

constexpr double kSplitTol = 1e-10;

void require_in_m(const TripleSplit& split, const LieElement& x, const char* what)
{
    if (x.n() != split.n)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    if (!split.adapted->contains(x, tol::num))
        throw std::invalid_argument(std::string(what) + ": argument is not in m");
}

std::vector<double> block_weights(const TripleSplit& split, const MetricParams& p)
{
    const double w[3] = {1.0, p.s, p.t};
    std::vector<double> out(static_cast<std::size_t>(split.adapted->dim()));
    for (int j = 0; j < split.adapted->dim(); ++j)
        out[j] = p.kappa * w[split.block_of(j)];
    return out;
}

}  // namespace

const Subspace& TripleSplit::block(int i) const
{
    switch (i) {
    case 0: return *m1;
    case 1: return *m2;
    case 2: return *m3;
    }
    throw std::out_of_range("TripleSplit::block");
}

int TripleSplit::block_of(int j) const
{
    if (j < m1->dim())
        return 0;
    if (j < m1->dim() + m2->dim())
        return 1;
    return 2;
}

LieElement TripleSplit::part(int i, const LieElement& x) const
{
    return block(i).project(x);
}

MetricParams MetricParams::make(double s, double t, double kappa)
{
    if (!(s > 0.0) || !(t > 0.0) || !(kappa > 0.0) || !std::isfinite(s) || !std::isfinite(t) ||
        !std::isfinite(kappa))
        throw std::invalid_argument("MetricParams: s, t and kappa must be positive and finite");
    return {s, t, kappa};
}

MetricParams MetricParams::for_space(int n, double s, double t)
{
    return make(s, t, static_cast<double>(n - 1));
}

TripleSplit build_split(const PhiSpace& ps)
{
    if (ps.spec.m_blocks != 1 || ps.spec.n < 4)
        throw std::invalid_argument("build_split: needs the m_blocks = 1 flag space with n >= 4");
    const int n = ps.spec.n;
    const double r = 1.0 / std::sqrt(2.0);

    std::vector<LieElement> b1{r * LieElement::unit(n, 0, 1), r * LieElement::unit(n, 0, 2)};
    std::vector<LieElement> b2, b3;
    for (int j = 3; j < n; ++j)
        b2.push_back(r * LieElement::unit(n, 1, j));
    for (int j = 3; j < n; ++j)
        b2.push_back(r * LieElement::unit(n, 2, j));
    for (int j = 3; j < n; ++j)
        b3.push_back(r * LieElement::unit(n, 0, j));

    std::vector<LieElement> all = b1;
    all.insert(all.end(), b2.begin(), b2.end());
    all.insert(all.end(), b3.begin(), b3.end());

    TripleSplit split;
    split.n = n;
    split.m1 = std::make_shared<const Subspace>(n, std::move(b1));
    split.m2 = std::make_shared<const Subspace>(n, std::move(b2));
    split.m3 = std::make_shared<const Subspace>(n, std::move(b3));
    split.adapted = std::make_shared<const Subspace>(n, std::move(all));
    split.h = ps.h;

    const SplitChecks c = check_split(split, ps);
    if (!c.spans_m || c.orthogonality > kSplitTol || c.adh_invariance > kSplitTol ||
        c.bracket_relations > kSplitTol)
        throw std::runtime_error("build_split: coordinate blocks do not split m for this space");
    return split;
}

SplitChecks check_split(const TripleSplit& split, const PhiSpace& ps)
{
    SplitChecks c;
    c.dims = {split.m1->dim(), split.m2->dim(), split.m3->dim()};
    c.spans_m = decompose_orthogonal(*ps.m, {*split.m1, *split.m2, *split.m3}, kSplitTol);

    for (int i = 0; i < 3; ++i) {
        for (const auto& x : split.block(i).basis()) {
            for (int j = i + 1; j < 3; ++j)
                for (const auto& y : split.block(j).basis())
                    c.orthogonality = std::max(c.orthogonality, std::abs(trace_form(x, y)));
            for (const auto& h : ps.h->basis()) {
                c.orthogonality = std::max(c.orthogonality, std::abs(trace_form(x, h)));
                c.adh_invariance = std::max(c.adh_invariance, split.block(i).distance(bracket(h, x)));
            }
        }
    }

    // [m_i, m_i] lands in h, [m_i, m_j] in the third block.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Subspace& target = i == j ? *ps.h : split.block(3 - i - j);
            for (const auto& x : split.block(i).basis())
                for (const auto& y : split.block(j).basis())
                    c.bracket_relations = std::max(c.bracket_relations, target.distance(bracket(x, y)));
        }
    return c;
}

Eigen::MatrixXd gram_matrix(const TripleSplit& split, const MetricParams& p)
{
    const int d = split.adapted->dim();
    Eigen::MatrixXd g(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            g(a, b) = metric_eval(split, p, (*split.adapted)[a], (*split.adapted)[b]);
    return g;
}

double metric_eval(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                   const LieElement& y)
{
    require_in_m(split, x, "metric_eval");
    require_in_m(split, y, "metric_eval");
    double acc = trace_form(split.part(0, x), split.part(0, y));
    acc += p.s * trace_form(split.part(1, x), split.part(1, y));
    acc += p.t * trace_form(split.part(2, x), split.part(2, y));
    return p.kappa * acc;
}

std::array<LieElement, 3> u_components(const TripleSplit& split, const LieElement& x,
                                       const LieElement& y)
{
    const LieElement x1 = split.part(0, x), x2 = split.part(1, x), x3 = split.part(2, x);
    const LieElement y1 = split.part(0, y), y2 = split.part(1, y), y3 = split.part(2, y);
    return {bracket(x1, y2) + bracket(y1, x2), bracket(x1, y3) + bracket(y1, x3),
            bracket(x2, y3) + bracket(y2, x3)};
}

std::array<double, 3> u_weights(double s, double t)
{
    return {(s - 1.0) / (2.0 * t), (t - 1.0) / (2.0 * s), (t - s) / 2.0};
}

LieElement u_tensor_closed(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                           const LieElement& y)
{
    require_in_m(split, x, "u_tensor_closed");
    require_in_m(split, y, "u_tensor_closed");
    const auto parts = u_components(split, x, y);
    const auto w = u_weights(p.s, p.t);
    return w[0] * parts[0] + w[1] * parts[1] + w[2] * parts[2];
}

LieElement u_tensor_solved(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                           const LieElement& y)
{
    require_in_m(split, x, "u_tensor_solved");
    require_in_m(split, y, "u_tensor_solved");
    const Subspace& m = *split.adapted;
    const int d = m.dim();

    const Eigen::MatrixXd g = gram_matrix(split, p);
    Eigen::VectorXd rhs(d);
    for (int c = 0; c < d; ++c) {
        const LieElement& z = m[c];
        rhs(c) = metric_eval(split, p, x, m.project(bracket(z, y))) +
                 metric_eval(split, p, m.project(bracket(z, x)), y);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(2.0 * g);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::runtime_error("u_tensor_solved: Gram matrix is singular");
    return m.element(ldlt.solve(rhs));
}

LieElement u_tensor(UMethod method, const TripleSplit& split, const MetricParams& p,
                    const LieElement& x, const LieElement& y)
{
    return method == UMethod::Closed ? u_tensor_closed(split, p, x, y) : u_tensor_solved(split, p, x, y);
}

LieElement nomizu(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                  const LieElement& y, UMethod method)
{
    return 0.5 * split.adapted->project(bracket(x, y)) + u_tensor(method, split, p, x, y);
}

NaturalReductivity check_naturally_reductive(const TripleSplit& split, const MetricParams& p)
{
    const Subspace& m = *split.adapted;
    const int d = m.dim();
    const std::vector<double> w = block_weights(split, p);

    // coords of [e_a, e_b]_m
    std::vector<Eigen::VectorXd> br(static_cast<std::size_t>(d) * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            br[a * d + b] = m.coords(bracket(m[a], m[b]));

    NaturalReductivity out;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                // g([X,Y]_m, Z) with Z = e_c, g(X, [Y,Z]_m) with X = e_a
                const double lhs = w[c] * br[a * d + b](c);
                const double rhs = w[a] * br[b * d + c](a);
                out.residual = std::max(out.residual, std::abs(lhs - rhs) / p.kappa);
            }
    out.holds = out.residual < tol::num;
    return out;
}

}  // namespace flagf
