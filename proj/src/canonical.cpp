#include "flagf/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flagf {

namespace {

constexpr double kDedupTol = 10.0 * tol::num;

std::string signature_id(char prefix, const std::vector<int>& sig)
{
    std::string s(1, prefix);
    s += '[';
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(sig[i]);
    }
    s += ']';
    return s;
}

// Calls fn for every tuple over `alphabet` of the given length, first
// coordinate varying slowest.
template <class Fn>
void for_each_tuple(const std::vector<int>& alphabet, int length, Fn&& fn)
{
    std::vector<std::size_t> idx(static_cast<std::size_t>(length), 0);
    std::vector<int> tuple(static_cast<std::size_t>(length));
    while (true) {
        for (int i = 0; i < length; ++i)
            tuple[i] = alphabet[idx[i]];
        fn(tuple);
        int pos = length - 1;
        while (pos >= 0 && ++idx[pos] == alphabet.size()) {
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0)
            return;
    }
}

double op_distance(const EndoOnM& a, const EndoOnM& b)
{
    if (a.dim() == 0)
        return 0.0;
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

double op_sum_norm(const EndoOnM& a, const EndoOnM& b)
{
    if (a.dim() == 0)
        return 0.0;
    return (a.matrix() + b.matrix()).cwiseAbs().maxCoeff();
}

double commutator_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.size() == 0)
        return 0.0;
    return (a * b - b * a).cwiseAbs().maxCoeff();
}

bool first_nonzero_positive(const std::vector<int>& sig)
{
    for (int v : sig)
        if (v != 0)
            return v > 0;
    return false;
}

}  // namespace

std::string_view to_string(StructureKind kind)
{
    switch (kind) {
    case StructureKind::FStructure: return "f-structure";
    case StructureKind::AlmostProduct: return "almost-product";
    case StructureKind::AlmostComplex: return "almost-complex";
    }
    return "unknown";
}

int u_of_k(int k)
{
    if (k < 3)
        throw std::invalid_argument("u_of_k: k must be >= 3");
    return k % 2 == 1 ? (k - 1) / 2 : k / 2 - 1;
}

std::vector<double> f_polynomial(int k, const std::vector<int>& zeta)
{
    const int u = u_of_k(k);
    if (static_cast<int>(zeta.size()) != u)
        throw std::invalid_argument("f_polynomial: zeta must have u entries");
    std::vector<double> a(static_cast<std::size_t>(k), 0.0);
    for (int m = 1; m <= u; ++m) {
        double c = 0.0;
        for (int j = 1; j <= u; ++j)
            c += zeta[j - 1] * std::sin(2.0 * std::numbers::pi * m * j / k);
        c *= 2.0 / k;
        a[m] += c;
        a[k - m] -= c;
    }
    return a;
}

std::vector<double> product_polynomial(int k, const std::vector<int>& xi)
{
    const int u = u_of_k(k);
    const bool even = k % 2 == 0;
    if (static_cast<int>(xi.size()) != (even ? u + 1 : u))
        throw std::invalid_argument("product_polynomial: wrong number of signs");
    std::vector<double> a(static_cast<std::size_t>(k), 0.0);
    for (int m = 0; m < k; ++m) {
        double c = 0.0;
        for (int j = 1; j <= u; ++j)
            c += xi[j - 1] * std::cos(2.0 * std::numbers::pi * m * j / k);
        if (even)
            a[m] = (2.0 * c + (m % 2 == 0 ? 1.0 : -1.0) * xi[u]) / k;
        else
            a[m] = 2.0 * c / k;
    }
    return a;
}

EndoOnM polynomial_in(const EndoOnM& theta, const std::vector<double>& coeffs)
{
    const int d = theta.dim();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
    for (double c : coeffs) {
        acc += c * p;
        p = p * theta.matrix();
    }
    return EndoOnM(theta.domain(), std::move(acc));
}

std::vector<NamedPolynomial> named_f_structures(int k)
{
    const double r3 = std::sqrt(3.0);
    if (k == 4)
        return {{"f0", {0.0, 0.5, 0.0, -0.5}}};
    if (k == 6)
        return {
            {"f1", {0.0, 1 / r3, 0.0, 0.0, 0.0, -1 / r3}},
            {"f2", {0.0, 1 / (2 * r3), -1 / (2 * r3), 0.0, 1 / (2 * r3), -1 / (2 * r3)}},
            {"f3", {0.0, 1 / (2 * r3), 1 / (2 * r3), 0.0, -1 / (2 * r3), -1 / (2 * r3)}},
            {"f4", {0.0, 0.0, 1 / r3, 0.0, -1 / r3, 0.0}},
        };
    return {};
}

std::vector<CanonicalStructure> generate_f_structures(const PhiSpace& ps)
{
    const int k = ps.order;
    const int u = u_of_k(k);
    std::vector<std::pair<std::string, EndoOnM>> named;
    for (const auto& np : named_f_structures(k))
        named.emplace_back(np.name, polynomial_in(ps.theta, np.coeffs));

    std::vector<CanonicalStructure> out;
    for_each_tuple({-1, 0, 1}, u, [&](const std::vector<int>& zeta) {
        if (std::all_of(zeta.begin(), zeta.end(), [](int z) { return z == 0; }))
            return;
        std::vector<double> coeffs = f_polynomial(k, zeta);
        EndoOnM op = polynomial_in(ps.theta, coeffs);
        for (const auto& prev : out)
            if (op_distance(prev.op, op) <= kDedupTol)
                return;

        std::string id = signature_id('f', zeta);
        for (const auto& [name, nop] : named) {
            if (op_distance(nop, op) <= kDedupTol)
                id = name;
            else if (op_sum_norm(nop, op) <= kDedupTol)
                id = "-" + name;
        }
        const int d = op.dim();
        const bool complex =
            d > 0 && (op.matrix() * op.matrix() + Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <=
                         kDedupTol;
        out.push_back({complex ? StructureKind::AlmostComplex : StructureKind::FStructure,
                       std::move(id), zeta, std::move(coeffs), std::move(op)});
    });
    return out;
}

std::vector<CanonicalStructure> generate_product_structures(const PhiSpace& ps)
{
    const int k = ps.order;
    const int u = u_of_k(k);
    const int len = k % 2 == 0 ? u + 1 : u;
    std::vector<CanonicalStructure> out;
    for_each_tuple({-1, 1}, len, [&](const std::vector<int>& xi) {
        std::vector<double> coeffs = product_polynomial(k, xi);
        EndoOnM op = polynomial_in(ps.theta, coeffs);
        for (const auto& prev : out)
            if (op_distance(prev.op, op) <= kDedupTol)
                return;
        out.push_back({StructureKind::AlmostProduct, signature_id('P', xi), xi, std::move(coeffs),
                       std::move(op)});
    });
    return out;
}

namespace {

bool is_positive_rep(const CanonicalStructure& s)
{
    const bool named = s.id.find('[') == std::string::npos;
    if (named)
        return s.id.front() != '-';
    return first_nonzero_positive(s.signature);
}

}  // namespace

std::vector<CanonicalStructure> up_to_sign(const std::vector<CanonicalStructure>& list)
{
    std::vector<bool> taken(list.size(), false);
    std::vector<CanonicalStructure> reps;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (taken[i])
            continue;
        taken[i] = true;
        std::size_t rep = i;
        for (std::size_t j = i + 1; j < list.size(); ++j) {
            if (!taken[j] && op_sum_norm(list[i].op, list[j].op) <= kDedupTol) {
                taken[j] = true;
                if (!is_positive_rep(list[i]) && is_positive_rep(list[j]))
                    rep = j;
                break;
            }
        }
        reps.push_back(list[rep]);
    }
    std::stable_sort(reps.begin(), reps.end(),
                     [](const auto& a, const auto& b) { return a.id < b.id; });
    return reps;
}

int count_up_to_sign(const std::vector<CanonicalStructure>& list)
{
    return static_cast<int>(up_to_sign(list).size());
}

const CanonicalStructure* find_structure(const std::vector<CanonicalStructure>& list,
                                         std::string_view id)
{
    for (const auto& s : list)
        if (s.id == id)
            return &s;
    return nullptr;
}

double f_identity_residual(const EndoOnM& op)
{
    if (op.dim() == 0)
        return 0.0;
    const Eigen::MatrixXd& f = op.matrix();
    return (f * f * f + f).cwiseAbs().maxCoeff();
}

double product_identity_residual(const EndoOnM& op)
{
    const int d = op.dim();
    if (d == 0)
        return 0.0;
    const Eigen::MatrixXd& p = op.matrix();
    return (p * p - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
}

EndoOnM ad_on_m(const PhiSpace& ps, const LieElement& h)
{
    return EndoOnM::from_map(ps.m, [&](const LieElement& x) { return bracket(h, x); });
}

StructureCheck verify_structure(const CanonicalStructure& cs, const PhiSpace& ps,
                                const std::vector<CanonicalStructure>& others)
{
    StructureCheck c;
    c.identity_residual = cs.kind == StructureKind::AlmostProduct ? product_identity_residual(cs.op)
                                                                  : f_identity_residual(cs.op);
    for (const auto& h : ps.h->basis())
        c.equivariance_residual =
            std::max(c.equivariance_residual, commutator_norm(ad_on_m(ps, h).matrix(), cs.op.matrix()));
    for (const auto& o : others)
        c.commutator_residual =
            std::max(c.commutator_residual, commutator_norm(cs.op.matrix(), o.op.matrix()));
    c.theta_commutator = commutator_norm(cs.op.matrix(), ps.theta.matrix());
    c.polynomial_residual = op_distance(cs.op, polynomial_in(ps.theta, cs.theta_polynomial));
    return c;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd golden_action(std::string_view name, const Eigen::MatrixXd& s)
{
    const Eigen::Index n = s.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    auto set = [&](Eigen::Index i, Eigen::Index j, double v) {
        out(i, j) = v;
        out(j, i) = -v;
    };
    // m_1 block: (s12, s13) -> (s13, -s12)
    const bool rotate_m1 = name == "f0" || name == "f1" || name == "f3" || name == "f4";
    // m_2 block: (s2j, s3j) -> sign * (-s3j, s2j)
    double m2_sign = 0.0;
    if (name == "f0" || name == "f1" || name == "f2")
        m2_sign = 1.0;
    else if (name == "f4")
        m2_sign = -1.0;
    else if (name != "f3")
        throw std::invalid_argument("golden_action: unknown structure");

    if (rotate_m1) {
        set(0, 1, s(0, 2));
        set(0, 2, -s(0, 1));
    }
    for (Eigen::Index j = 3; j < n; ++j) {
        set(1, j, -m2_sign * s(2, j));
        set(2, j, m2_sign * s(1, j));
    }
    return out;
}

GoldenReport golden_action_check(const PhiSpace& ps, double eps)
{
    if (ps.spec.m_blocks != 1 || (ps.order != 4 && ps.order != 6))
        throw std::invalid_argument("golden_action_check: needs the m_blocks = 1 space with k in {4, 6}");
    const int n = ps.spec.n;
    const auto structures = generate_f_structures(ps);

    // Coordinate positions of m, zero-based.
    std::vector<std::pair<int, int>> slots = {{0, 1}, {0, 2}};
    for (int j = 3; j < n; ++j)
        slots.emplace_back(0, j);
    for (int j = 3; j < n; ++j)
        slots.emplace_back(1, j);
    for (int j = 3; j < n; ++j)
        slots.emplace_back(2, j);

    GoldenReport rep;
    for (const auto& named : named_f_structures(ps.order)) {
        const CanonicalStructure* cs = find_structure(structures, named.name);
        if (!cs) {
            rep.mismatches.push_back({named.name, "missing", 0, 0, 0.0, 0.0});
            continue;
        }
        ++rep.structures_checked;

        auto compare = [&](const std::string& label, const Eigen::MatrixXd& s) {
            ++rep.inputs_checked;
            const Eigen::MatrixXd expected = golden_action(named.name, s);
            const Eigen::MatrixXd actual = cs->op.apply(LieElement(s)).matrix();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double dev = std::abs(expected(i, j) - actual(i, j));
                    rep.max_deviation = std::max(rep.max_deviation, dev);
                    if (dev > eps)
                        rep.mismatches.push_back(
                            {named.name, label, i + 1, j + 1, expected(i, j), actual(i, j)});
                }
        };

        Eigen::MatrixXd general = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t idx = 0; idx < slots.size(); ++idx) {
            const auto [i, j] = slots[idx];
            const LieElement unit = LieElement::unit(n, i, j);
            compare("s" + std::to_string(i + 1) + std::to_string(j + 1), unit.matrix());
            general += (1.0 + 0.125 * static_cast<double>(idx)) * unit.matrix();
        }
        compare("general", general);
    }
    return rep;
}

}  // namespace flagf
