#include "flagf/canonical.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace flagf;

namespace {

const double kPi = std::acos(-1.0);

PhiSpace space(int n, int k)
{
    return build_phi_space(build_automorphism(n, 1, k));
}

// f(theta) evaluated on an eigenvalue exp(i a) of theta:
// (2/k) sum_m (sum_j z_j sin(2 pi m j / k)) * 2 i sin(m a)
double f_symbol(int k, const std::vector<int>& zeta, double a)
{
    const int u = k % 2 == 0 ? k / 2 - 1 : (k - 1) / 2;
    double acc = 0.0;
    for (int m = 1; m <= u; ++m) {
        double w = 0.0;
        for (int j = 1; j <= u; ++j)
            w += zeta[static_cast<std::size_t>(j - 1)] * std::sin(2 * kPi * m * j / k);
        acc += 2.0 / k * w * 2.0 * std::sin(m * a);
    }
    return acc;  // imaginary part; the real part vanishes
}

double poly_symbol_im(const std::vector<double>& c, double a)
{
    double im = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m)
        im += c[m] * std::sin(static_cast<double>(m) * a);
    return im;
}

double poly_symbol_re(const std::vector<double>& c, double a)
{
    double re = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m)
        re += c[m] * std::cos(static_cast<double>(m) * a);
    return re;
}

Eigen::MatrixXd random_skew(int n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = u(rng);
            m(j, i) = -m(i, j);
        }
    return m;
}

}  // namespace

TEST_CASE("u_of_k")
{
    CHECK(u_of_k(4) == 1);
    CHECK(u_of_k(6) == 2);
    CHECK(u_of_k(7) == 3);
    CHECK(u_of_k(8) == 3);
    CHECK_THROWS_AS(u_of_k(2), std::invalid_argument);
}

TEST_CASE("f coefficients agree with the sine sum on every k-th root of unity")
{
    for (int k : {4, 6, 8}) {
        const int u = u_of_k(k);
        std::vector<int> zeta(static_cast<std::size_t>(u), 0);
        for (int code = 0; code < static_cast<int>(std::pow(3, u)); ++code) {
            int c = code;
            for (int j = 0; j < u; ++j, c /= 3)
                zeta[static_cast<std::size_t>(j)] = c % 3 - 1;
            const auto coeffs = f_polynomial(k, zeta);
            REQUIRE(coeffs.size() == static_cast<std::size_t>(k));
            for (int r = 0; r < k; ++r) {
                const double a = 2 * kPi * r / k;
                CHECK(poly_symbol_im(coeffs, a) == doctest::Approx(f_symbol(k, zeta, a)).epsilon(1e-12));
                CHECK(std::abs(poly_symbol_re(coeffs, a)) < 1e-12);
            }
        }
    }
}

TEST_CASE("named order-4 and order-6 polynomials")
{
    const double r = 1.0 / std::sqrt(3.0);
    const double h = r / 2.0;
    const std::vector<std::pair<std::vector<int>, std::vector<double>>> six = {
        {{1, 1}, {0, r, 0, 0, 0, -r}},
        {{0, 1}, {0, h, -h, 0, h, -h}},
        {{1, 0}, {0, h, h, 0, -h, -h}},
        {{1, -1}, {0, 0, r, 0, -r, 0}},
    };
    for (const auto& [zeta, want] : six) {
        const auto got = f_polynomial(6, zeta);
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
    const auto f0 = f_polynomial(4, {1});
    CHECK(f0[1] == doctest::Approx(0.5));
    CHECK(f0[3] == doctest::Approx(-0.5));
    CHECK(std::abs(f0[0]) + std::abs(f0[2]) < 1e-15);
    CHECK(named_f_structures(4).size() == 1);
    CHECK(named_f_structures(6).size() == 4);
    CHECK(named_f_structures(8).empty());
}

TEST_CASE("structure counts")
{
    const PhiSpace p4 = space(5, 4);
    const auto f4 = generate_f_structures(p4);
    CHECK(f4.size() == 2);
    CHECK(count_up_to_sign(f4) == 1);
    CHECK(find_structure(f4, "f0") != nullptr);
    CHECK(find_structure(f4, "-f0") != nullptr);
    CHECK(generate_product_structures(p4).size() == 4);

    const PhiSpace p6 = space(6, 6);
    const auto f6 = generate_f_structures(p6);
    CHECK(f6.size() == 8);
    CHECK(count_up_to_sign(f6) == 4);
    const auto reps = up_to_sign(f6);
    REQUIRE(reps.size() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK(reps[static_cast<std::size_t>(i)].id == "f" + std::to_string(i + 1));
    CHECK(generate_product_structures(p6).size() == 8);
    CHECK(find_structure(f6, "f9") == nullptr);
}

TEST_CASE("order-4 product structure theta^2 is generated")
{
    const PhiSpace ps = space(5, 4);
    const EndoOnM t2 = ps.theta.pow(2);
    bool found = false;
    for (const auto& p : generate_product_structures(ps))
        found = found || (p.op - t2).max_norm() < 1e-12;
    CHECK(found);
}

TEST_CASE("order-6 product structures")
{
    const PhiSpace ps = space(6, 6);
    const auto prods = generate_product_structures(ps);
    auto generated = [&](const std::vector<double>& c) {
        const EndoOnM op = polynomial_in(ps.theta, c);
        for (const auto& p : prods)
            if ((p.op - op).max_norm() < 1e-12)
                return true;
        return false;
    };
    CHECK(generated({-1, 0, 0, 0, 0, 0}));
    CHECK(generated({0, 1.0 / 3, 1, 1.0 / 3, 1, 1.0 / 3}));
    CHECK(generated({0, 0, 0, 1, 0, 0}));
    CHECK(generated({0, -2.0 / 3, 0, 1.0 / 3, 0, -2.0 / 3}));

    // with theta^2 in the leading term the polynomial is not an involution
    const EndoOnM bad = polynomial_in(ps.theta, {0, 0, -2.0 / 3, 1.0 / 3, 0, -2.0 / 3});
    CHECK(product_identity_residual(bad) > 1.0);
    CHECK_FALSE(generated({0, 0, -2.0 / 3, 1.0 / 3, 0, -2.0 / 3}));
}

TEST_CASE("structure identities, equivariance and commutation")
{
    for (int k : {4, 6}) {
        const PhiSpace ps = space(7, k);
        auto all = generate_f_structures(ps);
        const auto prods = generate_product_structures(ps);
        all.insert(all.end(), prods.begin(), prods.end());
        for (const auto& cs : all) {
            const StructureCheck c = verify_structure(cs, ps, all);
            CHECK(c.ok(1e-10));
            if (cs.kind == StructureKind::AlmostProduct)
                CHECK(product_identity_residual(cs.op) < 1e-10);
            else
                CHECK(f_identity_residual(cs.op) < 1e-10);
        }
    }
}

TEST_CASE("ad(h) restricted to m is skew")
{
    const PhiSpace ps = space(6, 6);
    for (const auto& x : ps.h->basis()) {
        const EndoOnM a = ad_on_m(ps, x);
        CHECK((a.matrix() + a.matrix().transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("golden actions match the generated operators")
{
    for (int n : {4, 5, 6, 7})
        for (int k : {4, 6}) {
            const GoldenReport g = golden_action_check(space(n, k));
            CHECK(g.passed());
            CHECK(g.structures_checked == (k == 4 ? 1 : 4));
        }
    CHECK_THROWS_AS(golden_action_check(space(6, 8)), std::invalid_argument);
}

TEST_CASE("golden action of f1 on a random matrix")
{
    std::mt19937_64 rng(17);
    const int n = 6;
    const PhiSpace ps = space(n, 6);
    const auto fs = generate_f_structures(ps);
    const CanonicalStructure* f1 = find_structure(fs, "f1");
    REQUIRE(f1 != nullptr);
    const LieElement s = ps.m->project(LieElement(random_skew(n, rng)));
    const Eigen::MatrixXd got = f1->op.apply(s).matrix();
    const Eigen::MatrixXd& m = s.matrix();
    // written out entry by entry
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(n, n);
    want(0, 1) = m(0, 2);
    want(0, 2) = -m(0, 1);
    for (int j = 3; j < n; ++j) {
        want(1, j) = -m(2, j);
        want(2, j) = m(1, j);
    }
    want = want - Eigen::MatrixXd(want.transpose());
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}
