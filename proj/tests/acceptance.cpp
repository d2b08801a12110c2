// One line per acceptance criterion. Exit status is nonzero when any line fails.

#include "flagf/cli.hpp"
#include "flagf/classify.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace flagf;

namespace {

constexpr double kCoeffTol = 1e-12;
constexpr double kGoldenTol = 1e-12;
constexpr double kIdentityTol = 1e-10;
constexpr double kSplitTol = 1e-10;
constexpr double kOrthTol = 1e-12;
constexpr double kUTol = 1e-9;
constexpr double kUZeroTol = 1e-12;
constexpr double kPointTol = 1e-6;
constexpr double kCompatTol = 1e-10;
constexpr double kFarTol = 1e-3;

const std::vector<int> kSizes = {4, 5, 6, 7, 8};

struct Line {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
};

int failures = 0;

void report(int id, const std::string& title, const Line& line, const std::string& summary)
{
    std::cout << fmt::format("[{}] {:>2} {}: {}\n", line.pass ? "PASS" : "FAIL", id, title, summary);
    for (const auto& n : line.notes)
        std::cout << "        " << n << "\n";
    if (!line.pass)
        ++failures;
}

PhiSpace space(int n, int k, int m_blocks = 1)
{
    return build_phi_space(build_automorphism(n, m_blocks, k));
}

double max_abs(const Eigen::MatrixXd& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Catalogue polynomials, a_0 .. a_{k-1}.
struct Listed {
    std::string name;
    std::vector<double> coeffs;
};

std::vector<Listed> catalogue_f(int k)
{
    const double r = 1.0 / std::sqrt(3.0);
    const double h = r / 2.0;
    if (k == 4)
        return {{"f0", {0, 0.5, 0, -0.5}}};
    return {{"f1", {0, r, 0, 0, 0, -r}},
            {"f2", {0, h, -h, 0, h, -h}},
            {"f3", {0, h, h, 0, -h, -h}},
            {"f4", {0, 0, r, 0, -r, 0}}};
}

std::vector<Listed> catalogue_p(int k)
{
    if (k == 4)
        return {{"P0", {0, 0, 1, 0}}};
    return {{"P1", {-1, 0, 0, 0, 0, 0}},
            {"P2", {0, 1.0 / 3, 1, 1.0 / 3, 1, 1.0 / 3}},
            {"P3", {0, 0, 0, 1, 0, 0}},
            {"P4", {0, 0, -2.0 / 3, 1.0 / 3, 0, -2.0 / 3}}};
}

double operator_gap(const EndoOnM& a, const EndoOnM& b)
{
    return max_abs(a.matrix() - b.matrix());
}

const CanonicalStructure* match_operator(const std::vector<CanonicalStructure>& list, const EndoOnM& op,
                                         double& gap)
{
    gap = INFINITY;
    const CanonicalStructure* best = nullptr;
    for (const auto& cs : list) {
        const double d = operator_gap(cs.op, op);
        if (d < gap) {
            gap = d;
            best = &cs;
        }
    }
    return best;
}

void criterion_1()
{
    Line line;
    std::string summary;
    for (int k : {4, 6}) {
        const PhiSpace ps = space(6, k);
        const auto fs = generate_f_structures(ps);
        const auto prods = generate_product_structures(ps);
        const std::size_t want_f = k == 4 ? 2 : 8;
        const std::size_t want_p = k == 4 ? 4 : 8;
        line.require(fs.size() == want_f, fmt::format("k={}: {} f-structures, expected {}", k, fs.size(), want_f));
        line.require(prods.size() == want_p,
                     fmt::format("k={}: {} product structures, expected {}", k, prods.size(), want_p));
        summary += fmt::format("k={}: {} f, {} P; ", k, fs.size(), prods.size());

        for (const auto& p : catalogue_f(k)) {
            const CanonicalStructure* cs = find_structure(fs, p.name);
            if (!cs) {
                line.require(false, fmt::format("k={}: {} not generated", k, p.name));
                continue;
            }
            double worst = 0.0;
            for (std::size_t i = 0; i < p.coeffs.size(); ++i)
                worst = std::max(worst, std::abs(cs->theta_polynomial[i] - p.coeffs[i]));
            line.require(worst < kCoeffTol, fmt::format("k={}: {} coefficients differ by {:.3g}", k, p.name, worst));
            const CanonicalStructure* neg = find_structure(fs, "-" + p.name);
            line.require(neg != nullptr, fmt::format("k={}: -{} not generated", k, p.name));
        }

        for (const auto& p : catalogue_p(k)) {
            const EndoOnM op = polynomial_in(ps.theta, p.coeffs);
            double gap = 0.0;
            const CanonicalStructure* cs = match_operator(prods, op, gap);
            if (gap < kCoeffTol) {
                double neg_gap = 0.0;
                match_operator(prods, EndoOnM(op.domain(), -op.matrix()), neg_gap);
                line.require(neg_gap < kCoeffTol, fmt::format("k={}: -{} not generated", k, p.name));
                continue;
            }
            const double p2 = product_identity_residual(op);
            std::string note = fmt::format(
                "k={}: catalogue {} matches no generated product structure (nearest {} off by {:.3g}); "
                "||P^2 - id|| = {:.3g}",
                k, p.name, cs ? cs->id : "none", gap, p2);
            if (p.name == "P4") {
                const EndoOnM alt = polynomial_in(ps.theta, {0, -2.0 / 3, 0, 1.0 / 3, 0, -2.0 / 3});
                double alt_gap = 0.0;
                const CanonicalStructure* alt_cs = match_operator(prods, alt, alt_gap);
                note += fmt::format(
                    "; with theta in place of theta^2 the polynomial is {} (gap {:.3g}, ||P^2 - id|| = {:.3g})",
                    alt_gap < kCoeffTol && alt_cs ? alt_cs->id : "still unmatched", alt_gap,
                    product_identity_residual(alt));
            }
            line.require(false, note);
        }
    }
    report(1, "structure generation", line, summary);
}

void criterion_2()
{
    Line line;
    int checked = 0;
    double worst = 0.0;
    for (int n : {4, 5, 6})
        for (int k : {4, 6}) {
            const GoldenReport g = golden_action_check(space(n, k), kGoldenTol);
            checked += g.structures_checked;
            worst = std::max(worst, g.max_deviation);
            line.require(g.passed(), fmt::format("n={} k={}: {} mismatches", n, k, g.mismatches.size()));
        }
    report(2, "golden actions", line, fmt::format("{} structure/space pairs, max deviation {:.3g}", checked, worst));
}

struct Case {
    int n, k, m_blocks;
};

std::vector<Case> test_matrix()
{
    std::vector<Case> cases;
    for (int n : kSizes)
        for (int k : {4, 6})
            cases.push_back({n, k, 1});
    cases.push_back({6, 6, 2});
    cases.push_back({7, 8, 2});
    cases.push_back({8, 8, 3});
    return cases;
}

void criterion_3()
{
    Line line;
    double worst = 0.0;
    int count = 0;
    for (const Case& c : test_matrix()) {
        const PhiSpace ps = space(c.n, c.k, c.m_blocks);
        auto all = generate_f_structures(ps);
        const auto prods = generate_product_structures(ps);
        all.insert(all.end(), prods.begin(), prods.end());
        for (const auto& cs : all) {
            const StructureCheck r = verify_structure(cs, ps, all);
            worst = std::max({worst, r.identity_residual, r.commutator_residual, r.equivariance_residual});
            ++count;
            line.require(r.identity_residual < kIdentityTol && r.commutator_residual < kIdentityTol &&
                             r.equivariance_residual < kIdentityTol,
                         fmt::format("n={} k={} m={} {}: identity {:.3g} commutator {:.3g} equivariance {:.3g}", c.n,
                                     c.k, c.m_blocks, cs.id, r.identity_residual, r.commutator_residual,
                                     r.equivariance_residual));
        }
    }
    report(3, "structural identities", line, fmt::format("{} structures, worst residual {:.3g}", count, worst));
}

void criterion_4()
{
    Line line;
    for (const Case& c : test_matrix()) {
        const PhiSpace ps = space(c.n, c.k, c.m_blocks);
        const RegularityReport r = check_regularity(ps);
        line.require(r.all() && r.consistent(), fmt::format("n={} k={} m={}: regularity fails", c.n, c.k, c.m_blocks));
        if (c.m_blocks == 1)
            line.require(ps.m->dim() == 3 * c.n - 7,
                         fmt::format("n={} k={}: dim m = {}, expected {}", c.n, c.k, ps.m->dim(), 3 * c.n - 7));
    }
    report(4, "regularity", line, fmt::format("{} spaces", test_matrix().size()));
}

void criterion_5()
{
    Line line;
    double worst_br = 0.0, worst_orth = 0.0;
    for (int n : kSizes)
        for (int k : {4, 6}) {
            const PhiSpace ps = space(n, k);
            const TripleSplit split = build_split(ps);
            const SplitChecks c = check_split(split, ps);
            worst_br = std::max({worst_br, c.bracket_relations, c.adh_invariance});
            worst_orth = std::max(worst_orth, c.orthogonality);
            line.require(c.bracket_relations < kSplitTol && c.adh_invariance < kSplitTol,
                         fmt::format("n={} k={}: inclusions off by {:.3g}", n, k,
                                     std::max(c.bracket_relations, c.adh_invariance)));
            line.require(c.orthogonality < kOrthTol, fmt::format("n={} k={}: orthogonality {:.3g}", n, k, c.orthogonality));
            line.require(c.spans_m && c.dims[0] == 2 && c.dims[1] == 2 * (n - 3) && c.dims[2] == n - 3,
                         fmt::format("n={} k={}: dims ({}, {}, {})", n, k, c.dims[0], c.dims[1], c.dims[2]));
        }
    report(5, "splitting", line, fmt::format("inclusions {:.3g}, orthogonality {:.3g}", worst_br, worst_orth));
}

void criterion_6()
{
    Line line;
    const PhiSpace ps = space(5, 4);
    const TripleSplit split = build_split(ps);
    const auto& basis = split.adapted->basis();
    GridSpec g;
    const auto axis = grid_axis(g);
    line.require(axis.size() == 12, fmt::format("grid axis has {} values", axis.size()));
    double worst = 0.0;
    for (double s : axis)
        for (double t : axis) {
            const auto p = MetricParams::for_space(5, s, t);
            for (const auto& x : basis)
                for (const auto& y : basis)
                    worst = std::max(worst, (u_tensor_closed(split, p, x, y) - u_tensor_solved(split, p, x, y)).max_abs());
        }
    line.require(worst < kUTol, fmt::format("closed vs solved U deviate by {:.3g}", worst));
    double at_one = 0.0;
    for (int n : kSizes) {
        const PhiSpace psn = space(n, 6);
        const TripleSplit sp = build_split(psn);
        const auto p = MetricParams::for_space(n, 1.0, 1.0);
        for (const auto& x : sp.adapted->basis())
            for (const auto& y : sp.adapted->basis()) {
                at_one = std::max(at_one, u_tensor_solved(sp, p, x, y).max_abs());
                at_one = std::max(at_one, u_tensor_closed(sp, p, x, y).max_abs());
            }
    }
    line.require(at_one < kUZeroTol, fmt::format("U at (1,1) reaches {:.3g}", at_one));
    report(6, "U oracle", line, fmt::format("max deviation {:.3g}, |U(1,1)| {:.3g}", worst, at_one));
}

// KILL at a single point near (1, 4/3), NK on s = 1, G1 everywhere.
void check_kill_point(Line& line, const std::string& tag, const CanonicalStructure& f, const TripleSplit& split)
{
    const CharacteristicSet kill = characteristic_set(f, split, ClassName::Kill);
    const bool ok = kill.kind == CharacteristicSet::Kind::Points && kill.points.size() == 1 &&
                    std::abs(kill.points[0].first - 1.0) < kPointTol &&
                    std::abs(kill.points[0].second - 4.0 / 3.0) < kPointTol;
    line.require(ok, fmt::format("{}: KILL zero set is {}", tag, kill.describe()));
}

void check_nk_line(Line& line, const std::string& tag, const CanonicalStructure& f, const TripleSplit& split)
{
    const ConditionExpansion nk(f, split, ClassName::NK);
    for (double t : {0.3, 1.0, 4.0 / 3.0, 2.5}) {
        const double on = nk.residual(1.0, t);
        line.require(on < kMemberTol, fmt::format("{}: NK residual {:.3g} at (1, {:.4g})", tag, on, t));
        for (double s : {0.5, 2.0}) {
            const double off = nk.residual(s, t);
            line.require(off > kFarTol, fmt::format("{}: NK residual {:.3g} at ({}, {:.4g})", tag, off, s, t));
        }
    }
    const CharacteristicSet set = characteristic_set(f, split, ClassName::NK);
    line.require(set.kind == CharacteristicSet::Kind::LineS && std::abs(set.line - 1.0) < kPointTol,
                 fmt::format("{}: NK zero set is {}", tag, set.describe()));
}

void check_everywhere(Line& line, const std::string& tag, const CanonicalStructure& f, const TripleSplit& split,
                      ClassName cond)
{
    const ConditionExpansion e(f, split, cond);
    double worst = 0.0;
    for (const auto& [s, t] : make_grid(GridSpec{}))
        worst = std::max(worst, e.residual(s, t));
    line.require(worst < kMemberTol, fmt::format("{}: {} residual reaches {:.3g}", tag, to_string(cond), worst));
}

void check_nowhere(Line& line, const std::string& tag, const CanonicalStructure& f, const TripleSplit& split,
                   ClassName cond)
{
    const ConditionExpansion e(f, split, cond);
    double best = INFINITY;
    for (const auto& [s, t] : make_grid(GridSpec{}))
        best = std::min(best, e.residual(s, t));
    line.require(best > kFarTol, fmt::format("{}: {} residual drops to {:.3g}", tag, to_string(cond), best));
}

void criterion_7()
{
    Line line;
    std::string summary;
    for (int n : kSizes) {
        const PhiSpace ps = space(n, 4);
        const TripleSplit split = build_split(ps);
        const auto fs = generate_f_structures(ps);
        const CanonicalStructure* f0 = find_structure(fs, "f0");
        if (!f0) {
            line.require(false, fmt::format("n={}: f0 missing", n));
            continue;
        }
        const std::string tag = fmt::format("n={} f0", n);
        check_kill_point(line, tag, *f0, split);
        check_nk_line(line, tag, *f0, split);
        check_everywhere(line, tag, *f0, split, ClassName::G1);
        if (n == 5) {
            const auto kill = characteristic_set(*f0, split, ClassName::Kill);
            if (!kill.points.empty())
                summary = fmt::format("n=5 KILL at ({:.9f}, {:.9f})", kill.points[0].first, kill.points[0].second);
        }
    }
    report(7, "order-4 classification", line, summary + ", n=4..8");
}

void criterion_8()
{
    Line line;
    for (int n : kSizes) {
        const PhiSpace ps = space(n, 6);
        const TripleSplit split = build_split(ps);
        const auto fs = generate_f_structures(ps);
        std::array<const CanonicalStructure*, 4> f{};
        bool missing = false;
        for (int i = 0; i < 4; ++i) {
            f[i] = find_structure(fs, fmt::format("f{}", i + 1));
            missing = missing || !f[i];
        }
        if (missing) {
            line.require(false, fmt::format("n={}: named structures missing", n));
            continue;
        }
        auto tag = [n](int i) { return fmt::format("n={} f{}", n, i + 1); };
        check_kill_point(line, tag(0), *f[0], split);
        for (int i = 1; i < 4; ++i)
            check_nowhere(line, tag(i), *f[i], split, ClassName::Kill);
        check_nk_line(line, tag(0), *f[0], split);
        check_everywhere(line, tag(1), *f[1], split, ClassName::NK);
        check_everywhere(line, tag(2), *f[2], split, ClassName::NK);
        check_nowhere(line, tag(3), *f[3], split, ClassName::NK);
        for (int i = 0; i < 4; ++i)
            check_everywhere(line, tag(i), *f[i], split, ClassName::G1);
    }
    report(8, "order-6 classification", line, "f1..f4, n=4..8");
}

void criterion_9()
{
    Line line;
    std::size_t reports = 0;
    int violations = 0;
    const auto grid = make_grid(GridSpec{});
    for (int n : kSizes)
        for (int k : {4, 6}) {
            const PhiSpace ps = space(n, k);
            const TripleSplit split = build_split(ps);
            for (const auto& f : generate_f_structures(ps))
                for (const auto& r : sweep(f, split, grid, 2)) {
                    ++reports;
                    if (!r.chain_ok()) {
                        ++violations;
                        line.require(false, fmt::format("n={} k={} {} at ({}, {})", n, k, f.id, r.s, r.t));
                    }
                }
        }
    report(9, "chain property", line, fmt::format("{} reports, {} violations", reports, violations));
}

void criterion_10()
{
    Line line;
    std::mt19937_64 rng(20261019);
    std::uniform_real_distribution<double> draw(0.1, 5.0);
    double worst = 0.0;
    for (int n : kSizes) {
        const PhiSpace p4 = space(n, 4);
        const PhiSpace p6 = space(n, 6);
        const TripleSplit s4 = build_split(p4);
        const TripleSplit s6 = build_split(p6);
        const auto f4s = generate_f_structures(p4);
        const auto f6s = generate_f_structures(p6);
        std::vector<std::pair<const CanonicalStructure*, const TripleSplit*>> five = {
            {find_structure(f4s, "f0"), &s4}};
        for (const char* name : {"f1", "f2", "f3", "f4"})
            five.push_back({find_structure(f6s, name), &s6});
        for (int i = 0; i < 20; ++i) {
            const auto p = MetricParams::for_space(n, draw(rng), draw(rng));
            for (const auto& [f, split] : five) {
                if (!f) {
                    line.require(false, fmt::format("n={}: structure missing", n));
                    continue;
                }
                const double r = check_metric_compat(*f, *split, p).residual;
                worst = std::max(worst, r);
                line.require(r < kCompatTol,
                             fmt::format("n={} {} at ({:.4g}, {:.4g}): {:.3g}", n, f->id, p.s, p.t, r));
            }
        }
    }
    report(10, "metric compatibility", line, fmt::format("worst residual {:.3g}", worst));
}

void criterion_11()
{
    Line line;
    std::string summary;
    for (int n : kSizes) {
        const TripleSplit split = build_split(space(n, 6));
        const auto at = [&](double s, double t) {
            return check_naturally_reductive(split, MetricParams::for_space(n, s, t));
        };
        const auto one = at(1, 1), a = at(2, 1), b = at(1, 2);
        line.require(one.holds, fmt::format("n={}: (1,1) residual {:.3g}", n, one.residual));
        line.require(a.residual > kFarTol, fmt::format("n={}: (2,1) residual {:.3g}", n, a.residual));
        line.require(b.residual > kFarTol, fmt::format("n={}: (1,2) residual {:.3g}", n, b.residual));
        if (n == 5)
            summary = fmt::format("n=5 residuals (1,1) {:.3g}, (2,1) {:.3g}, (1,2) {:.3g}", one.residual, a.residual,
                                  b.residual);
    }
    report(11, "natural reductivity", line, summary);
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion_12()
{
    Line line;
    const auto base = std::filesystem::temp_directory_path() /
                      fmt::format("flagf_accept_{}", std::chrono::steady_clock::now().time_since_epoch().count());
    std::size_t files = 0;
    for (int k : {4, 6}) {
        std::vector<std::filesystem::path> dirs;
        for (int run = 0; run < 3; ++run) {
            cli::RunConfig cfg;
            cfg.n = 6;
            cfg.k = k;
            cfg.format = cli::Format::Json;
            cfg.threads = run == 2 ? 4 : 1;
            cfg.out = (base / fmt::format("k{}_{}", k, run)).string();
            std::ostringstream out, err;
            const int rc = cli::cmd_sweep(cfg, out, err);
            line.require(rc == cli::kExitOk, fmt::format("k={}: sweep exited {}: {}", k, rc, err.str()));
            dirs.push_back(cfg.out);
        }
        for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
            const std::string ref = slurp(entry.path());
            ++files;
            for (std::size_t i = 1; i < dirs.size(); ++i)
                line.require(slurp(dirs[i] / entry.path().filename()) == ref,
                             fmt::format("k={}: {} differs in run {}", k, entry.path().filename().string(), i));
        }
    }
    std::error_code ec;
    std::filesystem::remove_all(base, ec);
    line.require(files > 0, "no sweep files written");
    report(12, "determinism", line, fmt::format("{} files compared across 3 runs", files));
}

}  // namespace

int main()
{
    const auto start = std::chrono::steady_clock::now();
    const std::vector<void (*)()> criteria = {criterion_1, criterion_2, criterion_3,  criterion_4,
                                              criterion_5, criterion_6, criterion_7,  criterion_8,
                                              criterion_9, criterion_10, criterion_11, criterion_12};
    for (auto c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::cout << "[FAIL] criterion threw: " << e.what() << "\n";
            ++failures;
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << fmt::format("{} of {} criteria failed ({:.2f} s)\n", failures, criteria.size(), secs);
    return failures == 0 ? 0 : 1;
}
