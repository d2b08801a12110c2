#include "flagf/classify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace flagf {

std::string_view to_string(ClassName c)
{
    switch (c) {
    case ClassName::Kill: return "KILL";
    case ClassName::NK: return "NK";
    case ClassName::G1: return "G1";
    }
    return "?";
}

std::optional<ClassName> parse_class(std::string_view name)
{
    for (ClassName c : kAllClasses)
        if (to_string(c) == name)
            return c;
    return std::nullopt;
}

double residual_scale(double s, double t)
{
    return 1.0 + s + t + 1.0 / s + 1.0 / t;
}

EndoOnM on_split(const CanonicalStructure& f, const TripleSplit& split)
{
    return f.op.rebase(split.adapted);
}

LieElement condition_form(ClassName cond, const EndoOnM& f, const TripleSplit& split,
                          const LieElement& x, const LieElement& y, const UFn& u,
                          double bracket_weight)
{
    const Subspace& m = *split.adapted;
    switch (cond) {
    case ClassName::Kill: {
        const LieElement fy = f.apply(y);
        return (0.5 * bracket_weight) * m.project(bracket(x, fy)) + u(x, fy) - f.apply(u(x, y));
    }
    case ClassName::NK: {
        const LieElement fx = f.apply(x);
        const LieElement fy = f.apply(y);
        const LieElement ffy = f.apply(fy);
        return (0.5 * bracket_weight) * m.project(bracket(fx, ffy)) + u(fx, ffy) - f.apply(u(fx, fy));
    }
    case ClassName::G1: {
        const LieElement fx = f.apply(x);
        const LieElement fy = f.apply(y);
        const LieElement ffx = f.apply(fx);
        const LieElement ffy = f.apply(fy);
        return f.apply(2.0 * u(fx, ffy) - f.apply(u(fx, fy)) + f.apply(u(ffx, ffy)));
    }
    }
    throw std::logic_error("condition_form: unknown class");
}

LieElement condition_value(ClassName cond, const EndoOnM& f, const TripleSplit& split,
                           const MetricParams& p, const LieElement& x)
{
    const UFn u = [&](const LieElement& a, const LieElement& b) { return u_tensor_closed(split, p, a, b); };
    return condition_form(cond, f, split, x, x, u);
}

Membership classify_residual(double residual, std::pair<int, int> witness)
{
    Membership m;
    m.residual = residual;
    m.member = residual < kMemberTol;
    m.indeterminate = !m.member && residual <= kNonMemberMargin;
    m.witness = witness;
    return m;
}

namespace {

double f_scale(const EndoOnM& f)
{
    const double n = f.max_norm();
    return n > 0.0 ? n : 1.0;
}

}  // namespace

Compatibility check_metric_compat(const CanonicalStructure& f, const TripleSplit& split,
                                  const MetricParams& p)
{
    const Eigen::MatrixXd F = on_split(f, split).matrix();
    const Eigen::MatrixXd G = gram_matrix(split, p);
    Compatibility c;
    c.residual = F.size() == 0 ? 0.0 : (F.transpose() * G + G * F).cwiseAbs().maxCoeff() / p.kappa;
    c.holds = c.residual < tol::num;
    return c;
}

Compatibility check_product_compat(const CanonicalStructure& P, const TripleSplit& split,
                                   const MetricParams& p)
{
    const Eigen::MatrixXd M = on_split(P, split).matrix();
    const Eigen::MatrixXd G = gram_matrix(split, p);
    Compatibility c;
    c.residual = M.size() == 0 ? 0.0 : (M.transpose() * G * M - G).cwiseAbs().maxCoeff() / p.kappa;
    c.holds = c.residual < tol::num;
    return c;
}

Membership membership(const CanonicalStructure& f, const TripleSplit& split, const MetricParams& p,
                      ClassName cond, UMethod method)
{
    const EndoOnM fs = on_split(f, split);
    const Subspace& m = *split.adapted;
    const UFn u = [&](const LieElement& a, const LieElement& b) { return u_tensor(method, split, p, a, b); };
    double worst = 0.0;
    std::pair<int, int> witness{0, 0};
    for (int a = 0; a < m.dim(); ++a)
        for (int b = a; b < m.dim(); ++b) {
            const LieElement v = condition_form(cond, fs, split, m[a], m[b], u) +
                                 condition_form(cond, fs, split, m[b], m[a], u);
            const double nrm = v.norm();
            if (nrm > worst) {
                worst = nrm;
                witness = {a, b};
            }
        }
    return classify_residual(worst / (f_scale(fs) * residual_scale(p.s, p.t)), witness);
}

// ---------------------------------------------------------------------------

ConditionExpansion::ConditionExpansion(const CanonicalStructure& f, const TripleSplit& split,
                                       ClassName cond)
    : cond_(cond)
{
    const EndoOnM fs = on_split(f, split);
    const Subspace& m = *split.adapted;
    dim_ = m.dim();
    f_norm_ = f_scale(fs);
    for (int a = 0; a < dim_; ++a)
        for (int b = a; b < dim_; ++b)
            pairs_.emplace_back(a, b);

    const UFn zero = [n = split.n](const LieElement&, const LieElement&) { return LieElement(n); };
    std::array<UFn, 3> comp;
    for (int i = 0; i < 3; ++i)
        comp[i] = [&split, i](const LieElement& x, const LieElement& y) {
            return u_components(split, x, y)[i];
        };

    parts_.resize(4 * dim_, static_cast<Eigen::Index>(pairs_.size()));
    for (std::size_t c = 0; c < pairs_.size(); ++c) {
        const auto [a, b] = pairs_[c];
        auto polar = [&](const UFn& u, double bw) {
            return m.coords(condition_form(cond, fs, split, m[a], m[b], u, bw) +
                            condition_form(cond, fs, split, m[b], m[a], u, bw));
        };
        const auto col = static_cast<Eigen::Index>(c);
        parts_.block(0, col, dim_, 1) = polar(zero, 1.0);
        for (int i = 0; i < 3; ++i)
            parts_.block((i + 1) * dim_, col, dim_, 1) = polar(comp[i], 0.0);
    }
}

Eigen::VectorXd ConditionExpansion::components(double s, double t) const
{
    const auto w = u_weights(s, t);
    Eigen::MatrixXd r = parts_.topRows(dim_);
    for (int i = 0; i < 3; ++i)
        r += w[i] * parts_.middleRows((i + 1) * dim_, dim_);
    return Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
}

Membership ConditionExpansion::evaluate(double s, double t) const
{
    const auto w = u_weights(s, t);
    double worst = 0.0;
    std::pair<int, int> witness{0, 0};
    for (Eigen::Index c = 0; c < parts_.cols(); ++c) {
        Eigen::VectorXd v = parts_.block(0, c, dim_, 1);
        for (int i = 0; i < 3; ++i)
            v += w[i] * parts_.block((i + 1) * dim_, c, dim_, 1);
        const double nrm = v.norm();
        if (nrm > worst) {
            worst = nrm;
            witness = pairs_[static_cast<std::size_t>(c)];
        }
    }
    return classify_residual(worst / (f_norm_ * residual_scale(s, t)), witness);
}

// ---------------------------------------------------------------------------

bool ClassReport::chain_ok() const
{
    const bool kill = (*this)[ClassName::Kill].member;
    const bool nk = (*this)[ClassName::NK].member;
    const bool g1 = (*this)[ClassName::G1].member;
    return (!kill || nk) && (!nk || g1);
}

std::vector<double> grid_axis(const GridSpec& g)
{
    if (!(g.step > 0.0))
        throw std::invalid_argument("grid: step must be positive");
    if (!(g.min > 0.0) || g.max < g.min)
        throw std::invalid_argument("grid: need 0 < min <= max");
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = g.min + i * g.step;
        if (v > g.max + 1e-9 * g.step)
            break;
        out.push_back(v);
    }
    return out;
}

std::vector<std::pair<double, double>> make_grid(const GridSpec& g)
{
    const auto axis = grid_axis(g);
    std::vector<std::pair<double, double>> out;
    for (double s : axis)
        for (double t : axis)
            out.emplace_back(s, t);
    for (const auto& [s, t] : g.extra) {
        if (!(s > 0.0) || !(t > 0.0))
            throw std::invalid_argument("grid: extra points must be positive");
        const bool present = std::any_of(out.begin(), out.end(), [&](const auto& p) {
            return std::abs(p.first - s) < 1e-12 && std::abs(p.second - t) < 1e-12;
        });
        if (!present)
            out.emplace_back(s, t);
    }
    return out;
}

std::vector<ClassReport> sweep(const CanonicalStructure& f, const TripleSplit& split,
                               const std::vector<std::pair<double, double>>& grid, int threads)
{
    for (const auto& [s, t] : grid)
        if (!(s > 0.0) || !(t > 0.0))
            throw std::invalid_argument("sweep: grid entries must be positive");

    const std::array<ConditionExpansion, 3> exps = {ConditionExpansion(f, split, ClassName::Kill),
                                                    ConditionExpansion(f, split, ClassName::NK),
                                                    ConditionExpansion(f, split, ClassName::G1)};
    std::vector<ClassReport> out(grid.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < grid.size(); i += stride) {
            ClassReport& r = out[i];
            r.structure_id = f.id;
            r.s = grid[i].first;
            r.t = grid[i].second;
            for (int c = 0; c < 3; ++c)
                r.classes[c] = exps[c].evaluate(r.s, r.t);
        }
    };
    const std::size_t nthreads = static_cast<std::size_t>(std::max(1, threads));
    if (nthreads == 1 || grid.size() < 2) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t tid = 0; tid < nthreads; ++tid)
            pool.emplace_back(work, tid, nthreads);
        for (auto& th : pool)
            th.join();
    }
    return out;
}

// ---------------------------------------------------------------------------

double bisect(const std::function<double(double)>& fn, double a, double b)
{
    double fa = fn(a);
    double fb = fn(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("bisect: no sign change on the bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= std::min(a, b) || mid >= std::max(a, b))
            break;
        const double fm = fn(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

namespace {

using Point = std::pair<double, double>;

// Zero of the residual on the segment between two parameter values along
// one axis, located by bisection on the component that dominates at the
// left end. Returns nothing unless the refined point is a member.
std::optional<double> refine_on_segment(const ConditionExpansion& exp, bool along_t, double fixed,
                                        double lo, double hi)
{
    auto at = [&](double v) { return along_t ? exp.components(fixed, v) : exp.components(v, fixed); };
    auto residual = [&](double v) { return along_t ? exp.residual(fixed, v) : exp.residual(v, fixed); };

    const Eigen::VectorXd left = at(lo);
    Eigen::Index q = 0;
    if (left.cwiseAbs().maxCoeff(&q) == 0.0)
        return lo;
    const double right_q = at(hi)(q);
    if (right_q != 0.0 && (right_q > 0.0) == (left(q) > 0.0))
        return std::nullopt;
    const double root = bisect([&](double v) { return at(v)(q); }, lo, hi);
    if (residual(root) < kMemberTol)
        return root;
    return std::nullopt;
}

// Damped Gauss-Newton on the stacked components, starting from (s, t).
std::optional<Point> polish(const ConditionExpansion& exp, Point start)
{
    Point x = start;
    double lambda = 1e-3;
    Eigen::VectorXd c = exp.components(x.first, x.second);
    for (int iter = 0; iter < 60; ++iter) {
        if (c.squaredNorm() == 0.0)
            break;
        const double hs = 1e-7 * std::max(1.0, x.first);
        const double ht = 1e-7 * std::max(1.0, x.second);
        Eigen::MatrixXd j(c.size(), 2);
        j.col(0) = (exp.components(x.first + hs, x.second) - exp.components(x.first - hs, x.second)) / (2 * hs);
        j.col(1) = (exp.components(x.first, x.second + ht) - exp.components(x.first, x.second - ht)) / (2 * ht);
        const Eigen::Matrix2d jtj = j.transpose() * j;
        const Eigen::Vector2d g = j.transpose() * c;
        bool moved = false;
        for (int tries = 0; tries < 20; ++tries) {
            const Eigen::Vector2d d = -(jtj + lambda * Eigen::Matrix2d(jtj.diagonal().asDiagonal())).ldlt().solve(g);
            const Point y{x.first + d(0), x.second + d(1)};
            if (y.first > 0.0 && y.second > 0.0 && std::isfinite(y.first) && std::isfinite(y.second)) {
                const Eigen::VectorXd cy = exp.components(y.first, y.second);
                if (cy.squaredNorm() < c.squaredNorm()) {
                    moved = std::abs(d(0)) > 1e-15 * x.first || std::abs(d(1)) > 1e-15 * x.second;
                    x = y;
                    c = cy;
                    lambda = std::max(lambda / 10, 1e-12);
                    break;
                }
            }
            lambda *= 10;
        }
        if (!moved)
            break;
    }
    if (exp.residual(x.first, x.second) < kMemberTol)
        return x;
    return std::nullopt;
}

void add_point(std::vector<Point>& pts, Point p)
{
    for (const auto& q : pts)
        if (std::abs(q.first - p.first) < 1e-6 && std::abs(q.second - p.second) < 1e-6)
            return;
    pts.push_back(p);
}

}  // namespace

CharacteristicSet characteristic_set(const CanonicalStructure& f, const TripleSplit& split,
                                     ClassName cond, const GridSpec& grid,
                                     const std::vector<double>& line_probes)
{
    const ConditionExpansion exp(f, split, cond);
    const auto axis = grid_axis(grid);
    const std::size_t na = axis.size();
    CharacteristicSet out;

    std::vector<char> member(na * na);
    bool all = true;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            member[i * na + j] = exp.residual(axis[i], axis[j]) < kMemberTol;
            all = all && member[i * na + j];
        }
    for (const auto& [s, t] : grid.extra)
        all = all && exp.residual(s, t) < kMemberTol;
    if (all) {
        out.kind = CharacteristicSet::Kind::All;
        return out;
    }

    std::vector<Point> pts;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            if (member[i * na + j])
                add_point(pts, {axis[i], axis[j]});
    for (const auto& [s, t] : grid.extra)
        if (exp.residual(s, t) < kMemberTol)
            add_point(pts, {s, t});

    // Rows s = axis[i]: scan t. Columns t = axis[j]: scan s.
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j + 1 < na; ++j) {
            if (auto t = refine_on_segment(exp, true, axis[i], axis[j], axis[j + 1])) {
                double s = axis[i];
                // Pull s onto the zero as well when the neighbouring rows bracket it.
                if (i > 0 && i + 1 < na && exp.residual(s, *t) >= kMemberTol)
                    if (auto s2 = refine_on_segment(exp, false, *t, axis[i - 1], axis[i + 1]))
                        s = *s2;
                add_point(pts, {s, *t});
            }
            if (auto s = refine_on_segment(exp, false, axis[i], axis[j], axis[j + 1])) {
                double t = axis[i];
                if (i > 0 && i + 1 < na && exp.residual(*s, t) >= kMemberTol)
                    if (auto t2 = refine_on_segment(exp, true, *s, axis[i - 1], axis[i + 1]))
                        t = *t2;
                add_point(pts, {*s, t});
            }
        }

    // Isolated zeros off the grid lines: polish every non-member local minimum.
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            if (member[i * na + j])
                continue;
            const double r = exp.residual(axis[i], axis[j]);
            bool minimum = true;
            for (int di = -1; di <= 1 && minimum; ++di)
                for (int dj = -1; dj <= 1 && minimum; ++dj) {
                    const long a = static_cast<long>(i) + di, b = static_cast<long>(j) + dj;
                    if ((di || dj) && a >= 0 && b >= 0 && a < static_cast<long>(na) && b < static_cast<long>(na))
                        minimum = r <= exp.residual(axis[static_cast<std::size_t>(a)], axis[static_cast<std::size_t>(b)]);
                }
            if (!minimum)
                continue;
            const auto p = polish(exp, {axis[i], axis[j]});
            if (p && p->first >= axis.front() && p->first <= axis.back() && p->second >= axis.front() &&
                p->second <= axis.back())
                add_point(pts, *p);
        }

    if (pts.empty()) {
        out.kind = CharacteristicSet::Kind::Empty;
        return out;
    }

    // A line s = c shows up as one point per grid column (and vice versa).
    auto find_line = [&](bool s_const) -> std::optional<double> {
        for (const auto& p : pts) {
            const double c = s_const ? p.first : p.second;
            std::size_t covered = 0;
            for (double v : axis) {
                const bool hit = std::any_of(pts.begin(), pts.end(), [&](const Point& q) {
                    const double qc = s_const ? q.first : q.second;
                    const double qv = s_const ? q.second : q.first;
                    return std::abs(qc - c) < 1e-6 && std::abs(qv - v) < 1e-9;
                });
                covered += hit ? 1 : 0;
            }
            if (covered == na)
                return c;
        }
        return std::nullopt;
    };
    auto on_line = [&](bool s_const, double c) {
        return std::all_of(pts.begin(), pts.end(), [&](const Point& q) {
            return std::abs((s_const ? q.first : q.second) - c) < 1e-6;
        });
    };

    const double step = grid.step;
    for (const bool s_const : {true, false}) {
        const auto c = find_line(s_const);
        if (!c || !on_line(s_const, *c))
            continue;
        out.kind = s_const ? CharacteristicSet::Kind::LineS : CharacteristicSet::Kind::LineT;
        double refined = *c;
        bool first = true;
        for (double probe : line_probes) {
            // refine the constant coordinate at an off-grid probe
            const auto r = refine_on_segment(exp, !s_const, probe, std::max(*c - step, 0.5 * *c),
                                             *c + step);
            const double at = r ? *r : *c;
            if (first && r) {
                refined = *r;
                first = false;
            }
            const double res = s_const ? exp.residual(at, probe) : exp.residual(probe, at);
            out.confirmations.emplace_back(probe, res);
        }
        out.line = refined;
        return out;
    }

    std::sort(pts.begin(), pts.end());
    out.points = pts;
    out.kind = pts.size() <= 4 ? CharacteristicSet::Kind::Points : CharacteristicSet::Kind::Raw;
    return out;
}

std::string CharacteristicSet::describe() const
{
    auto list = [&] {
        std::string s = "{";
        for (std::size_t i = 0; i < points.size(); ++i)
            s += fmt::format("{}({:.3f}, {:.3f})", i ? ", " : "", points[i].first, points[i].second);
        return s + "}";
    };
    switch (kind) {
    case Kind::Empty: return "empty";
    case Kind::All: return "all";
    case Kind::LineS: return fmt::format("line s={:.6g}", line);
    case Kind::LineT: return fmt::format("line t={:.6g}", line);
    case Kind::Points: return list();
    case Kind::Raw: return "raw " + list();
    }
    return "?";
}

}  // namespace flagf
