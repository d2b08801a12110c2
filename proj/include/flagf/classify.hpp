#pragma once

// Membership of canonical f-structures in Kill f, NKf and G1f as a function
// of the characteristic numbers (s, t), and location of the zero sets.

#include "flagf/canonical.hpp"
#include "flagf/metricgeom.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flagf {

enum class ClassName { Kill, NK, G1 };

inline constexpr std::array<ClassName, 3> kAllClasses = {ClassName::Kill, ClassName::NK, ClassName::G1};

std::string_view to_string(ClassName c);
std::optional<ClassName> parse_class(std::string_view name);

inline constexpr double kMemberTol = 1e-9;
inline constexpr double kNonMemberMargin = 1e-3;

/// 1 + s + t + 1/s + 1/t
double residual_scale(double s, double t);

/// The structure's operator over split.adapted.
EndoOnM on_split(const CanonicalStructure& f, const TripleSplit& split);

using UFn = std::function<LieElement(const LieElement&, const LieElement&)>;

/// Bilinear form C(X, Y) whose diagonal C(X, X) is the class condition:
///   KILL  [X,fY]_m/2 + U(X,fY) - f U(X,Y)
///   NK    [fX,f^2Y]_m/2 + U(fX,f^2Y) - f U(fX,fY)
///   G1    f(2U(fX,f^2Y) - f U(fX,fY) + f U(f^2X,f^2Y))
/// `bracket_weight` scales the bracket term (used to expand in U).
LieElement condition_form(ClassName cond, const EndoOnM& f, const TripleSplit& split,
                          const LieElement& x, const LieElement& y, const UFn& u,
                          double bracket_weight = 1.0);

/// C(X, X) with U = u_tensor_closed.
LieElement condition_value(ClassName cond, const EndoOnM& f, const TripleSplit& split,
                           const MetricParams& p, const LieElement& x);

struct Membership {
    double residual = 0.0;  ///< max pair norm / (||f|| * residual_scale)
    bool member = false;
    bool indeterminate = false;  ///< residual in [kMemberTol, kNonMemberMargin]
    std::pair<int, int> witness{0, 0};  ///< adapted-basis pair with the max
};

Membership classify_residual(double residual, std::pair<int, int> witness);

struct Compatibility {
    double residual = 0.0;
    bool holds = false;
};

/// g(fX,Y) + g(X,fY) = 0 on basis pairs (residual divided by kappa).
Compatibility check_metric_compat(const CanonicalStructure& f, const TripleSplit& split,
                                  const MetricParams& p);

/// g(PX,PY) = g(X,Y) on basis pairs.
Compatibility check_product_compat(const CanonicalStructure& P, const TripleSplit& split,
                                   const MetricParams& p);

/// Evaluates the polarized condition C(X,Y) + C(Y,X) on every basis pair.
Membership membership(const CanonicalStructure& f, const TripleSplit& split, const MetricParams& p,
                      ClassName cond, UMethod method = UMethod::Closed);

/// The polarized condition is affine in (1/2, U weights); this caches the
/// four parameter-free parts for every basis pair so that (s, t) scans only
/// recombine them.
class ConditionExpansion {
public:
    ConditionExpansion(const CanonicalStructure& f, const TripleSplit& split, ClassName cond);

    ClassName condition() const { return cond_; }

    /// All pair coordinates stacked: pair-major, coordinate-minor.
    Eigen::VectorXd components(double s, double t) const;
    Membership evaluate(double s, double t) const;
    double residual(double s, double t) const { return evaluate(s, t).residual; }

private:
    ClassName cond_;
    int dim_ = 0;
    double f_norm_ = 1.0;
    std::vector<std::pair<int, int>> pairs_;
    // (4 * dim) x pairs: rows [0,d) bracket part, then the three U parts.
    Eigen::MatrixXd parts_;
};

struct ClassReport {
    std::string structure_id;
    double s = 0.0;
    double t = 0.0;
    std::array<Membership, 3> classes;  ///< indexed like kAllClasses

    const Membership& operator[](ClassName c) const { return classes[static_cast<int>(c)]; }
    bool chain_ok() const;
};

struct GridSpec {
    double min = 0.25;
    double max = 3.0;
    double step = 0.25;
    std::vector<std::pair<double, double>> extra = {{1.0, 1.0}, {1.0, 4.0 / 3.0}};
};

/// Values min, min+step, ... up to max (inclusive within step*1e-9).
std::vector<double> grid_axis(const GridSpec& g);

/// Cartesian product (s outer, t inner) followed by extra points not
/// already present. Throws std::invalid_argument on non-positive entries or
/// a non-positive step.
std::vector<std::pair<double, double>> make_grid(const GridSpec& g);

/// One report per grid point in grid order. `threads` <= 1 runs inline.
std::vector<ClassReport> sweep(const CanonicalStructure& f, const TripleSplit& split,
                               const std::vector<std::pair<double, double>>& grid, int threads = 1);

struct CharacteristicSet {
    enum class Kind { Empty, Points, LineS, LineT, All, Raw };
    Kind kind = Kind::Empty;
    std::vector<std::pair<double, double>> points;  ///< Points / Raw
    double line = 0.0;                              ///< LineS / LineT
    /// (probe, residual) for the values the line was confirmed at
    std::vector<std::pair<double, double>> confirmations;

    std::string describe() const;
};

/// Bisection on a sign-changing scalar function; f(a) and f(b) must not have
/// the same strict sign. Stops when the bracket can no longer shrink.
double bisect(const std::function<double(double)>& fn, double a, double b);

/// Zero set of the residual over the (s, t) plane: grid scan, then bisection
/// on the dominant signed component along grid lines s = const and t = const.
CharacteristicSet characteristic_set(const CanonicalStructure& f, const TripleSplit& split,
                                     ClassName cond, const GridSpec& grid = {},
                                     const std::vector<double>& line_probes = {0.3, 1.0, 2.5});

}  // namespace flagf
