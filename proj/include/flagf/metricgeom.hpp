#pragma once

// Invariant Riemannian geometry of SO(n)/SO(2)xSO(n-3): the splitting
// m = m1 + m2 + m3, the metric family g(s,t) and the symmetric part U of
// the Levi-Civita Nomizu function.

#include "flagf/phispace.hpp"

#include <array>

namespace flagf {

/// The three ad(h)-invariant blocks of m together with a block-adapted
/// orthonormal basis of m (m1 first, then m2, then m3).
///
///   m1 <-> entries (1,2), (1,3)
///   m2 <-> entries (2,j), then (3,j), j >= 4
///   m3 <-> entries (1,j), j >= 4
struct TripleSplit {
    int n = 0;
    SubspacePtr m1, m2, m3;
    SubspacePtr adapted;
    SubspacePtr h;

    const Subspace& block(int i) const;
    /// Index (0, 1, 2) of the block that basis vector j of `adapted` lies in.
    int block_of(int j) const;
    /// Projection of x onto block i, i in {0, 1, 2}.
    LieElement part(int i, const LieElement& x) const;
};

/// Characteristic numbers (s, t) and the overall normalization kappa of
/// g = kappa * (Tr|m1 + s Tr|m2 + t Tr|m3).
struct MetricParams {
    double s = 1.0;
    double t = 1.0;
    double kappa = 1.0;

    /// Throws std::invalid_argument unless s, t, kappa > 0 and finite.
    static MetricParams make(double s, double t, double kappa);
    /// kappa = n - 1.
    static MetricParams for_space(int n, double s, double t);
};

/// Throws std::invalid_argument unless ps is the m_blocks = 1 flag space,
/// std::runtime_error if the blocks fail their invariants.
TripleSplit build_split(const PhiSpace& ps);

struct SplitChecks {
    double orthogonality = 0.0;       ///< max |Tr(x^T y)| across blocks (and h)
    double adh_invariance = 0.0;      ///< max distance of [h, m_i] from m_i
    double bracket_relations = 0.0;   ///< max distance of [m_i, m_i+1] from m_i+2
    bool spans_m = false;
    std::array<int, 3> dims{};
};

SplitChecks check_split(const TripleSplit& split, const PhiSpace& ps);

/// Gram matrix of g over split.adapted; diagonal kappa * (1.., s.., t..).
Eigen::MatrixXd gram_matrix(const TripleSplit& split, const MetricParams& p);

/// Throws std::invalid_argument if x or y is not in m.
double metric_eval(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                   const LieElement& y);

/// The three parameter-free pieces of U:
///   a[0] = [X1,Y2] + [Y1,X2], a[1] = [X1,Y3] + [Y1,X3], a[2] = [X2,Y3] + [Y2,X3]
std::array<LieElement, 3> u_components(const TripleSplit& split, const LieElement& x,
                                       const LieElement& y);

/// Weights of u_components in U: (s-1)/(2t), (t-1)/(2s), (t-s)/2.
std::array<double, 3> u_weights(double s, double t);

/// Closed form of U from the bracket relations of the splitting.
LieElement u_tensor_closed(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                           const LieElement& y);

/// U from 2 g(U(X,Y), Z) = g(X, [Z,Y]_m) + g([Z,X]_m, Y), solved as a linear
/// system over the adapted basis.
LieElement u_tensor_solved(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                           const LieElement& y);

enum class UMethod { Closed, Solved };

LieElement u_tensor(UMethod method, const TripleSplit& split, const MetricParams& p,
                    const LieElement& x, const LieElement& y);

/// alpha(X,Y) = [X,Y]_m / 2 + U(X,Y).
LieElement nomizu(const TripleSplit& split, const MetricParams& p, const LieElement& x,
                  const LieElement& y, UMethod method = UMethod::Closed);

struct NaturalReductivity {
    double residual = 0.0;  ///< max |g([X,Y]_m, Z) - g(X, [Y,Z]_m)| / kappa
    bool holds = false;
};

/// Checks g([X,Y]_m, Z) = g(X, [Y,Z]_m) on all basis triples.
NaturalReductivity check_naturally_reductive(const TripleSplit& split, const MetricParams& p);

}  // namespace flagf
