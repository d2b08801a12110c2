#pragma once

// Canonical affinor structures: polynomials in theta that are f-structures
// (f^3 + f = 0) or almost product structures (P^2 = id).

#include "flagf/phispace.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flagf {

enum class StructureKind { FStructure, AlmostProduct, AlmostComplex };

std::string_view to_string(StructureKind kind);

struct CanonicalStructure {
    StructureKind kind = StructureKind::FStructure;
    /// Catalogue name ("f0", "f1", ...) when the operator matches one of the
    /// named order-4/order-6 structures, with a leading '-' for the negative;
    /// otherwise "f[z1,z2,...]" / "P[x1,...]" built from the signature.
    std::string id;
    std::vector<int> signature;
    std::vector<double> theta_polynomial;  ///< a_0 .. a_{k-1}
    EndoOnM op;
};

/// n for k = 2n+1, n-1 for k = 2n. Throws std::invalid_argument for k < 3.
int u_of_k(int k);

/// Coefficients (a_0 .. a_{k-1}) of the f-structure with sine weights zeta.
std::vector<double> f_polynomial(int k, const std::vector<int>& zeta);

/// Coefficients of the almost product structure with cosine weights xi.
/// For even k, xi carries u+1 signs; the last one weights (-1)^m.
std::vector<double> product_polynomial(int k, const std::vector<int>& xi);

/// sum_m coeffs[m] * theta^m.
EndoOnM polynomial_in(const EndoOnM& theta, const std::vector<double>& coeffs);

/// All distinct non-trivial canonical f-structures; both signs present.
std::vector<CanonicalStructure> generate_f_structures(const PhiSpace& ps);

/// All distinct canonical almost product structures; both signs present.
std::vector<CanonicalStructure> generate_product_structures(const PhiSpace& ps);

/// Number of classes when +op and -op are identified.
int count_up_to_sign(const std::vector<CanonicalStructure>& list);

/// Sign representatives (catalogue names without '-', or the ones whose
/// first nonzero signature entry is +1), in generation order.
std::vector<CanonicalStructure> up_to_sign(const std::vector<CanonicalStructure>& list);

const CanonicalStructure* find_structure(const std::vector<CanonicalStructure>& list,
                                         std::string_view id);

struct NamedPolynomial {
    std::string name;
    std::vector<double> coeffs;
};

/// Named f-structures of orders 4 (f0) and 6 (f1..f4); empty for other k.
std::vector<NamedPolynomial> named_f_structures(int k);

struct StructureCheck {
    double identity_residual = 0.0;    ///< ||f^3+f|| or ||P^2-id||
    double equivariance_residual = 0.0;///< max_h ||[ad(h)|m, op]||
    double commutator_residual = 0.0;  ///< max over `others` of ||[op, op']||
    double theta_commutator = 0.0;     ///< ||[op, theta]||
    double polynomial_residual = 0.0;  ///< ||op - sum a_m theta^m||

    bool ok(double eps) const
    {
        return identity_residual < eps && equivariance_residual < eps &&
               commutator_residual < eps && theta_commutator < eps && polynomial_residual < eps;
    }
};

/// Operator residuals use the max-abs matrix norm over the m basis.
/// The defining identity is picked from cs.kind.
StructureCheck verify_structure(const CanonicalStructure& cs, const PhiSpace& ps,
                                const std::vector<CanonicalStructure>& others = {});

/// Residual of the defining identity for an arbitrary operator treated as
/// an f-structure (||f^3 + f||).
double f_identity_residual(const EndoOnM& op);
double product_identity_residual(const EndoOnM& op);

/// Matrix of ad(h) restricted to m, over the m basis.
EndoOnM ad_on_m(const PhiSpace& ps, const LieElement& h);

struct GoldenMismatch {
    std::string structure;
    std::string input;  ///< e.g. "s24"
    int row = 0;        ///< 1-based entry coordinates
    int col = 0;
    double expected = 0.0;
    double actual = 0.0;
};

struct GoldenReport {
    int structures_checked = 0;
    int inputs_checked = 0;
    double max_deviation = 0.0;
    std::vector<GoldenMismatch> mismatches;
    bool passed() const { return structures_checked > 0 && mismatches.empty(); }
};

/// Applies each named f-structure to every coordinate matrix S of m (one
/// s_ij = 1) and compares entrywise with the closed-form action on the
/// order-4/order-6 flag space. Requires m_blocks = 1 and k in {4, 6};
/// throws std::invalid_argument otherwise.
GoldenReport golden_action_check(const PhiSpace& ps, double eps = 1e-12);

/// Expected image of S under the named structure (zero-based matrix).
Eigen::MatrixXd golden_action(std::string_view name, const Eigen::MatrixXd& s);

}  // namespace flagf
