#pragma once

// Dense linear algebra over so(n): skew-symmetric matrices, the commutator,
// the trace form Tr(X^T Y) and orthonormal subspaces of so(n).

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace flagf {

namespace tol {
inline constexpr double sym = 1e-12;
inline constexpr double orth = 1e-12;
inline constexpr double num = 1e-9;
// relative to the largest singular value
inline constexpr double rank_rel = 1e-9;
}  // namespace tol

/// An element of so(n), i.e. a real skew-symmetric n x n matrix.
class LieElement {
public:
    LieElement() = default;

    /// Zero element of so(n).
    explicit LieElement(int n);

    /// Throws std::invalid_argument if `m` is not square or is further than
    /// tol::sym (relative to its max-abs entry) from being skew. The stored
    /// matrix is the exact skew part (m - m^T)/2.
    explicit LieElement(const Eigen::MatrixXd& m);

    /// E_ij - E_ji with zero-based indices.
    static LieElement unit(int n, int i, int j);

    int n() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    /// Euclidean norm under the trace form, sqrt(Tr X^T X).
    double norm() const { return m_.norm(); }
    double max_abs() const { return n() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

    LieElement& operator+=(const LieElement& o);
    LieElement& operator-=(const LieElement& o);
    LieElement& operator*=(double c);

    friend LieElement operator+(LieElement a, const LieElement& b) { return a += b; }
    friend LieElement operator-(LieElement a, const LieElement& b) { return a -= b; }
    friend LieElement operator*(double c, LieElement a) { return a *= c; }
    friend LieElement operator-(LieElement a) { return a *= -1.0; }

private:
    struct Trusted {};
    LieElement(Eigen::MatrixXd m, Trusted) : m_(std::move(m)) {}
    friend LieElement bracket(const LieElement&, const LieElement&);

    Eigen::MatrixXd m_;
};

/// XY - YX. Throws std::invalid_argument on dimension mismatch.
LieElement bracket(const LieElement& x, const LieElement& y);

/// Tr(X^T Y). Throws std::invalid_argument on dimension mismatch.
double trace_form(const LieElement& x, const LieElement& y);

/// A linear subspace of so(n) with a basis orthonormal under Tr(X^T Y).
class Subspace {
public:
    /// Throws std::invalid_argument unless the basis is orthonormal within
    /// tol::orth and every element lives in so(ambient_n).
    Subspace(int ambient_n, std::vector<LieElement> basis);

    /// Orthonormal basis of span(elements), rank decided with tol::rank_rel.
    static Subspace span(int ambient_n, const std::vector<LieElement>& elements);

    /// The whole of so(n) with basis (E_ij - E_ji)/sqrt(2), i < j, in
    /// lexicographic (i, j) order.
    static Subspace full(int n);

    int ambient_n() const { return n_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<LieElement>& basis() const { return basis_; }
    const LieElement& operator[](int i) const { return basis_[static_cast<std::size_t>(i)]; }

    /// Coordinates of the orthogonal projection of x.
    Eigen::VectorXd coords(const LieElement& x) const;
    LieElement element(const Eigen::VectorXd& c) const;
    LieElement project(const LieElement& x) const;

    /// ||x - project(x)||.
    double distance(const LieElement& x) const;
    bool contains(const LieElement& x, double rel_tol = tol::num) const;

    /// Deterministic re-orthonormalization: greedily pulls in the projection
    /// of the standard so(n) basis element with the largest remaining
    /// component, ties going to the lexicographically first. Coordinate
    /// subspaces come back with standard basis elements in lex order.
    Subspace canonical() const;

    /// n^2 x dim matrix whose columns are the vectorized basis elements.
    const Eigen::MatrixXd& frame() const { return frame_; }

private:
    int n_ = 0;
    std::vector<LieElement> basis_;
    Eigen::MatrixXd frame_;
};

using SubspacePtr = std::shared_ptr<const Subspace>;

/// A linear operator on a subspace, stored as a dim x dim matrix over the
/// subspace basis: basis j maps to sum_i matrix(i, j) * basis_i.
class EndoOnM {
public:
    EndoOnM(SubspacePtr domain, Eigen::MatrixXd matrix);

    /// Matrix of x -> project(fn(x)) over the basis of `domain`.
    template <class Fn>
    static EndoOnM from_map(SubspacePtr domain, Fn&& fn)
    {
        const int d = domain->dim();
        Eigen::MatrixXd m(d, d);
        for (int j = 0; j < d; ++j)
            m.col(j) = domain->coords(fn((*domain)[j]));
        return EndoOnM(std::move(domain), std::move(m));
    }

    static EndoOnM identity(SubspacePtr domain);

    const SubspacePtr& domain() const { return domain_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }

    LieElement apply(const LieElement& x) const;
    Eigen::VectorXd apply_coords(const Eigen::VectorXd& c) const { return matrix_ * c; }

    /// Same operator expressed over `other`, which must span the same space.
    EndoOnM rebase(SubspacePtr other) const;

    /// max |matrix(i, j)|
    double max_norm() const { return dim() == 0 ? 0.0 : matrix_.cwiseAbs().maxCoeff(); }

    EndoOnM operator*(const EndoOnM& o) const;
    EndoOnM operator+(const EndoOnM& o) const;
    EndoOnM operator-(const EndoOnM& o) const;
    EndoOnM pow(int e) const;

private:
    SubspacePtr domain_;
    Eigen::MatrixXd matrix_;
};

/// Orthonormal columns spanning ker(m); singular values below
/// tol::rank_rel * sigma_max count as zero.
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m);

/// Orthonormal columns spanning the column space of m.
Eigen::MatrixXd image_basis(const Eigen::MatrixXd& m);

/// Numerical rank with the same threshold as nullspace_basis.
int numerical_rank(const Eigen::MatrixXd& m);

/// Kernel and image of an operator as canonical subspaces of so(n).
Subspace nullspace(const EndoOnM& op);
Subspace image(const EndoOnM& op);

LieElement project(const Subspace& s, const LieElement& x);

/// True iff every part lies in `whole`, the parts are pairwise orthogonal
/// and their dimensions add up to dim(whole).
bool decompose_orthogonal(const Subspace& whole, const std::vector<Subspace>& parts,
                          double eps = tol::num);

}  // namespace flagf
