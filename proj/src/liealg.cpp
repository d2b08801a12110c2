#include "flagf/liealg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flagf {

namespace {

void require_same_n(const LieElement& x, const LieElement& y, const char* what)
{
    if (x.n() != y.n())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(x.n()) + " vs " + std::to_string(y.n()) + ")");
}

Eigen::Map<const Eigen::VectorXd> vec(const Eigen::MatrixXd& m)
{
    return {m.data(), m.size()};
}

}  // namespace

LieElement::LieElement(int n) : m_(Eigen::MatrixXd::Zero(n, n)) {}

LieElement::LieElement(const Eigen::MatrixXd& m)
{
    if (m.rows() != m.cols())
        throw std::invalid_argument("LieElement: matrix is not square");
    if (m.size() > 0) {
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        const double asym = (m + m.transpose()).cwiseAbs().maxCoeff() / 2.0;
        if (asym > tol::sym * scale)
            throw std::invalid_argument("LieElement: matrix is not skew-symmetric (defect " +
                                        std::to_string(asym) + ")");
    }
    m_ = (m - m.transpose()) / 2.0;
}

LieElement LieElement::unit(int n, int i, int j)
{
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
        throw std::invalid_argument("LieElement::unit: bad index pair");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m(i, j) = 1.0;
    m(j, i) = -1.0;
    return LieElement(std::move(m), Trusted{});
}

LieElement& LieElement::operator+=(const LieElement& o)
{
    require_same_n(*this, o, "LieElement::operator+=");
    m_ += o.m_;
    return *this;
}

LieElement& LieElement::operator-=(const LieElement& o)
{
    require_same_n(*this, o, "LieElement::operator-=");
    m_ -= o.m_;
    return *this;
}

LieElement& LieElement::operator*=(double c)
{
    m_ *= c;
    return *this;
}

LieElement bracket(const LieElement& x, const LieElement& y)
{
    require_same_n(x, y, "bracket");
    Eigen::MatrixXd xy = x.m_ * y.m_;
    // XY - YX = XY - (XY)^T for skew X, Y; this form is exactly skew.
    return LieElement(xy - xy.transpose(), LieElement::Trusted{});
}

double trace_form(const LieElement& x, const LieElement& y)
{
    require_same_n(x, y, "trace_form");
    return x.matrix().cwiseProduct(y.matrix()).sum();
}

// ---------------------------------------------------------------------------

Subspace::Subspace(int ambient_n, std::vector<LieElement> basis)
    : n_(ambient_n), basis_(std::move(basis))
{
    if (ambient_n < 0)
        throw std::invalid_argument("Subspace: negative ambient dimension");
    frame_.resize(static_cast<Eigen::Index>(n_) * n_, dim());
    for (int j = 0; j < dim(); ++j) {
        if (basis_[j].n() != n_)
            throw std::invalid_argument("Subspace: basis element has wrong dimension");
        frame_.col(j) = vec(basis_[j].matrix());
    }
    if (dim() > 0) {
        const Eigen::MatrixXd gram = frame_.transpose() * frame_;
        const double defect =
            (gram - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
        if (defect > tol::orth)
            throw std::invalid_argument("Subspace: basis is not orthonormal (defect " +
                                        std::to_string(defect) + ")");
    }
}

Subspace Subspace::span(int ambient_n, const std::vector<LieElement>& elements)
{
    Eigen::MatrixXd cols(static_cast<Eigen::Index>(ambient_n) * ambient_n,
                         static_cast<Eigen::Index>(elements.size()));
    for (std::size_t j = 0; j < elements.size(); ++j) {
        if (elements[j].n() != ambient_n)
            throw std::invalid_argument("Subspace::span: element has wrong dimension");
        cols.col(static_cast<Eigen::Index>(j)) = vec(elements[j].matrix());
    }
    const Eigen::MatrixXd q = image_basis(cols);
    std::vector<LieElement> basis;
    basis.reserve(static_cast<std::size_t>(q.cols()));
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(q.col(j).data(), ambient_n, ambient_n);
        basis.emplace_back(m);
    }
    // SVD columns are orthonormal to ~1e-15; canonical() re-derives the
    // basis from the standard elements so the result is reproducible.
    Subspace raw(ambient_n, std::move(basis));
    return raw.canonical();
}

Subspace Subspace::full(int n)
{
    std::vector<LieElement> basis;
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            basis.push_back(r * LieElement::unit(n, i, j));
    return Subspace(n, std::move(basis));
}

Eigen::VectorXd Subspace::coords(const LieElement& x) const
{
    if (x.n() != n_)
        throw std::invalid_argument("Subspace::coords: dimension mismatch");
    return frame_.transpose() * vec(x.matrix());
}

LieElement Subspace::element(const Eigen::VectorXd& c) const
{
    if (c.size() != dim())
        throw std::invalid_argument("Subspace::element: coordinate length mismatch");
    const Eigen::VectorXd v = frame_ * c;
    return LieElement(Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data(), n_, n_)));
}

LieElement Subspace::project(const LieElement& x) const
{
    if (dim() == 0)
        return LieElement(n_);
    return element(coords(x));
}

double Subspace::distance(const LieElement& x) const
{
    return (x - project(x)).norm();
}

bool Subspace::contains(const LieElement& x, double rel_tol) const
{
    return distance(x) <= rel_tol * std::max(1.0, x.norm());
}

Subspace Subspace::canonical() const
{
    const int d = dim();
    if (d == 0)
        return *this;
    const Subspace std_basis = full(n_);
    const int big_n = std_basis.dim();

    // Candidate vectors in subspace coordinates.
    Eigen::MatrixXd cand(d, big_n);
    for (int e = 0; e < big_n; ++e)
        cand.col(e) = coords(std_basis[e]);

    Eigen::MatrixXd q(d, d);
    for (int picked = 0; picked < d; ++picked) {
        int best = -1;
        double best_norm = 0.0;
        for (int e = 0; e < big_n; ++e) {
            const double nrm = cand.col(e).norm();
            if (nrm > best_norm + 1e-12) {
                best = e;
                best_norm = nrm;
            }
        }
        if (best < 0 || best_norm < 1e-8)
            throw std::runtime_error("Subspace::canonical: lost rank during re-orthonormalization");
        Eigen::VectorXd v = cand.col(best) / best_norm;
        // second pass against round-off
        for (int p = 0; p < picked; ++p)
            v -= q.col(p).dot(v) * q.col(p);
        v.normalize();
        q.col(picked) = v;
        for (int e = 0; e < big_n; ++e)
            cand.col(e) -= v.dot(cand.col(e)) * v;
    }

    std::vector<LieElement> basis;
    basis.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        basis.push_back(element(q.col(j)));
    return Subspace(n_, std::move(basis));
}

// ---------------------------------------------------------------------------

EndoOnM::EndoOnM(SubspacePtr domain, Eigen::MatrixXd matrix)
    : domain_(std::move(domain)), matrix_(std::move(matrix))
{
    if (!domain_)
        throw std::invalid_argument("EndoOnM: null domain");
    if (matrix_.rows() != domain_->dim() || matrix_.cols() != domain_->dim())
        throw std::invalid_argument("EndoOnM: matrix must be dim x dim of its domain");
}

EndoOnM EndoOnM::identity(SubspacePtr domain)
{
    const int d = domain->dim();
    return EndoOnM(std::move(domain), Eigen::MatrixXd::Identity(d, d));
}

LieElement EndoOnM::apply(const LieElement& x) const
{
    return domain_->element(matrix_ * domain_->coords(x));
}

EndoOnM EndoOnM::rebase(SubspacePtr other) const
{
    if (other->dim() != dim())
        throw std::invalid_argument("EndoOnM::rebase: dimension mismatch");
    Eigen::MatrixXd c(dim(), dim());
    for (int j = 0; j < dim(); ++j)
        c.col(j) = domain_->coords((*other)[j]);
    if (dim() > 0 &&
        (c.transpose() * c - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff() > tol::num)
        throw std::invalid_argument("EndoOnM::rebase: subspaces differ");
    return EndoOnM(std::move(other), c.transpose() * matrix_ * c);
}

EndoOnM EndoOnM::operator*(const EndoOnM& o) const
{
    if (o.dim() != dim())
        throw std::invalid_argument("EndoOnM: dimension mismatch");
    return EndoOnM(domain_, matrix_ * o.matrix_);
}

EndoOnM EndoOnM::operator+(const EndoOnM& o) const
{
    if (o.dim() != dim())
        throw std::invalid_argument("EndoOnM: dimension mismatch");
    return EndoOnM(domain_, matrix_ + o.matrix_);
}

EndoOnM EndoOnM::operator-(const EndoOnM& o) const
{
    if (o.dim() != dim())
        throw std::invalid_argument("EndoOnM: dimension mismatch");
    return EndoOnM(domain_, matrix_ - o.matrix_);
}

EndoOnM EndoOnM::pow(int e) const
{
    if (e < 0)
        throw std::invalid_argument("EndoOnM::pow: negative exponent");
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(dim(), dim());
    for (int i = 0; i < e; ++i)
        r = r * matrix_;
    return EndoOnM(domain_, std::move(r));
}

// ---------------------------------------------------------------------------

namespace {

int rank_from(const Eigen::VectorXd& sv)
{
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0;
    const double cut = tol::rank_rel * sv(0);
    int r = 0;
    while (r < sv.size() && sv(r) > cut)
        ++r;
    return r;
}

}  // namespace

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& m)
{
    if (m.cols() == 0)
        return Eigen::MatrixXd(0, 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const int r = rank_from(svd.singularValues());
    return svd.matrixV().rightCols(m.cols() - r);
}

Eigen::MatrixXd image_basis(const Eigen::MatrixXd& m)
{
    if (m.cols() == 0 || m.rows() == 0)
        return Eigen::MatrixXd(m.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const int r = rank_from(svd.singularValues());
    return svd.matrixU().leftCols(r);
}

int numerical_rank(const Eigen::MatrixXd& m)
{
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return rank_from(svd.singularValues());
}

namespace {

Subspace lift(const Subspace& domain, const Eigen::MatrixXd& coord_cols)
{
    std::vector<LieElement> basis;
    for (Eigen::Index j = 0; j < coord_cols.cols(); ++j)
        basis.push_back(domain.element(coord_cols.col(j)));
    return Subspace(domain.ambient_n(), std::move(basis)).canonical();
}

}  // namespace

Subspace nullspace(const EndoOnM& op)
{
    return lift(*op.domain(), nullspace_basis(op.matrix()));
}

Subspace image(const EndoOnM& op)
{
    return lift(*op.domain(), image_basis(op.matrix()));
}

LieElement project(const Subspace& s, const LieElement& x)
{
    return s.project(x);
}

bool decompose_orthogonal(const Subspace& whole, const std::vector<Subspace>& parts, double eps)
{
    int total = 0;
    for (const auto& p : parts) {
        if (p.ambient_n() != whole.ambient_n())
            throw std::invalid_argument("decompose_orthogonal: dimension mismatch");
        total += p.dim();
        for (const auto& b : p.basis())
            if (!whole.contains(b, eps))
                return false;
    }
    if (total != whole.dim())
        return false;
    for (std::size_t a = 0; a < parts.size(); ++a)
        for (std::size_t b = a + 1; b < parts.size(); ++b)
            for (const auto& x : parts[a].basis())
                for (const auto& y : parts[b].basis())
                    if (std::abs(trace_form(x, y)) > eps)
                        return false;
    return true;
}

}  // namespace flagf
