#include "rydcorr/operators.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rydcorr/kernels.hpp"

namespace rydcorr {

Operator Operator::identity(int dim) {
    Operator out(dim);
    for (int i = 0; i < dim; ++i) out(i, i) = 1.0;
    return out;
}

Operator Operator::adjoint() const {
    Operator out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

Operator Operator::transpose() const {
    Operator out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

Operator Operator::conjugate() const {
    Operator out(dim_);
    for (std::size_t k = 0; k < a_.size(); ++k) out.a_[k] = std::conj(a_[k]);
    return out;
}

cxd Operator::trace() const {
    cxd t{};
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double Operator::one_norm() const {
    double best = 0.0;
    for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double Operator::max_abs() const {
    double best = 0.0;
    for (const cxd& v : a_) best = std::max(best, std::abs(v));
    return best;
}

double Operator::frobenius_norm() const {
    double s = 0.0;
    for (const cxd& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

bool Operator::is_hermitian(double tol) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

Operator& Operator::operator+=(const Operator& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("Operator+=: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Operator& Operator::operator-=(const Operator& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("Operator-=: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Operator& Operator::operator*=(cxd s) {
    for (cxd& v : a_) v *= s;
    return *this;
}

Operator Operator::operator*(const Operator& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("Operator*: dimension mismatch");
    Operator out(dim_);
    kernels::matmul(data(), o.data(), out.data(), dim_, dim_, dim_);
    return out;
}

std::vector<cxd> Operator::apply(const std::vector<cxd>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("Operator::apply: dimension mismatch");
    std::vector<cxd> y(x.size());
    kernels::matvec(data(), x.data(), y.data(), dim_, dim_);
    return y;
}

Operator level_op(Level m, Level n) {
    Operator out(3);
    out(static_cast<int>(m), static_cast<int>(n)) = 1.0;
    return out;
}

Operator kron(const Operator& a, const Operator& b) {
    const int ad = a.dim(), bd = b.dim();
    Operator out(ad * bd);
    for (int i = 0; i < ad; ++i)
        for (int j = 0; j < ad; ++j) {
            const cxd aij = a(i, j);
            if (aij == cxd{}) continue;
            for (int k = 0; k < bd; ++k)
                for (int l = 0; l < bd; ++l)
                    out(i * bd + k, j * bd + l) = aij * b(k, l);
        }
    return out;
}

Operator embed(const Operator& op, int atom, int n_atoms) {
    if (op.dim() != 3) throw std::invalid_argument("embed: single-atom operator must be 3x3");
    if (atom < 0 || atom >= n_atoms) throw std::invalid_argument("embed: atom index out of range");
    int left = 1, right = 1;
    for (int k = 0; k < atom; ++k) left *= 3;
    for (int k = atom + 1; k < n_atoms; ++k) right *= 3;
    // result(i,j) with i = (il*3 + im)*right + ir: identity on il and ir blocks
    const int dim = left * 3 * right;
    Operator out(dim);
    for (int il = 0; il < left; ++il)
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                const cxd v = op(m, n);
                if (v == cxd{}) continue;
                for (int ir = 0; ir < right; ++ir)
                    out((il * 3 + m) * right + ir, (il * 3 + n) * right + ir) = v;
            }
    return out;
}

std::vector<cxd> vec(const Operator& x) {
    const int d = x.dim();
    std::vector<cxd> v(static_cast<std::size_t>(d) * d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(j) * d + i] = x(i, j);
    return v;
}

Operator unvec(const std::vector<cxd>& v, int d) {
    if (v.size() != static_cast<std::size_t>(d) * d)
        throw std::invalid_argument("unvec: size is not d^2");
    Operator x(d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) x(i, j) = v[static_cast<std::size_t>(j) * d + i];
    return x;
}

namespace {

using EigenMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic>;

NullPair null_spaces_impl(const Operator& m, double rel_tol, bool want_left) {
    if (rel_tol <= 0) throw std::invalid_argument("null_space: tol must be positive");
    const int d = m.dim();
    Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        map(m.data(), d, d);
    EigenMat a = map;
    Eigen::BDCSVD<EigenMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = rel_tol * (d > 0 ? s(0) : 0.0);
    NullPair out;
    for (int k = 0; k < d; ++k) {
        if (s(k) > cutoff) continue;
        std::vector<cxd> v(d), w(d);
        for (int i = 0; i < d; ++i) v[i] = svd.matrixV()(i, k);
        out.right.push_back(std::move(v));
        if (want_left) {
            for (int i = 0; i < d; ++i) w[i] = svd.matrixU()(i, k);
            out.left.push_back(std::move(w));
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<cxd>> null_space(const Operator& m, double rel_tol) {
    return null_spaces_impl(m, rel_tol, false).right;
}

std::vector<std::vector<cxd>> null_space(const SuperOperator& m, double rel_tol) {
    return null_space(m.mat, rel_tol);
}

NullPair null_spaces(const Operator& m, double rel_tol) {
    return null_spaces_impl(m, rel_tol, true);
}

}  // namespace rydcorr
