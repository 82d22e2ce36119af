#pragma once

#include <complex>
#include <vector>

namespace rydcorr {

using cxd = std::complex<double>;

// Dense complex square matrix over a small Hilbert space (row-major storage).
// Immutable by convention once built; all algebra returns new values.
class Operator {
public:
    Operator() = default;
    explicit Operator(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {}

    static Operator identity(int dim);

    int dim() const { return dim_; }
    bool empty() const { return dim_ == 0; }

    cxd& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    const cxd& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

    cxd* data() { return a_.data(); }
    const cxd* data() const { return a_.data(); }

    Operator adjoint() const;
    Operator transpose() const;
    Operator conjugate() const;
    cxd trace() const;
    double one_norm() const;   // max absolute column sum
    double max_abs() const;    // entrywise sup norm
    double frobenius_norm() const;
    bool is_hermitian(double tol) const;

    Operator& operator+=(const Operator& o);
    Operator& operator-=(const Operator& o);
    Operator& operator*=(cxd s);

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator*(cxd s, Operator a) { return a *= s; }
    friend Operator operator*(Operator a, cxd s) { return a *= s; }
    Operator operator*(const Operator& o) const;  // kernels::matmul

    // y = this * x
    std::vector<cxd> apply(const std::vector<cxd>& x) const;

private:
    int dim_ = 0;
    std::vector<cxd> a_;
};

// Atomic level order is fixed globally: |g> = 0, |e> = 1, |r> = 2.
// The N-atom product basis is |m_0 m_1 ... m_{N-1}> with atom 0 the slowest
// index, i.e. basis index = sum_i m_i * 3^(N-1-i).
enum Level : int { LvlG = 0, LvlE = 1, LvlR = 2 };

// 3x3 single-atom transition operator |m><n|.
Operator level_op(Level m, Level n);

// Tensor product: entry ((i*b.dim+k),(j*b.dim+l)) = a(i,j) * b(k,l).
Operator kron(const Operator& a, const Operator& b);

// Lift a 3x3 single-atom operator to the N-atom space:
// I^(x atom) (x) op (x) I^(x (n_atoms-atom-1)). Throws std::invalid_argument
// for op.dim != 3 or atom out of range.
Operator embed(const Operator& op, int atom, int n_atoms);

// Generator acting on column-vectorized density matrices.
struct SuperOperator {
    int hdim = 0;   // Hilbert dimension d; mat.dim() == d*d
    Operator mat;
};

// Column-major vectorization: vec(X)[j*d + i] = X(i,j).
std::vector<cxd> vec(const Operator& x);
Operator unvec(const std::vector<cxd>& v, int d);

// Orthonormal basis of the right null space: all right singular vectors with
// singular value <= rel_tol * largest singular value. A result with more than
// one vector signals a non-unique steady state when m is a Liouvillian.
std::vector<std::vector<cxd>> null_space(const Operator& m, double rel_tol = 1e-10);
std::vector<std::vector<cxd>> null_space(const SuperOperator& m, double rel_tol = 1e-10);

// Right and left null bases from one factorization (left vectors w satisfy
// w^dag m = 0 and span the conserved functionals of a Liouvillian).
struct NullPair {
    std::vector<std::vector<cxd>> right;
    std::vector<std::vector<cxd>> left;
};
NullPair null_spaces(const Operator& m, double rel_tol = 1e-10);

}  // namespace rydcorr
