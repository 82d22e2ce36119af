#include "rydcorr/matexp.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rydcorr/kernels.hpp"

namespace rydcorr {

namespace {

Operator mul(const Operator& a, const Operator& b) { return a * b; }

// Solve (v - u) X = (v + u) for X.
Operator pade_solve(const Operator& u, const Operator& v) {
    const int d = u.dim();
    using RowMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMat lhs(d, d), rhs(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            lhs(i, j) = v(i, j) - u(i, j);
            rhs(i, j) = v(i, j) + u(i, j);
        }
    RowMat x = Eigen::PartialPivLU<RowMat>(lhs).solve(rhs);
    Operator out(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = x(i, j);
    return out;
}

Operator pade_low(const Operator& a, const std::vector<double>& b) {
    // U = A * sum_j b[2j+1] A^(2j),  V = sum_j b[2j] A^(2j)
    const int d = a.dim();
    const Operator a2 = mul(a, a);
    Operator even = Operator::identity(d) * cxd(b[0]);
    Operator odd = Operator::identity(d) * cxd(b[1]);
    Operator pw = a2;
    for (std::size_t k = 2; k + 1 < b.size(); k += 2) {
        even += pw * cxd(b[k]);
        odd += pw * cxd(b[k + 1]);
        if (k + 3 < b.size()) pw = mul(pw, a2);
    }
    return pade_solve(mul(a, odd), even);
}

Operator pade13(const Operator& a) {
    static const double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const int d = a.dim();
    const Operator id = Operator::identity(d);
    const Operator a2 = mul(a, a);
    const Operator a4 = mul(a2, a2);
    const Operator a6 = mul(a2, a4);
    Operator u_in = a6 * cxd(b[13]) + a4 * cxd(b[11]) + a2 * cxd(b[9]);
    u_in = mul(a6, u_in);
    u_in += a6 * cxd(b[7]) + a4 * cxd(b[5]) + a2 * cxd(b[3]) + id * cxd(b[1]);
    const Operator u = mul(a, u_in);
    Operator v = a6 * cxd(b[12]) + a4 * cxd(b[10]) + a2 * cxd(b[8]);
    v = mul(a6, v);
    v += a6 * cxd(b[6]) + a4 * cxd(b[4]) + a2 * cxd(b[2]) + id * cxd(b[0]);
    return pade_solve(u, v);
}

}  // namespace

Operator expm(const Operator& a) {
    const double nrm = a.one_norm();
    static const std::vector<double> b3 = {120, 60, 12, 1};
    static const std::vector<double> b5 = {30240, 15120, 3360, 420, 30, 1};
    static const std::vector<double> b7 = {17297280, 8648640, 1995840, 277200,
                                           25200,    1512,    56,      1};
    static const std::vector<double> b9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
    if (nrm <= 1.495585217958292e-2) return pade_low(a, b3);
    if (nrm <= 2.539398330063230e-1) return pade_low(a, b5);
    if (nrm <= 9.504178996162932e-1) return pade_low(a, b7);
    if (nrm <= 2.097847961257068e0) return pade_low(a, b9);

    const double theta13 = 5.371920351148152e0;
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    Operator scaled = a * cxd(std::ldexp(1.0, -s));
    Operator f = pade13(scaled);
    for (int k = 0; k < s; ++k) f = mul(f, f);
    return f;
}

}  // namespace rydcorr
