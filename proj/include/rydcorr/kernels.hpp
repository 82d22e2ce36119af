#pragma once

#include <complex>

// Dense complex kernels used on the hot paths (superoperator exponentials and
// tau-grid propagation). Each kernel has a serial reference implementation and
// an OpenMP variant that partitions output rows; within a row the accumulation
// order is identical in both, so results are bit-for-bit equal for any thread
// count. bench/kernel_bench compares the two.

namespace rydcorr::kernels {

using cxd = std::complex<double>;

enum class ExecMode {
    Serial,  // always the reference implementation
    OpenMP,  // always the parallel implementation
    Auto,    // OpenMP for large problems outside existing parallel regions
};

void set_exec_mode(ExecMode m);
ExecMode exec_mode();

// y = A x, A is m x n row-major.
void matvec_serial(const cxd* a, const cxd* x, cxd* y, int m, int n);
void matvec_omp(const cxd* a, const cxd* x, cxd* y, int m, int n);
void matvec(const cxd* a, const cxd* x, cxd* y, int m, int n);

// C = A B, A is m x k, B is k x n, all row-major. C must not alias A or B.
void matmul_serial(const cxd* a, const cxd* b, cxd* c, int m, int k, int n);
void matmul_omp(const cxd* a, const cxd* b, cxd* c, int m, int k, int n);
void matmul(const cxd* a, const cxd* b, cxd* c, int m, int k, int n);

}  // namespace rydcorr::kernels
