#pragma once

#include <complex>
#include <vector>

namespace nlmsa {

using cplx = std::complex<double>;

// Minimal dense square matrices, row-major. Sized for M <= 64 filters;
// no attempt at large-scale performance.
struct CMatrix {
    int n = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    explicit CMatrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim) {}
    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    static CMatrix identity(int dim);
};

struct RMatrix {
    int n = 0;
    std::vector<double> a;

    RMatrix() = default;
    explicit RMatrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const double& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    static RMatrix identity(int dim);
};

struct HermitianEig {
    std::vector<double> values;  // descending
    CMatrix basis;               // unitary, columns are eigenvectors; A = U diag(values) U*
};

struct SymmetricEig {
    std::vector<double> values;  // descending
    RMatrix basis;
};

// Cyclic Jacobi for Hermitian matrices, off-diagonal driven below
// 1e-13 * frobenius(A). Throws ValidationError if A is not Hermitian
// within hermitian_tol * scale.
HermitianEig hermitian_eig(const CMatrix& A, double hermitian_tol = 1e-12);

SymmetricEig symmetric_eig(const RMatrix& A);

// Spectral radius by direct eigenvalues (A symmetric).
double spectral_radius(const RMatrix& A);

// Solve A x = b by LU with partial pivoting. Throws ConditioningError on a
// (near-)singular pivot.
std::vector<double> solve(const RMatrix& A, const std::vector<double>& b);

// y = A x
std::vector<double> matvec(const RMatrix& A, const std::vector<double>& x);
std::vector<cplx> matvec(const CMatrix& A, const std::vector<cplx>& x);

// U* x (adjoint application), for basis rotations.
std::vector<cplx> adjoint_apply(const CMatrix& U, const std::vector<cplx>& x);

// U* B U, for rotating covariances into an eigenbasis.
CMatrix conjugate_by_basis(const CMatrix& U, const CMatrix& B);

double frobenius_norm(const CMatrix& A);

// Neumaier compensated accumulator: order-deterministic summation with
// error carried separately.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace nlmsa
