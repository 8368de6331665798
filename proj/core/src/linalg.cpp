#include "nlmsa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlmsa/errors.hpp"

namespace nlmsa {

CMatrix CMatrix::identity(int dim) {
    CMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

RMatrix RMatrix::identity(int dim) {
    RMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

double frobenius_norm(const CMatrix& A) {
    double s = 0.0;
    for (const auto& v : A.a) s += std::norm(v);
    return std::sqrt(s);
}

namespace {

double off_diag_norm(const CMatrix& A) {
    double s = 0.0;
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            if (i != j) s += std::norm(A(i, j));
    return std::sqrt(s);
}

// One complex Jacobi rotation zeroing A(p,q), A Hermitian. The rotation is
// J = I except J(p,p)=c, J(p,q)=-s*e^{i phi}, J(q,p)=s*e^{-i phi}, J(q,q)=c
// with phi = arg A(p,q); A <- J* A J, U <- U J.
void rotate(CMatrix& A, CMatrix& U, int p, int q) {
    const cplx apq = A(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;
    const cplx phase = apq / mag;  // e^{i phi}
    const double app = A(p, p).real();
    const double aqq = A(q, q).real();
    const double tau = (app - aqq) / (2.0 * mag);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const int n = A.n;

    // columns p,q of A: A <- A J
    for (int i = 0; i < n; ++i) {
        const cplx aip = A(i, p), aiq = A(i, q);
        A(i, p) = c * aip + s * std::conj(phase) * aiq;
        A(i, q) = -s * phase * aip + c * aiq;
    }
    // rows p,q: A <- J* A
    for (int j = 0; j < n; ++j) {
        const cplx apj = A(p, j), aqj = A(q, j);
        A(p, j) = c * apj + s * phase * aqj;
        A(q, j) = -s * std::conj(phase) * apj + c * aqj;
    }
    // Diagonals are analytically real; the (p,q) entry is left as computed
    // (it lands at rounding level) so the convergence test stays honest.
    A(p, p) = cplx(A(p, p).real(), 0.0);
    A(q, q) = cplx(A(q, q).real(), 0.0);

    for (int i = 0; i < n; ++i) {
        const cplx uip = U(i, p), uiq = U(i, q);
        U(i, p) = c * uip + s * std::conj(phase) * uiq;
        U(i, q) = -s * phase * uip + c * uiq;
    }
}

}  // namespace

HermitianEig hermitian_eig(const CMatrix& A, double hermitian_tol) {
    const int n = A.n;
    if (n <= 0 || static_cast<size_t>(n) * n != A.a.size())
        throw ValidationError("hermitian_eig: malformed matrix");
    double scale = 0.0;
    for (const auto& v : A.a) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < n; ++i) {
        if (std::abs(A(i, i).imag()) > hermitian_tol * std::max(scale, 1.0))
            throw ValidationError("hermitian_eig: diagonal not real");
        for (int j = i + 1; j < n; ++j)
            if (std::abs(A(i, j) - std::conj(A(j, i))) > hermitian_tol * std::max(scale, 1.0))
                throw ValidationError("hermitian_eig: matrix not Hermitian");
    }

    CMatrix W(n);
    // symmetrize: removes the sub-tolerance asymmetry before iterating
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            W(i, j) = 0.5 * (A(i, j) + std::conj(A(j, i)));
    CMatrix U = CMatrix::identity(n);

    const double stop = 1e-13 * std::max(frobenius_norm(W), 1e-300);
    for (int sweep = 0; sweep < 100 && off_diag_norm(W) > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q)
                if (std::abs(W(p, q)) > stop / (static_cast<double>(n) * n)) rotate(W, U, p, q);
    }

    HermitianEig out;
    out.values.resize(static_cast<size_t>(n));
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < n; ++i) out.values[static_cast<size_t>(i)] = W(i, i).real();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return out.values[static_cast<size_t>(a)] > out.values[static_cast<size_t>(b)];
    });
    std::vector<double> sorted(static_cast<size_t>(n));
    out.basis = CMatrix(n);
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<size_t>(j)];
        sorted[static_cast<size_t>(j)] = out.values[static_cast<size_t>(src)];
        for (int i = 0; i < n; ++i) out.basis(i, j) = U(i, src);
    }
    out.values = std::move(sorted);
    return out;
}

SymmetricEig symmetric_eig(const RMatrix& A) {
    CMatrix C(A.n);
    for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i];
    HermitianEig h = hermitian_eig(C, 1e-9);
    SymmetricEig out;
    out.values = std::move(h.values);
    out.basis = RMatrix(A.n);
    for (size_t i = 0; i < out.basis.a.size(); ++i) out.basis.a[i] = h.basis.a[i].real();
    return out;
}

double spectral_radius(const RMatrix& A) {
    SymmetricEig e = symmetric_eig(A);
    double r = 0.0;
    for (double v : e.values) r = std::max(r, std::abs(v));
    return r;
}

std::vector<double> solve(const RMatrix& A, const std::vector<double>& b) {
    const int n = A.n;
    if (static_cast<int>(b.size()) != n) throw ValidationError("solve: dimension mismatch");
    RMatrix lu = A;
    std::vector<double> x = b;
    std::vector<int> piv(static_cast<size_t>(n));
    std::iota(piv.begin(), piv.end(), 0);
    for (int k = 0; k < n; ++k) {
        int imax = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(imax, k))) imax = i;
        if (imax != k) {
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(imax, j));
            std::swap(x[static_cast<size_t>(k)], x[static_cast<size_t>(imax)]);
        }
        const double pivot = lu(k, k);
        if (std::abs(pivot) < 1e-300)
            throw ConditioningError("solve: singular pivot at column " + std::to_string(k));
        for (int i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / pivot;
            lu(i, k) = f;
            for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            x[static_cast<size_t>(i)] -= f * x[static_cast<size_t>(k)];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[static_cast<size_t>(i)] -= lu(i, j) * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(i)] /= lu(i, i);
    }
    return x;
}

std::vector<double> matvec(const RMatrix& A, const std::vector<double>& x) {
    const int n = A.n;
    std::vector<double> y(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += A(i, j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s;
    }
    return y;
}

std::vector<cplx> matvec(const CMatrix& A, const std::vector<cplx>& x) {
    const int n = A.n;
    std::vector<cplx> y(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j) s += A(i, j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s;
    }
    return y;
}

std::vector<cplx> adjoint_apply(const CMatrix& U, const std::vector<cplx>& x) {
    const int n = U.n;
    std::vector<cplx> y(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j) s += std::conj(U(j, i)) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s;
    }
    return y;
}

CMatrix conjugate_by_basis(const CMatrix& U, const CMatrix& B) {
    const int n = U.n;
    CMatrix tmp(n);  // tmp = B U
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) s += B(i, k) * U(k, j);
            tmp(i, j) = s;
        }
    CMatrix out(n);  // out = U* tmp
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) s += std::conj(U(k, i)) * tmp(k, j);
            out(i, j) = s;
        }
    return out;
}

}  // namespace nlmsa
