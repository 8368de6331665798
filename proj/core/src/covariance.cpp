#include "nlmsa/covariance.hpp"

#include <cmath>

#include "nlmsa/errors.hpp"

namespace nlmsa {

InputCovariance::InputCovariance(CMatrix r) : r_(std::move(r)) {
    if (r_.n < 1) throw ValidationError("InputCovariance: dimension must be >= 1");
    HermitianEig eig = hermitian_eig(r_, 1e-12);  // rejects non-Hermitian input
    for (double v : eig.values)
        if (!(v > 0.0))
            throw ValidationError("InputCovariance: matrix is not positive definite");
    sqrt_ = CMatrix(r_.n);
    for (int i = 0; i < r_.n; ++i)
        for (int j = 0; j < r_.n; ++j) {
            cplx acc{0.0, 0.0};
            for (int k = 0; k < r_.n; ++k)
                acc += eig.basis(i, k) * std::sqrt(eig.values[static_cast<size_t>(k)]) *
                       std::conj(eig.basis(j, k));
            sqrt_(i, j) = acc;
        }
    basis_.eigenvalues = std::move(eig.values);
    basis_.basis = std::move(eig.basis);
}

InputCovariance InputCovariance::toeplitz(int m, double alpha) {
    if (m < 1) throw ValidationError("toeplitz: dimension must be >= 1");
    if (!(std::fabs(alpha) < 1.0))
        throw ValidationError("toeplitz: |alpha| must be < 1 for positive definiteness");
    CMatrix r(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) r(i, j) = cplx{std::pow(alpha, std::abs(i - j)), 0.0};
    return InputCovariance(std::move(r));
}

InputCovariance InputCovariance::diagonal(const std::vector<double>& d) {
    const int m = static_cast<int>(d.size());
    if (m < 1) throw ValidationError("diagonal: dimension must be >= 1");
    CMatrix r(m);
    for (int i = 0; i < m; ++i) r(i, i) = cplx{d[static_cast<size_t>(i)], 0.0};
    return InputCovariance(std::move(r));
}

InputCovariance InputCovariance::scaled_identity(int m, double value) {
    if (m < 1) throw ValidationError("scaled_identity: dimension must be >= 1");
    return diagonal(std::vector<double>(static_cast<size_t>(m), value));
}

WhitenedBasis whiten(const InputCovariance& cov) { return cov.whitened(); }

}  // namespace nlmsa
