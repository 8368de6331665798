#pragma once

#include "nlmsa/linalg.hpp"

namespace nlmsa {

// Result of diagonalizing an input covariance: eigenvalues sorted descending
// with the matching unitary basis, R = U diag(eigenvalues) U*.
struct WhitenedBasis {
    std::vector<double> eigenvalues;
    CMatrix basis;
};

// Hermitian positive-definite input autocorrelation R_u. Validation
// (hermitian within 1e-12 relative, eigenvalues positive) happens at
// construction; the eigendecomposition is kept for whiten() and the
// Hermitian square root.
class InputCovariance {
public:
    explicit InputCovariance(CMatrix r);

    static InputCovariance toeplitz(int m, double alpha);
    static InputCovariance diagonal(const std::vector<double>& d);
    static InputCovariance scaled_identity(int m, double value);

    int dim() const { return r_.n; }
    const CMatrix& matrix() const { return r_; }

    const WhitenedBasis& whitened() const { return basis_; }

    // Hermitian square root S = U sqrt(diag) U*, S*S = R_u.
    const CMatrix& sqrt_matrix() const { return sqrt_; }

private:
    CMatrix r_;
    WhitenedBasis basis_;
    CMatrix sqrt_;
};

// Free-function form of the diagonalization contract.
WhitenedBasis whiten(const InputCovariance& cov);

}  // namespace nlmsa
