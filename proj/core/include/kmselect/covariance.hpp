#ifndef KMSELECT_COVARIANCE_HPP
#define KMSELECT_COVARIANCE_HPP

#include "kmselect/data_matrix.hpp"

namespace kmselect {

// Symmetric square-root factors of a q x q SPD covariance, with an optional
// ridge added to the eigenvalues before taking roots.
struct CovarianceFactors {
    Matrix sigma;
    Matrix inv_sqrt;
    Matrix sqrt;
    double ridge;
};

// Eigendecomposes sigma and forms U (L + ridge I)^{+-1/2} U^T. Inputs with
// asymmetry above 1e-10 (relative) are rejected; below that they are
// symmetrized as (A + A^T)/2. Throws if any shifted eigenvalue <= 1e-12.
CovarianceFactors factorize(const Matrix& sigma, double ridge = 0.0);

// Row-wise whitening x_i -> Sigma^{-1/2} x_i.
DataMatrix whiten(const DataMatrix& x, const CovarianceFactors& factors);

} // namespace kmselect

#endif
