#include "kmselect/covariance.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace kmselect {

CovarianceFactors factorize(const Matrix& sigma, double ridge) {
    if (sigma.rows() != sigma.cols())
        throw std::invalid_argument("factorize: covariance must be square");
    if (ridge < 0.0) throw std::invalid_argument("factorize: ridge must be nonnegative");
    const double asymmetry = (sigma - sigma.transpose()).norm();
    if (asymmetry > 1e-10 * std::max(1.0, sigma.norm()))
        throw std::invalid_argument("factorize: covariance is not symmetric");
    const Matrix symmetric = 0.5 * (sigma + sigma.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("factorize: eigendecomposition failed");
    Vector eigenvalues = solver.eigenvalues().array() + ridge;
    if ((eigenvalues.array() <= 1e-12).any())
        throw std::invalid_argument("factorize: covariance is not positive definite after ridge");

    const Matrix& u = solver.eigenvectors();
    const Vector root = eigenvalues.array().sqrt();
    CovarianceFactors factors;
    factors.sigma = sigma;
    factors.ridge = ridge;
    factors.sqrt = u * root.asDiagonal() * u.transpose();
    factors.inv_sqrt = u * root.cwiseInverse().asDiagonal() * u.transpose();
    return factors;
}

DataMatrix whiten(const DataMatrix& x, const CovarianceFactors& factors) {
    if (x.q() != factors.inv_sqrt.rows())
        throw std::invalid_argument("whiten: dimension mismatch");
    // Row-vector convention: each row x_i maps to (Sigma^{-1/2} x_i)^T.
    return DataMatrix(x.values() * factors.inv_sqrt);
}

} // namespace kmselect
