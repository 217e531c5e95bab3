#ifndef KMSELECT_CONTRAST_HPP
#define KMSELECT_CONTRAST_HPP

#include <utility>
#include <vector>

#include "kmselect/data_matrix.hpp"

namespace kmselect {

// nu_i = 1{label_i = k1}/|C1| - 1{label_i = k2}/|C2|, so that x^T nu equals
// the difference of the two cluster centroids.
Vector contrast_vector(const std::vector<int>& labels, int k1, int k2);

// Everything the truncation-set coefficients reuse for one cluster pair:
// nu, ||nu||^2, the observed statistic ||x^T nu||, and the unit direction.
class ContrastContext {
public:
    ContrastContext(const DataMatrix& x, const std::vector<int>& labels, int k1, int k2);

    const Vector& nu() const { return nu_; }
    double nu_norm_sq() const { return nu_norm_sq_; }
    const Vector& xtnu() const { return xtnu_; }          // q-vector x^T nu
    double stat() const { return stat_; }                 // ||x^T nu||_2
    const Vector& direction() const { return direction_; } // dir(x^T nu); requires stat > 0
    std::pair<int, int> pair() const { return pair_; }
    const Matrix& x() const { return x_; }
    int n() const { return static_cast<int>(x_.rows()); }
    int q() const { return static_cast<int>(x_.cols()); }

private:
    Matrix x_;
    Vector nu_;
    double nu_norm_sq_;
    Vector xtnu_;
    double stat_;
    Vector direction_;
    std::pair<int, int> pair_;
};

// The one-parameter perturbation path x'(phi): slides the between-centroid
// distance to phi while fixing the orthogonal complement and the direction.
DataMatrix perturbed_data(const ContrastContext& ctx, double phi);

// Known-covariance path x~'(phi). sigma_inv_sqrt / sigma_sqrt are the
// symmetric factors of a q x q SPD covariance; phi lives on the whitened
// statistic's scale.
DataMatrix perturbed_data_sigma(const ContrastContext& ctx, double phi,
                                const Matrix& sigma_inv_sqrt, const Matrix& sigma_sqrt);

} // namespace kmselect

#endif
