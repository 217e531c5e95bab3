#include "kmselect/contrast.hpp"

#include <stdexcept>

#include "kmselect/errors.hpp"

namespace kmselect {

Vector contrast_vector(const std::vector<int>& labels, int k1, int k2) {
    if (k1 == k2) throw std::invalid_argument("contrast_vector: clusters must differ");
    int n1 = 0;
    int n2 = 0;
    for (int c : labels) {
        if (c == k1) ++n1;
        if (c == k2) ++n2;
    }
    if (n1 == 0) throw EmptyClusterError(k1, -1);
    if (n2 == 0) throw EmptyClusterError(k2, -1);
    Vector nu = Vector::Zero(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == k1) nu[static_cast<Eigen::Index>(i)] = 1.0 / n1;
        else if (labels[i] == k2) nu[static_cast<Eigen::Index>(i)] = -1.0 / n2;
    }
    return nu;
}

ContrastContext::ContrastContext(const DataMatrix& x, const std::vector<int>& labels,
                                 int k1, int k2)
    : x_(x.values()), pair_(k1, k2) {
    if (static_cast<int>(labels.size()) != x.n())
        throw std::invalid_argument("ContrastContext: label count must match rows");
    nu_ = contrast_vector(labels, k1, k2);
    nu_norm_sq_ = nu_.squaredNorm();
    xtnu_ = x_.transpose() * nu_;
    stat_ = xtnu_.norm();
    if (stat_ > 0.0)
        direction_ = xtnu_ / stat_;
    else
        direction_ = Vector::Zero(x_.cols());
}

DataMatrix perturbed_data(const ContrastContext& ctx, double phi) {
    if (ctx.stat() <= 0.0)
        throw DegenerateContrastError("perturbed_data: centroids coincide, direction undefined");
    Matrix xp = ctx.x() + ((phi - ctx.stat()) / ctx.nu_norm_sq()) * ctx.nu() *
                              ctx.direction().transpose();
    return DataMatrix(std::move(xp));
}

DataMatrix perturbed_data_sigma(const ContrastContext& ctx, double phi,
                                const Matrix& sigma_inv_sqrt, const Matrix& sigma_sqrt) {
    if (ctx.stat() <= 0.0)
        throw DegenerateContrastError("perturbed_data_sigma: centroids coincide");
    const Matrix product = sigma_sqrt * sigma_inv_sqrt;
    const double residual =
        (product - Matrix::Identity(product.rows(), product.cols())).norm();
    if (residual > 1e-6 * std::max(1.0, product.norm()))
        throw std::invalid_argument("perturbed_data_sigma: covariance factors are inconsistent");

    const double sigma_stat = (sigma_inv_sqrt * ctx.xtnu()).norm();
    if (sigma_stat <= 0.0)
        throw DegenerateContrastError("perturbed_data_sigma: whitened statistic is zero");
    const double ratio = ctx.stat() / sigma_stat;

    // Row form: x_i - nu_i ||x^T nu|| / ||nu||^2 dir + (r nu_i / ||nu||^2 phi) dir,
    // with r rescaling phi from the whitened to the raw statistic's units.
    Matrix xp = ctx.x() +
                ((ratio * phi - ctx.stat()) / ctx.nu_norm_sq()) * ctx.nu() *
                    ctx.direction().transpose();
    return DataMatrix(std::move(xp));
}

} // namespace kmselect
