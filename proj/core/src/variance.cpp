#include "kmselect/variance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kmselect/gamma.hpp"

namespace kmselect {

namespace {

// Midpoint convention for even counts.
double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("median_of: empty input");
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    const double upper = values[mid];
    if (n % 2 == 1) return upper;
    const double lower =
        *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

SigmaEstimate med_from_values(std::vector<double> squared, SigmaMethod method,
                              const DataMatrix& x) {
    const double med = median_of(std::move(squared));
    const double value = std::sqrt(med / chi1_median());
    return {value, method, x.n(), x.q(), value == 0.0};
}

} // namespace

std::string sigma_method_name(SigmaMethod m) {
    switch (m) {
        case SigmaMethod::Med: return "med";
        case SigmaMethod::MedUncentered: return "med_uncentered";
        case SigmaMethod::Sample: return "sample";
    }
    return "unknown";
}

double chi1_median() {
    static const double value = 2.0 * gamma_q_inverse(0.5, 0.5);
    return value;
}

SigmaEstimate sigma_med(const DataMatrix& x) {
    const Matrix& v = x.values();
    std::vector<double> squared;
    squared.reserve(static_cast<std::size_t>(v.size()));
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        std::vector<double> column(v.col(j).data(), v.col(j).data() + v.rows());
        const double col_median = median_of(std::move(column));
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const double centered = v(i, j) - col_median;
            squared.push_back(centered * centered);
        }
    }
    return med_from_values(std::move(squared), SigmaMethod::Med, x);
}

SigmaEstimate sigma_med_uncentered(const DataMatrix& x) {
    const Matrix& v = x.values();
    std::vector<double> squared;
    squared.reserve(static_cast<std::size_t>(v.size()));
    for (Eigen::Index j = 0; j < v.cols(); ++j)
        for (Eigen::Index i = 0; i < v.rows(); ++i)
            squared.push_back(v(i, j) * v(i, j));
    return med_from_values(std::move(squared), SigmaMethod::MedUncentered, x);
}

SigmaEstimate sigma_sample(const DataMatrix& x) {
    if (x.n() < 2) throw std::invalid_argument("sigma_sample: need n >= 2");
    const Matrix& v = x.values();
    const Eigen::RowVectorXd column_means = v.colwise().mean();
    const double ss = (v.rowwise() - column_means).squaredNorm();
    const double dof = static_cast<double>(x.n()) * x.q() - x.q();
    const double value = std::sqrt(ss / dof);
    return {value, SigmaMethod::Sample, x.n(), x.q(), value == 0.0};
}

double bias_sample(const Matrix& mu) {
    const auto n = mu.rows();
    const auto q = mu.cols();
    if (n < 2) return 0.0;
    // sum_i sum_i' (mu_ij - mu_i'j)^2 = 2n sum_i mu_ij^2 - 2 (sum_i mu_ij)^2
    double total = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
        const double sum = mu.col(j).sum();
        const double sum_sq = mu.col(j).squaredNorm();
        total += 2.0 * static_cast<double>(n) * sum_sq - 2.0 * sum * sum;
    }
    return total / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1) *
                    static_cast<double>(q));
}

} // namespace kmselect
