#ifndef KMSELECT_DATA_MATRIX_HPP
#define KMSELECT_DATA_MATRIX_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace kmselect {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// n x q matrix of observations, rows = samples. Construction validates that
// every entry is finite; downstream code relies on it.
class DataMatrix {
public:
    explicit DataMatrix(Matrix values) : values_(std::move(values)) {
        if (values_.rows() < 1 || values_.cols() < 1)
            throw std::invalid_argument("DataMatrix: need at least one row and one column");
        if (!values_.allFinite())
            throw std::invalid_argument("DataMatrix: entries must be finite");
    }

    const Matrix& values() const { return values_; }
    int n() const { return static_cast<int>(values_.rows()); }
    int q() const { return static_cast<int>(values_.cols()); }

private:
    Matrix values_;
};

} // namespace kmselect

#endif
