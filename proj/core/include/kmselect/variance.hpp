#ifndef KMSELECT_VARIANCE_HPP
#define KMSELECT_VARIANCE_HPP

#include <string>

#include "kmselect/data_matrix.hpp"

namespace kmselect {

enum class SigmaMethod { Med, MedUncentered, Sample };

std::string sigma_method_name(SigmaMethod m);

struct SigmaEstimate {
    double value;        // >= 0; 0 only for degenerate input
    SigmaMethod method;
    int n;
    int q;
    bool degenerate;     // exactly constant input; downstream p-values reject it
};

// Median of the chi-squared(1) distribution, computed via the inverse
// regularized gamma rather than transcribed.
double chi1_median();

// Median-of-squares estimator after subtracting each column's median,
// normalized by the chi-squared(1) median. Even counts use the midpoint.
SigmaEstimate sigma_med(const DataMatrix& x);

// Same, without the column-median centering.
SigmaEstimate sigma_med_uncentered(const DataMatrix& x);

// Column-mean-centered root mean square with (nq - q) degrees of freedom.
SigmaEstimate sigma_sample(const DataMatrix& x);

// Exact bias of sigma_sample^2 as a functional of the mean matrix:
// (1 / (2 n (n-1) q)) * sum_j sum_i sum_i' (mu_ij - mu_i'j)^2.
double bias_sample(const Matrix& mu);

} // namespace kmselect

#endif
