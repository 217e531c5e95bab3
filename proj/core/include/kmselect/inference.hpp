#ifndef KMSELECT_INFERENCE_HPP
#define KMSELECT_INFERENCE_HPP

#include <cstdint>
#include <string>

#include "kmselect/contrast.hpp"
#include "kmselect/interval_set.hpp"
#include "kmselect/kmeans.hpp"

namespace kmselect {

// Scaled chi_q distribution truncated to a subset of [0, inf).
struct TruncatedChi {
    int dof;
    double scale;
    IntervalSet support;
};

enum class SigmaSource { Known, Med, Sample, User };

std::string sigma_source_name(SigmaSource s);

struct SelectiveTestResult {
    double p_value;
    double stat;            // observed ||x^T nu|| (or whitened variant)
    double scale;           // scale of the reference chi law
    SigmaSource sigma_source;
    IntervalSet truncation;
    std::pair<int, int> pair;
    int dof;
    // trace metadata
    int K;
    int T;
    std::uint64_t seed;
    bool converged;
};

// Pr(phi >= c | phi in support) for phi ~ scale * chi_dof. All interval
// masses are evaluated in log space (survival differences), so results stay
// finite deep in the tail. Throws NumericalError on zero truncated mass.
double truncated_survival(double c, const TruncatedChi& dist);

// The selective p-value with known sigma: conditions on the full Lloyd trace.
SelectiveTestResult p_selective(const DataMatrix& x, const ClusterTrace& trace,
                                int k1, int k2, double sigma);

// Plug-in variant with an estimated scale.
SelectiveTestResult p_selective_estimated(const DataMatrix& x, const ClusterTrace& trace,
                                          int k1, int k2, double sigma_hat,
                                          SigmaSource source = SigmaSource::User);

// Known general covariance: statistic ||Sigma^{-1/2} x^T nu||, scale ||nu||.
SelectiveTestResult p_sigma_selective(const DataMatrix& x, const ClusterTrace& trace,
                                      int k1, int k2, const Matrix& sigma_inv_sqrt,
                                      const Matrix& sigma_sqrt);

// Unconditional scaled-chi tail probability of the same statistic; no
// selection adjustment.
double p_naive(const ContrastContext& ctx, int q, double sigma);

} // namespace kmselect

#endif
