#ifndef KMSELECT_TRUNCATION_HPP
#define KMSELECT_TRUNCATION_HPP

#include "kmselect/contrast.hpp"
#include "kmselect/interval_set.hpp"
#include "kmselect/kmeans.hpp"

namespace kmselect {

// Normalized membership indicator w^(t)(k): entries are 0 or 1/|cluster|.
Vector iteration_weights(const ClusterTrace& trace, int t, int k);

// ||[x'(phi)]_i - [x'(phi)]_j||^2 = a phi^2 + b phi + c.
Quadratic coeffs_pairwise(const ContrastContext& ctx, int i, int j);

// ||[x'(phi)]_i - sum_i' w_i' [x'(phi)]_i'||^2 = a phi^2 + b phi + c
// for a weight vector w with nonnegative entries summing to one.
Quadratic coeffs_centroid(const ContrastContext& ctx, int i, const Vector& w);

// Known-covariance variants: with r = ||x^T nu|| / ||Sigma^{-1/2} x^T nu||,
// the phi coefficient scales by r and the phi^2 coefficient by r^2.
Quadratic coeffs_pairwise_sigma(const ContrastContext& ctx, int i, int j, double ratio);
Quadratic coeffs_centroid_sigma(const ContrastContext& ctx, int i, const Vector& w,
                                double ratio);

// The truncation set: all phi >= 0 for which rerunning Lloyd on x'(phi) with
// the same initial centroid indices reproduces every recorded assignment.
// Built as the intersection of n(K-1)(T+1) quadratic-inequality solution
// sets (comparisons against the chosen cluster itself are trivially true and
// skipped). Throws NumericalError if the observed statistic falls outside.
IntervalSet truncation_set(const ClusterTrace& trace, const ContrastContext& ctx);

// Same conditioning event along the known-covariance path x~'(phi); interval
// endpoints live on the whitened statistic's scale.
IntervalSet truncation_set_sigma(const ClusterTrace& trace, const ContrastContext& ctx,
                                 const Matrix& sigma_inv_sqrt, const Matrix& sigma_sqrt);

// Ground-truth membership test: rerun Lloyd on the perturbed data and compare
// every intermediate assignment. O(nKTq) per phi; shipped for validation.
bool oracle_membership(const ClusterTrace& trace, const ContrastContext& ctx, double phi);
bool oracle_membership_sigma(const ClusterTrace& trace, const ContrastContext& ctx,
                             double phi, const Matrix& sigma_inv_sqrt,
                             const Matrix& sigma_sqrt);

// Shared rerun check: does Lloyd on xp (same initial indices) replay trace?
bool replays_trace(const Matrix& xp, const ClusterTrace& trace);

// Number of quadratic inequalities truncation_set generates for a trace.
std::size_t truncation_inequality_count(const ClusterTrace& trace);

} // namespace kmselect

#endif
