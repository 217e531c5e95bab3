#include "kmselect/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kmselect/errors.hpp"
#include "kmselect/gamma.hpp"
#include "kmselect/truncation.hpp"

namespace kmselect {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of the chi mass of the closed interval [lo, hi] (clipped to [0, inf)).
double log_interval_mass(double lo, double hi, int dof, double scale) {
    lo = std::max(lo, 0.0);
    if (hi <= lo) return kNegInf;
    const double log_s_lo = log_chi_survival(lo, dof, scale);
    if (std::isinf(hi)) return log_s_lo;
    const double log_s_hi = log_chi_survival(hi, dof, scale);
    if (log_s_hi >= log_s_lo) return kNegInf;
    // mass = S(lo) - S(hi), kept in log space
    return log_s_lo + std::log1p(-std::exp(log_s_hi - log_s_lo));
}

double log_sum_exp(const std::vector<double>& terms) {
    double max_term = kNegInf;
    for (double t : terms) max_term = std::max(max_term, t);
    if (std::isinf(max_term)) return kNegInf;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum);
}

SelectiveTestResult make_result(const ClusterTrace& trace, const ContrastContext& ctx,
                                int k1, int k2, double stat, double scale, int dof,
                                IntervalSet support, SigmaSource source) {
    SelectiveTestResult r;
    r.stat = stat;
    r.scale = scale;
    r.dof = dof;
    r.sigma_source = source;
    r.truncation = std::move(support);
    r.pair = {k1, k2};
    r.K = trace.K;
    r.T = trace.T;
    r.seed = trace.seed;
    r.converged = trace.converged;
    r.p_value = truncated_survival(stat, {dof, scale, r.truncation});
    (void)ctx;
    return r;
}

} // namespace

std::string sigma_source_name(SigmaSource s) {
    switch (s) {
        case SigmaSource::Known: return "known";
        case SigmaSource::Med: return "med";
        case SigmaSource::Sample: return "sample";
        case SigmaSource::User: return "user";
    }
    return "unknown";
}

double truncated_survival(double c, const TruncatedChi& dist) {
    if (dist.scale <= 0.0) throw std::invalid_argument("truncated_survival: scale must be positive");
    if (c < 0.0) throw std::invalid_argument("truncated_survival: c must be nonnegative");

    std::vector<double> log_den;
    std::vector<double> log_num;
    for (const Interval& iv : dist.support.intervals()) {
        log_den.push_back(log_interval_mass(iv.lo, iv.hi, dist.dof, dist.scale));
        if (iv.hi >= c)
            log_num.push_back(log_interval_mass(std::max(iv.lo, c), iv.hi, dist.dof, dist.scale));
    }
    const double den = log_sum_exp(log_den);
    if (std::isinf(den))
        throw NumericalError("truncated_survival: truncated distribution has zero mass");
    const double num = log_sum_exp(log_num);
    if (std::isinf(num)) return 0.0;
    const double p = std::exp(num - den);
    // log ratio is finite but below the double exponent range: report the
    // smallest positive value instead of collapsing a nonzero tail to 0
    if (p == 0.0) return std::numeric_limits<double>::denorm_min();
    return std::min(1.0, p);

}

SelectiveTestResult p_selective(const DataMatrix& x, const ClusterTrace& trace,
                                int k1, int k2, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("p_selective: sigma must be positive");
    const auto& final_labels = trace.assignments.back();
    ContrastContext ctx(x, final_labels, k1, k2);
    if (ctx.stat() <= 0.0)
        throw DegenerateContrastError("p_selective: zero between-centroid distance");
    IntervalSet support = truncation_set(trace, ctx);
    return make_result(trace, ctx, k1, k2, ctx.stat(),
                       sigma * std::sqrt(ctx.nu_norm_sq()), x.q(), std::move(support),
                       SigmaSource::Known);
}

SelectiveTestResult p_selective_estimated(const DataMatrix& x, const ClusterTrace& trace,
                                          int k1, int k2, double sigma_hat,
                                          SigmaSource source) {
    if (sigma_hat <= 0.0)
        throw std::invalid_argument("p_selective_estimated: sigma_hat must be positive");
    SelectiveTestResult r = p_selective(x, trace, k1, k2, sigma_hat);
    r.sigma_source = source;
    return r;
}

SelectiveTestResult p_sigma_selective(const DataMatrix& x, const ClusterTrace& trace,
                                      int k1, int k2, const Matrix& sigma_inv_sqrt,
                                      const Matrix& sigma_sqrt) {
    const auto& final_labels = trace.assignments.back();
    ContrastContext ctx(x, final_labels, k1, k2);
    if (ctx.stat() <= 0.0)
        throw DegenerateContrastError("p_sigma_selective: zero between-centroid distance");
    const double sigma_stat = (sigma_inv_sqrt * ctx.xtnu()).norm();
    IntervalSet support = truncation_set_sigma(trace, ctx, sigma_inv_sqrt, sigma_sqrt);
    return make_result(trace, ctx, k1, k2, sigma_stat, std::sqrt(ctx.nu_norm_sq()), x.q(),
                       std::move(support), SigmaSource::Known);
}

double p_naive(const ContrastContext& ctx, int q, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("p_naive: sigma must be positive");
    return chi_survival(ctx.stat(), q, sigma * std::sqrt(ctx.nu_norm_sq()));
}

} // namespace kmselect
