#include "kmselect/truncation.hpp"


#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

#include "kmselect/errors.hpp"

namespace kmselect {

namespace {

// Per-(iteration, cluster) aggregates reused across the O(nKT) inequalities:
// weighted centroid of the raw data, its projection on dir(x^T nu), and the
// weighted mean of nu.
struct ClusterAggregate {
    Vector mean;       // q-vector, sum_i' w_i' x_i'
    double mean_dot_dir;
    double nu_mean;    // sum_i' w_i' nu_i'
    int count;
};

std::vector<ClusterAggregate> aggregates_at(const ClusterTrace& trace,
                                            const ContrastContext& ctx, int t) {
    const auto& labels = trace.assignments[static_cast<std::size_t>(t)];
    const Matrix& x = ctx.x();
    std::vector<ClusterAggregate> agg(static_cast<std::size_t>(trace.K));
    for (auto& a : agg) {
        a.mean = Vector::Zero(x.cols());
        a.mean_dot_dir = 0.0;
        a.nu_mean = 0.0;
        a.count = 0;
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& a = agg[static_cast<std::size_t>(labels[i])];
        a.mean += x.row(static_cast<Eigen::Index>(i));
        a.nu_mean += ctx.nu()[static_cast<Eigen::Index>(i)];
        ++a.count;
    }
    for (int k = 0; k < trace.K; ++k) {
        auto& a = agg[static_cast<std::size_t>(k)];
        if (a.count == 0) throw EmptyClusterError(k, t);
        a.mean /= static_cast<double>(a.count);
        a.nu_mean /= static_cast<double>(a.count);
        a.mean_dot_dir = a.mean.dot(ctx.direction());
    }
    return agg;
}

// Quadratic for ||[x'(phi)]_i - (weighted centroid)||^2 given the aggregates.
Quadratic centroid_quadratic(const ContrastContext& ctx, int i, const ClusterAggregate& agg) {
    const double nn = ctx.nu_norm_sq();
    const double diff_nu = ctx.nu()[i] - agg.nu_mean;
    const double a = (diff_nu * diff_nu) / (nn * nn);
    const double x_dot_dir = ctx.x().row(i).dot(ctx.direction());
    const double b =
        (2.0 / nn) * (diff_nu * (x_dot_dir - agg.mean_dot_dir) - a * nn * ctx.stat());
    const Vector residual =
        ctx.x().row(i).transpose() - agg.mean - (diff_nu / nn) * ctx.xtnu();
    return {a, b, residual.squaredNorm()};
}

Quadratic scale_by_ratio(const Quadratic& quad, double ratio) {
    return {ratio * ratio * quad.a, ratio * quad.b, quad.c};
}

Quadratic difference(const Quadratic& lhs, const Quadratic& rhs) {
    return {lhs.a - rhs.a, lhs.b - rhs.b, lhs.c - rhs.c};
}

// Shared driver for the spherical and known-covariance truncation sets; the
// only difference is the ratio applied to the phi-dependent coefficients and
// the statistic that must land inside the set.
IntervalSet build_truncation_set(const ClusterTrace& trace, const ContrastContext& ctx,
                                 double ratio, double observed) {
    const int n = ctx.n();
    const int K = trace.K;
    std::vector<IntervalSet> pieces;
    pieces.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(K - 1) *
                   static_cast<std::size_t>(trace.T + 1));

    // Initialization inequalities: observation i must stay closest to the
    // sampled centroid of its recorded initial cluster.
    const auto& init_labels = trace.assignments[0];
    for (int i = 0; i < n; ++i) {
        const int chosen = init_labels[static_cast<std::size_t>(i)];
        const int chosen_row = trace.initial_indices[static_cast<std::size_t>(chosen)];
        const Quadratic lhs = scale_by_ratio(coeffs_pairwise(ctx, i, chosen_row), ratio);
        for (int k = 0; k < K; ++k) {
            if (k == chosen) continue;
            const int other_row = trace.initial_indices[static_cast<std::size_t>(k)];
            const Quadratic rhs = scale_by_ratio(coeffs_pairwise(ctx, i, other_row), ratio);
            pieces.push_back(solve_quadratic_leq(difference(lhs, rhs)));
        }
    }

    // Iteration inequalities: at step t the recorded cluster's centroid
    // (formed from iteration t-1 memberships) must stay the closest.
    for (int t = 1; t <= trace.T; ++t) {
        const auto agg = aggregates_at(trace, ctx, t - 1);
        const auto& labels = trace.assignments[static_cast<std::size_t>(t)];
        for (int i = 0; i < n; ++i) {
            const int chosen = labels[static_cast<std::size_t>(i)];
            const Quadratic lhs =
                scale_by_ratio(centroid_quadratic(ctx, i, agg[static_cast<std::size_t>(chosen)]),
                               ratio);
            for (int k = 0; k < K; ++k) {
                if (k == chosen) continue;
                const Quadratic rhs = scale_by_ratio(
                    centroid_quadratic(ctx, i, agg[static_cast<std::size_t>(k)]), ratio);
                pieces.push_back(solve_quadratic_leq(difference(lhs, rhs)));
            }
        }
    }

    IntervalSet result = IntervalSet::intersect_all(pieces);
    result = result.intersect(IntervalSet::single(0.0, std::numeric_limits<double>::infinity()));

    if (!result.contains(observed) &&
        result.distance_to(observed) > 1e-7 * std::max(1.0, observed)) {
        throw NumericalError("truncation_set: observed statistic is outside the computed set");
    }
    return result;
}

} // namespace

Vector iteration_weights(const ClusterTrace& trace, int t, int k) {
    if (t < 0 || t > trace.T) throw std::invalid_argument("iteration_weights: t out of range");
    if (k < 0 || k >= trace.K) throw std::invalid_argument("iteration_weights: k out of range");
    const auto& labels = trace.assignments[static_cast<std::size_t>(t)];
    int count = 0;
    for (int c : labels)
        if (c == k) ++count;
    if (count == 0) throw EmptyClusterError(k, t);
    Vector w = Vector::Zero(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == k) w[static_cast<Eigen::Index>(i)] = 1.0 / count;
    return w;
}

Quadratic coeffs_pairwise(const ContrastContext& ctx, int i, int j) {
    const double nn = ctx.nu_norm_sq();
    const double diff_nu = ctx.nu()[i] - ctx.nu()[j];
    const double a = (diff_nu * diff_nu) / (nn * nn);
    const Vector diff_x = ctx.x().row(i) - ctx.x().row(j);
    const double b =
        2.0 * (diff_nu / nn * diff_x.dot(ctx.direction()) - a * ctx.stat());
    const Vector residual = diff_x - (diff_nu / nn) * ctx.xtnu();
    return {a, b, residual.squaredNorm()};
}

Quadratic coeffs_centroid(const ContrastContext& ctx, int i, const Vector& w) {
    if (w.size() != ctx.nu().size())
        throw std::invalid_argument("coeffs_centroid: weight length mismatch");
    ClusterAggregate agg;
    agg.mean = ctx.x().transpose() * w;
    agg.mean_dot_dir = agg.mean.dot(ctx.direction());
    agg.nu_mean = ctx.nu().dot(w);
    agg.count = 1;
    return centroid_quadratic(ctx, i, agg);
}

Quadratic coeffs_pairwise_sigma(const ContrastContext& ctx, int i, int j, double ratio) {
    return scale_by_ratio(coeffs_pairwise(ctx, i, j), ratio);
}

Quadratic coeffs_centroid_sigma(const ContrastContext& ctx, int i, const Vector& w,
                                double ratio) {
    return scale_by_ratio(coeffs_centroid(ctx, i, w), ratio);
}

IntervalSet truncation_set(const ClusterTrace& trace, const ContrastContext& ctx) {
    return build_truncation_set(trace, ctx, 1.0, ctx.stat());
}

IntervalSet truncation_set_sigma(const ClusterTrace& trace, const ContrastContext& ctx,
                                 const Matrix& sigma_inv_sqrt, const Matrix& sigma_sqrt) {
    const Matrix product = sigma_sqrt * sigma_inv_sqrt;
    if ((product - Matrix::Identity(product.rows(), product.cols())).norm() >
        1e-6 * std::max(1.0, product.norm()))
        throw std::invalid_argument("truncation_set_sigma: covariance factors are inconsistent");
    const double sigma_stat = (sigma_inv_sqrt * ctx.xtnu()).norm();
    if (sigma_stat <= 0.0)
        throw DegenerateContrastError("truncation_set_sigma: whitened statistic is zero");
    return build_truncation_set(trace, ctx, ctx.stat() / sigma_stat, sigma_stat);
}

bool replays_trace(const Matrix& xp, const ClusterTrace& trace) {
    Matrix centroids(trace.K, xp.cols());
    for (int k = 0; k < trace.K; ++k)
        centroids.row(k) = xp.row(trace.initial_indices[static_cast<std::size_t>(k)]);
    std::vector<int> labels = assign_step(xp, centroids);
    if (labels != trace.assignments[0]) return false;
    for (int t = 1; t <= trace.T; ++t) {
        try {
            centroids = update_centroids(xp, labels, trace.K);
        } catch (const EmptyClusterError&) {
            return false;  // conditioning event cannot hold
        }
        labels = assign_step(xp, centroids);
        if (labels != trace.assignments[static_cast<std::size_t>(t)]) return false;
    }
    return true;
}

bool oracle_membership(const ClusterTrace& trace, const ContrastContext& ctx, double phi) {
    if (phi < 0.0) throw std::invalid_argument("oracle_membership: phi must be nonnegative");
    return replays_trace(perturbed_data(ctx, phi).values(), trace);
}

bool oracle_membership_sigma(const ClusterTrace& trace, const ContrastContext& ctx,
                             double phi, const Matrix& sigma_inv_sqrt,
                             const Matrix& sigma_sqrt) {
    if (phi < 0.0) throw std::invalid_argument("oracle_membership_sigma: phi must be nonnegative");
    return replays_trace(perturbed_data_sigma(ctx, phi, sigma_inv_sqrt, sigma_sqrt).values(),
                         trace);
}

std::size_t truncation_inequality_count(const ClusterTrace& trace) {
    const auto n = trace.assignments[0].size();
    return n * static_cast<std::size_t>(trace.K - 1) * static_cast<std::size_t>(trace.T + 1);
}

} // namespace kmselect
