#include "kmselect/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "kmselect/errors.hpp"
#include "kmselect/rng.hpp"

namespace kmselect {

std::vector<int> sample_initial_centroids(const DataMatrix& x, int k, std::uint64_t seed) {
    if (k < 1 || k > x.n())
        throw std::invalid_argument("sample_initial_centroids: need 1 <= K <= n");
    return sample_without_replacement(x.n(), k, seed);
}

std::vector<int> assign_step(const Matrix& x, const Matrix& centroids) {
    const auto n = x.rows();
    const auto k = centroids.rows();
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < k; ++c) {
            // Accumulate squared differences in feature order; ties are
            // decided on the exact computed doubles, smallest index wins.
            double d = 0.0;
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                const double diff = x(i, j) - centroids(c, j);
                d += diff * diff;
            }
            if (d < best_dist) {
                best_dist = d;
                best = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

Matrix update_centroids(const Matrix& x, const std::vector<int>& labels, int k) {
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int c = labels[i];
        if (c < 0 || c >= k) throw std::invalid_argument("update_centroids: label out of range");
        sums.row(c) += x.row(static_cast<Eigen::Index>(i));
        ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) throw EmptyClusterError(c, -1);
        sums.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    return sums;
}

double objective(const Matrix& x, const std::vector<int>& labels) {
    int k = 0;
    for (int c : labels) k = std::max(k, c + 1);
    const Matrix centroids = update_centroids(x, labels, k);
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        total += (x.row(static_cast<Eigen::Index>(i)) - centroids.row(labels[i])).squaredNorm();
    return total;
}

ClusterTrace lloyd(const DataMatrix& x, int k, int t_max, std::uint64_t seed) {
    if (k < 1 || k > x.n()) throw std::invalid_argument("lloyd: need 1 <= K <= n");
    if (t_max < 1) throw std::invalid_argument("lloyd: need T_max >= 1");

    ClusterTrace trace;
    trace.seed = seed;
    trace.K = k;
    trace.initial_indices = sample_initial_centroids(x, k, seed);

    Matrix centroids(k, x.q());
    for (int c = 0; c < k; ++c)
        centroids.row(c) = x.values().row(trace.initial_indices[static_cast<std::size_t>(c)]);
    trace.assignments.push_back(assign_step(x.values(), centroids));

    // T counts assignment updates after initialization.
    for (int t = 1; t <= t_max; ++t) {
        try {
            centroids = update_centroids(x.values(), trace.assignments.back(), k);
        } catch (const EmptyClusterError& e) {
            throw EmptyClusterError(e.cluster, t - 1);
        }
        std::vector<int> labels = assign_step(x.values(), centroids);
        const bool same = (labels == trace.assignments.back());
        trace.assignments.push_back(std::move(labels));
        if (same) {
            trace.converged = true;
            break;
        }
    }
    trace.T = static_cast<int>(trace.assignments.size()) - 1;
    return trace;
}

} // namespace kmselect
