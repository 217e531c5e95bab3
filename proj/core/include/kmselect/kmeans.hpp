#ifndef KMSELECT_KMEANS_HPP
#define KMSELECT_KMEANS_HPP

#include <cstdint>
#include <vector>

#include "kmselect/data_matrix.hpp"

namespace kmselect {

// Full record of one Lloyd run. assignments[t][i] is the 0-based cluster of
// observation i at iteration t, for t = 0..T. The trace is the conditioning
// event for selective inference, so it records every intermediate assignment.
struct ClusterTrace {
    std::vector<int> initial_indices;            // K distinct row indices, order = cluster id
    std::vector<std::vector<int>> assignments;   // (T+1) x n
    int T = 0;                                   // final assignment index
    bool converged = false;                      // assignments[T] == assignments[T-1]
    std::uint64_t seed = 0;
    int K = 0;
};

// Step 1 of Lloyd's algorithm: K distinct row indices, deterministic in
// (n, K, seed). The index order defines cluster labels 0..K-1.
std::vector<int> sample_initial_centroids(const DataMatrix& x, int k, std::uint64_t seed);

// Nearest-centroid assignment; ties break to the smallest cluster index.
std::vector<int> assign_step(const Matrix& x, const Matrix& centroids);

// Per-cluster means. Throws EmptyClusterError if any cluster has no members.
Matrix update_centroids(const Matrix& x, const std::vector<int>& labels, int k);

// Within-cluster sum of squared distances to cluster means.
double objective(const Matrix& x, const std::vector<int>& labels);

// Seeded Lloyd's algorithm recording every intermediate assignment.
// Stops when assignments repeat (converged) or after t_max assignment
// updates following initialization (not converged). Empty clusters abort
// the run with EmptyClusterError; the caller should reseed.
ClusterTrace lloyd(const DataMatrix& x, int k, int t_max, std::uint64_t seed);

} // namespace kmselect

#endif
