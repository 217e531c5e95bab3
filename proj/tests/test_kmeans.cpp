#include <algorithm>
#include <vector>

#include <doctest.h>

#include "kmselect/errors.hpp"
#include "kmselect/kmeans.hpp"
#include "test_helpers.hpp"

using namespace kmselect;

TEST_CASE("sample_initial_centroids: distinct, in range, deterministic") {
    DataMatrix x(kmtest::random_matrix(20, 3, 7ULL));
    auto idx = sample_initial_centroids(x, 5, 42ULL);
    REQUIRE(idx.size() == 5);
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (int i : idx) {
        CHECK(i >= 0);
        CHECK(i < 20);
    }
    CHECK(sample_initial_centroids(x, 5, 42ULL) == idx);
    CHECK(sample_initial_centroids(x, 5, 43ULL) != idx);
}

// Oracle: scan every (point, centroid) distance by hand.
TEST_CASE("assign_step matches brute-force nearest-centroid oracle") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Matrix x = kmtest::random_matrix(30, 4, seed);
        Matrix c = kmtest::random_matrix(3, 4, seed + 1000);
        auto labels = assign_step(x, c);
        REQUIRE(labels.size() == 30);
        for (int i = 0; i < 30; ++i) {
            int best = 0;
            double best_d = (x.row(i) - c.row(0)).squaredNorm();
            for (int k = 1; k < 3; ++k) {
                const double d = (x.row(i) - c.row(k)).squaredNorm();
                if (d < best_d) { best_d = d; best = k; }
            }
            CHECK(labels[static_cast<std::size_t>(i)] == best);
        }
    }
}

TEST_CASE("assign_step ties break to the smallest index") {
    Matrix x(1, 1);
    x(0, 0) = 1.0;
    Matrix c(3, 1);
    c(0, 0) = 0.0;
    c(1, 0) = 2.0;  // equidistant with c0
    c(2, 0) = 2.0;
    CHECK(assign_step(x, c)[0] == 0);
}

TEST_CASE("update_centroids: cluster means; empty cluster throws") {
    Matrix x = kmtest::random_matrix(10, 2, 5ULL);
    std::vector<int> labels = {0, 0, 1, 1, 1, 0, 1, 0, 1, 1};
    Matrix c = update_centroids(x, labels, 2);
    Vector m0 = Vector::Zero(2), m1 = Vector::Zero(2);
    for (int i = 0; i < 10; ++i)
        (labels[static_cast<std::size_t>(i)] == 0 ? m0 : m1) += x.row(i).transpose();
    CHECK((c.row(0).transpose() - m0 / 4.0).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((c.row(1).transpose() - m1 / 6.0).norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(update_centroids(x, labels, 3), EmptyClusterError);
}

TEST_CASE("lloyd: objective nonincreasing along the trace, converged fixpoint") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        DataMatrix x(kmtest::random_matrix(40, 3, seed * 17ULL));
        ClusterTrace trace = lloyd(x, 3, 50, seed);
        REQUIRE(trace.assignments.size() == static_cast<std::size_t>(trace.T) + 1);
        CHECK(trace.K == 3);
        CHECK(trace.seed == seed);
        double prev = objective(x.values(), trace.assignments[0]);
        for (int t = 1; t <= trace.T; ++t) {
            const double cur = objective(x.values(), trace.assignments[static_cast<std::size_t>(t)]);
            CHECK(cur <= prev + 1e-9);
            prev = cur;
        }
        if (trace.converged) {
            // final labels are a fixed point of assign-then-update
            Matrix c = update_centroids(x.values(), trace.assignments.back(), 3);
            CHECK(assign_step(x.values(), c) == trace.assignments.back());
        }
    }
}

TEST_CASE("lloyd: deterministic in the seed") {
    DataMatrix x(kmtest::random_matrix(25, 2, 3ULL));
    ClusterTrace a = lloyd(x, 3, 30, 11ULL);
    ClusterTrace b = lloyd(x, 3, 30, 11ULL);
    CHECK(a.initial_indices == b.initial_indices);
    CHECK(a.assignments == b.assignments);
    CHECK(a.T == b.T);
    CHECK(a.converged == b.converged);
}

TEST_CASE("lloyd: t_max caps assignment updates") {
    DataMatrix x(kmtest::random_matrix(60, 2, 9ULL));
    ClusterTrace trace = lloyd(x, 4, 1, 2ULL);
    CHECK(trace.T <= 1);
}

TEST_CASE("lloyd: duplicate initial rows starve a cluster") {
    Matrix m(4, 1);
    m(0, 0) = 0.0;
    m(1, 0) = 0.0;
    m(2, 0) = 5.0;
    m(3, 0) = 5.1;
    DataMatrix x(m);
    // find a seed whose two initial indices are the duplicate rows {0, 1}
    bool found = false;
    for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
        auto idx = sample_initial_centroids(x, 2, seed);
        std::sort(idx.begin(), idx.end());
        if (idx == std::vector<int>{0, 1}) {
            CHECK_THROWS_AS(lloyd(x, 2, 10, seed), EmptyClusterError);
            found = true;
        }
    }
    CHECK(found);
}
