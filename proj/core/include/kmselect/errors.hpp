#ifndef KMSELECT_ERRORS_HPP
#define KMSELECT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kmselect {

// Base class for everything thrown by the library (invalid arguments use
// std::invalid_argument directly).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A cluster lost all members during a centroid update. Callers are expected
// to discard the run and reseed; the trace is unusable for inference.
struct EmptyClusterError : Error {
    EmptyClusterError(int cluster, int iteration)
        : Error("cluster " + std::to_string(cluster) + " has no members at iteration " +
                std::to_string(iteration)),
          cluster(cluster), iteration(iteration) {}
    int cluster;
    int iteration;
};

// The two tested centroids coincide, so the perturbation direction is undefined.
struct DegenerateContrastError : Error {
    using Error::Error;
};

// Numerical-consistency failures (e.g. the observed statistic falls outside
// the computed truncation set, or a truncated distribution has zero mass).
struct NumericalError : Error {
    using Error::Error;
};

} // namespace kmselect

#endif
