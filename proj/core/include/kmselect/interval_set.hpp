#ifndef KMSELECT_INTERVAL_SET_HPP
#define KMSELECT_INTERVAL_SET_HPP

#include <span>
#include <vector>

namespace kmselect {

// Closed interval on the extended real line.
struct Interval {
    double lo;
    double hi;
};

// a*phi^2 + b*phi + c <= 0
struct Quadratic {
    double a;
    double b;
    double c;
};

// Finite union of disjoint closed intervals, sorted and normalized.
// Endpoints closer than 1e-12 * max(1, |endpoint|) are merged, so repeated
// roots do not produce touching intervals.
class IntervalSet {
public:
    IntervalSet() = default;  // empty set

    static IntervalSet empty();
    static IntervalSet full_line();
    static IntervalSet single(double lo, double hi);
    // Sorts, drops inverted intervals, merges overlapping/touching ones.
    static IntervalSet from_intervals(std::vector<Interval> intervals);

    bool is_empty() const { return intervals_.empty(); }
    bool contains(double x) const;
    // Distance from x to the nearest point of the set (0 if contained).
    double distance_to(double x) const;
    std::size_t size() const { return intervals_.size(); }
    const std::vector<Interval>& intervals() const { return intervals_; }

    IntervalSet intersect(const IntervalSet& other) const;
    // Endpoint sweep: a point belongs to the result iff it belongs to every
    // input set. O(E log E) in the total number of endpoints.
    static IntervalSet intersect_all(std::span<const IntervalSet> sets);

private:
    std::vector<Interval> intervals_;
};

// Exact solution set of a*phi^2 + b*phi + c <= 0 over the reals.
// Coefficients below 1e-12 relative to the remaining ones are treated as
// zero, so exact theoretical cancellations survive floating point.
IntervalSet solve_quadratic_leq(const Quadratic& quad);

} // namespace kmselect

#endif
