#include "kmselect/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmselect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-12;

double merge_tol(double endpoint) {
    return kRelTol * std::max(1.0, std::abs(endpoint));
}

std::vector<Interval> normalize(std::vector<Interval> raw) {
    std::erase_if(raw, [](const Interval& iv) { return iv.lo > iv.hi; });
    std::sort(raw.begin(), raw.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const Interval& iv : raw) {
        if (!out.empty() && iv.lo <= out.back().hi + merge_tol(out.back().hi)) {
            out.back().hi = std::max(out.back().hi, iv.hi);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

} // namespace

IntervalSet IntervalSet::empty() { return IntervalSet{}; }

IntervalSet IntervalSet::full_line() { return single(-kInf, kInf); }

IntervalSet IntervalSet::single(double lo, double hi) {
    IntervalSet s;
    if (lo <= hi) s.intervals_.push_back({lo, hi});
    return s;
}

IntervalSet IntervalSet::from_intervals(std::vector<Interval> intervals) {
    IntervalSet s;
    s.intervals_ = normalize(std::move(intervals));
    return s;
}

bool IntervalSet::contains(double x) const {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    --it;
    return x >= it->lo && x <= it->hi;
}

double IntervalSet::distance_to(double x) const {
    double best = kInf;
    for (const Interval& iv : intervals_) {
        if (x < iv.lo) best = std::min(best, iv.lo - x);
        else if (x > iv.hi) best = std::min(best, x - iv.hi);
        else return 0.0;
    }
    return best;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    const IntervalSet sets[2] = {*this, other};
    return intersect_all(std::span<const IntervalSet>(sets, 2));
}

IntervalSet IntervalSet::intersect_all(std::span<const IntervalSet> sets) {
    if (sets.empty()) return full_line();
    const std::size_t depth_needed = sets.size();

    // Event sweep over endpoints; starts sort before ends at equal
    // coordinates so closed touching intervals still intersect.
    struct Event {
        double value;
        bool is_start;
    };
    std::vector<Event> events;
    for (const IntervalSet& s : sets) {
        if (s.is_empty()) return empty();
        for (const Interval& iv : s.intervals_) {
            events.push_back({iv.lo, true});
            events.push_back({iv.hi, false});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.is_start && !b.is_start;
    });

    std::vector<Interval> result;
    std::size_t depth = 0;
    double open_at = 0.0;
    for (const Event& e : events) {
        if (e.is_start) {
            if (++depth == depth_needed) open_at = e.value;
        } else {
            if (depth == depth_needed) result.push_back({open_at, e.value});
            --depth;
        }
    }
    return from_intervals(std::move(result));
}

IntervalSet solve_quadratic_leq(const Quadratic& quad) {
    const double a = quad.a;
    const double b = quad.b;
    const double c = quad.c;

    const bool a_negligible = std::abs(a) <= kRelTol * std::max({1.0, std::abs(b), std::abs(c)});
    if (a_negligible) {
        const bool b_negligible = std::abs(b) <= kRelTol * std::max(1.0, std::abs(c));
        if (b_negligible) return c <= 0.0 ? IntervalSet::full_line() : IntervalSet::empty();
        const double root = -c / b;
        return b > 0.0 ? IntervalSet::single(-kInf, root) : IntervalSet::single(root, kInf);
    }

    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        // No real roots: sign is that of a everywhere.
        return a > 0.0 ? IntervalSet::empty() : IntervalSet::full_line();
    }
    // Numerically stable root pair.
    const double sqrt_disc = std::sqrt(disc);
    const double big = -0.5 * (b + std::copysign(sqrt_disc, b));
    double r1, r2;
    if (big == 0.0) {
        r1 = r2 = 0.0;
    } else {
        r1 = big / a;
        r2 = c / big;
    }
    if (r1 > r2) std::swap(r1, r2);

    if (a > 0.0) return IntervalSet::single(r1, r2);
    return IntervalSet::from_intervals({{-kInf, r1}, {r2, kInf}});
}

} // namespace kmselect
