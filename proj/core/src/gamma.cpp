#include "kmselect/gamma.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kmselect {

namespace {

constexpr double kTol = 1e-14;
constexpr int kMaxIter = 2000;

// log of the series part of P(a, x): sum_{k>=0} x^k Gamma(a) / Gamma(a+1+k).
double log_lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kMaxIter; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kTol) break;
    }
    return std::log(sum);
}

// log of the continued-fraction factor of Q(a, x) = e^{-x} x^a / Gamma(a) * CF.
double log_upper_cf(double a, double x) {
    // Modified Lentz
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kTol) break;
    }
    return std::log(h);
}

} // namespace

double log_regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("log_regularized_gamma_q: a must be positive");
    if (x < 0.0) throw std::invalid_argument("log_regularized_gamma_q: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        const double p = std::exp(log_prefactor + log_lower_series(a, x));
        return std::log1p(-std::min(p, 1.0 - 1e-17));
    }
    return log_prefactor + log_upper_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("regularized_gamma_q: a must be positive");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0)
        return 1.0 - std::exp(log_prefactor + log_lower_series(a, x));
    return std::exp(log_prefactor + log_upper_cf(a, x));
}

double regularized_gamma_p(double a, double x) { return 1.0 - regularized_gamma_q(a, x); }

double chi_survival(double c, int q, double scale) {
    if (c < 0.0) throw std::invalid_argument("chi_survival: c must be nonnegative");
    if (scale <= 0.0) throw std::invalid_argument("chi_survival: scale must be positive");
    const double z = c / scale;
    return regularized_gamma_q(0.5 * q, 0.5 * z * z);
}

double log_chi_survival(double c, int q, double scale) {
    if (c < 0.0) throw std::invalid_argument("log_chi_survival: c must be nonnegative");
    if (scale <= 0.0) throw std::invalid_argument("log_chi_survival: scale must be positive");
    const double z = c / scale;
    return log_regularized_gamma_q(0.5 * q, 0.5 * z * z);
}

double gamma_q_inverse(double a, double p) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("gamma_q_inverse: need p in (0,1)");
    double lo = 0.0;
    double hi = std::max(4.0 * a, 8.0);
    while (regularized_gamma_q(a, hi) > p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (regularized_gamma_q(a, mid) > p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace kmselect
