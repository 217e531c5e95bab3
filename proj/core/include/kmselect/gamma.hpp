#ifndef KMSELECT_GAMMA_HPP
#define KMSELECT_GAMMA_HPP

namespace kmselect {

// Regularized incomplete gamma functions, to absolute tolerance 1e-14.
// Series evaluation for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);  // P(a, x)
double regularized_gamma_q(double a, double x);  // Q(a, x) = 1 - P(a, x)

// log Q(a, x), finite far into the tail (where Q underflows to zero).
double log_regularized_gamma_q(double a, double x);

// Pr(scale * chi_q >= c) = Q(q/2, c^2 / (2 scale^2)).
double chi_survival(double c, int q, double scale);
double log_chi_survival(double c, int q, double scale);

// Smallest m with Q(a, m) <= p (i.e. the upper-tail quantile), by bisection.
double gamma_q_inverse(double a, double p);

} // namespace kmselect

#endif
