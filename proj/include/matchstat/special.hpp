#pragma once

namespace matchstat {

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
// Series for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double regularized_beta(double x, double a, double b);

// Upper tail of chi-square with `df` degrees of freedom.
double chi2_sf(double x, int df);

// Upper tail of F(d1, d2).
double f_sf(double x, int d1, int d2);

}  // namespace matchstat
