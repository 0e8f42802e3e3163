// Distribution functions used for control limits: CDFs and inverse CDFs of
// the normal, chi-square, Student-t and F families. Degrees of freedom may
// be non-integer (the Box approximation produces fractional h). Quantiles
// are accurate to well below 1e-8 absolute.
#pragma once

namespace psirmon {

double normal_cdf(double x);
double normal_quantile(double prob);

double chi_square_cdf(double x, double df);
double chi_square_quantile(double prob, double df);

double student_t_cdf(double x, double df);
double student_t_quantile(double prob, double df);

double f_cdf(double x, double df1, double df2);
double f_quantile(double prob, double df1, double df2);

// Regularized incomplete gamma P(a, x) and beta I_x(a, b), exposed for the
// CDFs above and for tests.
double incomplete_gamma_p(double a, double x);
double incomplete_beta(double a, double b, double x);

} // namespace psirmon
