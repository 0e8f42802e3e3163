#include "quantiles.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace psirmon {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

void check_prob(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        fail_invalid("probability must lie strictly inside (0,1), got " +
                     std::to_string(prob));
}

void check_df(double df, const char *name) {
    if (!(df > 0.0) || !std::isfinite(df))
        fail_invalid(std::string(name) + " must be positive and finite, got " +
                     std::to_string(df));
}

// Rational approximation for the inverse normal CDF (Wichura's PPND16),
// accurate to about 1e-16 over the full open interval.
double inverse_normal(double p) {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

// Series expansion of P(a, x), effective for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < 1000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), effective for x >= a + 1.
double gamma_q_cont_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for the incomplete beta function.
double beta_cont_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h;
}

// Safeguarded Newton inversion of a smooth CDF on [lo, hi]. The bracket must
// contain the solution; steps leaving it fall back to bisection.
template <typename Cdf, typename Pdf>
double invert_cdf(const Cdf &cdf, const Pdf &pdf, double prob, double guess,
                  double lo, double hi) {
    double x = std::min(std::max(guess, lo), hi);
    for (int it = 0; it < 200; ++it) {
        const double err = cdf(x) - prob;
        if (err > 0.0)
            hi = x;
        else
            lo = x;
        const double slope = pdf(x);
        double next = slope > kTiny ? x - err / slope : x;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-14 * (1.0 + std::fabs(next)) && it > 0)
            return next;
        x = next;
    }
    return x;
}

double chi_square_pdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    const double half = 0.5 * df;
    return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::log(2.0) -
                    std::lgamma(half));
}

double student_t_pdf(double x, double df) {
    return std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                    0.5 * std::log(df * M_PI) -
                    0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double beta_pdf(double z, double a, double b) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    return std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    (a - 1.0) * std::log(z) + (b - 1.0) * std::log1p(-z));
}

// Inverse of I_z(a, b) on (0, 1) by safeguarded Newton.
double inverse_incomplete_beta(double a, double b, double prob) {
    const auto cdf = [&](double z) { return incomplete_beta(a, b, z); };
    const auto pdf = [&](double z) { return beta_pdf(z, a, b); };
    return invert_cdf(cdf, pdf, prob, a / (a + b), 0.0, 1.0);
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

double normal_quantile(double prob) {
    check_prob(prob);
    double x = inverse_normal(prob);
    // One Newton polish step keeps the result at machine precision.
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (density > kTiny) x -= (normal_cdf(x) - prob) / density;
    return x;
}

double incomplete_gamma_p(double a, double x) {
    if (!(a > 0.0)) fail_invalid("incomplete gamma needs a > 0");
    if (x < 0.0) fail_invalid("incomplete gamma needs x >= 0");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cont_fraction(a, x);
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) fail_invalid("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                                  std::lgamma(b) + a * std::log(x) +
                                  b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cont_fraction(a, b, x) / a;
    return 1.0 - front * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double chi_square_cdf(double x, double df) {
    check_df(df, "chi-square df");
    if (x <= 0.0) return 0.0;
    return incomplete_gamma_p(0.5 * df, 0.5 * x);
}

double chi_square_quantile(double prob, double df) {
    check_prob(prob);
    check_df(df, "chi-square df");
    // Wilson-Hilferty starting point, clipped to stay inside the bracket.
    const double z = inverse_normal(prob);
    const double c = 2.0 / (9.0 * df);
    double guess = df * std::pow(1.0 - c + z * std::sqrt(c), 3);
    if (!(guess > 0.0)) guess = 0.5 * df;
    double hi = std::max(guess * 2.0, df + 10.0);
    while (chi_square_cdf(hi, df) < prob) hi *= 2.0;
    const auto cdf = [&](double x) { return chi_square_cdf(x, df); };
    const auto pdf = [&](double x) { return chi_square_pdf(x, df); };
    return invert_cdf(cdf, pdf, prob, guess, 0.0, hi);
}

double student_t_cdf(double x, double df) {
    check_df(df, "student-t df");
    if (x == 0.0) return 0.5;
    const double tail =
        0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
    return x > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double prob, double df) {
    check_prob(prob);
    check_df(df, "student-t df");
    if (prob == 0.5) return 0.0;
    const double upper = std::max(prob, 1.0 - prob);
    // Normal quantile with the leading Cornish-Fisher correction.
    const double z = inverse_normal(upper);
    double guess = z + (z * z * z + z) / (4.0 * df);
    double hi = std::max(2.0 * guess, 2.0);
    while (student_t_cdf(hi, df) < upper) hi *= 2.0;
    const auto cdf = [&](double x) { return student_t_cdf(x, df); };
    const auto pdf = [&](double x) { return student_t_pdf(x, df); };
    const double x = invert_cdf(cdf, pdf, upper, guess, 0.0, hi);
    return prob >= 0.5 ? x : -x;
}

double f_cdf(double x, double df1, double df2) {
    check_df(df1, "f df1");
    check_df(df2, "f df2");
    if (x <= 0.0) return 0.0;
    return incomplete_beta(0.5 * df1, 0.5 * df2, df1 * x / (df1 * x + df2));
}

double f_quantile(double prob, double df1, double df2) {
    check_prob(prob);
    check_df(df1, "f df1");
    check_df(df2, "f df2");
    // Invert on the bounded beta scale, then map back to F.
    const double z = inverse_incomplete_beta(0.5 * df1, 0.5 * df2, prob);
    if (z >= 1.0) fail_numeric("f quantile overflow at prob " + std::to_string(prob));
    return df2 * z / (df1 * (1.0 - z));
}

} // namespace psirmon
