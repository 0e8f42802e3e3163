// Fault detection on the X-space decomposition: a fitted direction splits
// each centered sample into a score part and a residual, monitored by the
// score statistic (T2), the squared residual norm (SPE) and a combined
// index, each with its own control limit.
#pragma once

#include <string>

#include "numlin.hpp"

namespace psirmon {

enum class Method { pls, sir, psir };

Method method_from_name(const std::string &name);
const char *method_name(Method method);

struct Monitor {
    Method method = Method::psir;
    int p = 0;
    int r = 1;       // score dimension; this implementation fits one index
    int n_train = 0;
    int q = 1;       // projection subspace order selected while fitting
    Vector beta;     // unit loading direction
    Vector x_mean;   // training mean, used to center incoming samples
    double lambda = 0.0; // score variance over the training set
    double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;
    double alpha_sig = 0.01;
    double t2_lim = 0.0, spe_lim = 0.0, phi_lim = 0.0;
    // Residual covariance, available on freshly fitted monitors. Not part
    // of the persisted document; everything detection needs is above.
    Matrix sigma_spe;
    bool has_sigma_spe = false;
};

struct DetectionReport {
    double t2 = 0.0;
    double spe = 0.0;
    double phi = 0.0;
    bool t2_alarm = false;
    bool spe_alarm = false;
    bool phi_alarm = false;
};

// Fit the requested direction on training data, derive the score variance
// (divisor n-1), the residual covariance and its spectral sums, and the
// three control limits at alpha_sig.
Monitor build_monitor(const Matrix &X, const Vector &y, Method method,
                      int n_slices = 10, double alpha_threshold = 1.5,
                      double alpha_sig = 0.01);

// Center x with the training mean and split it against the direction.
// score * beta + residual reconstructs the centered sample exactly.
void x_decompose(const Monitor &monitor, const Vector &x, double &score,
                 Vector &residual);

double t_squared(const Monitor &monitor, const Vector &x);
double spe(const Monitor &monitor, const Vector &x);
double combined_index(const Monitor &monitor, const Vector &x);

DetectionReport detect(const Monitor &monitor, const Vector &x);

// Control limits. t2_limit follows the F calibration; for r = 1 it equals
// the squared Student-t quantile. spe_limit_box is the default residual
// limit; the normal-approximation variant is provided for comparison.
double t2_limit(int n, int r, double alpha_sig);
double spe_limit_box(double theta1, double theta2, double alpha_sig);
double spe_limit_jm(double theta1, double theta2, double theta3,
                    double alpha_sig);
double combined_limit(double t2_lim, double spe_lim, double theta1,
                      double theta2, double alpha_sig);

// Flat key-value persistence with bit-faithful reals.
void save_monitor(const Monitor &monitor, const std::string &path);
Monitor load_monitor(const std::string &path);

std::string monitor_to_document(const Monitor &monitor);
Monitor monitor_from_document(const std::string &text);

} // namespace psirmon
