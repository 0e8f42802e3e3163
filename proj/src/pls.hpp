// Partial least squares: NIPALS with X-only deflation, the closed-form
// single-index coefficient through the Krylov matrix of the cross
// covariance, and the oblique X-space decomposition x_hat = P R' x.
#pragma once

#include "numlin.hpp"

namespace psirmon {

struct PlsModel {
    Matrix W; // p x A weights
    Matrix P; // p x A x-loadings
    Matrix Q; // m x A y-loadings
    Matrix T; // n x A scores
    Matrix R; // W (P'W)^-1, so that x_hat = P R' x
    int A = 0;
    Vector x_mean;
    Vector y_mean;
    bool converged = true;
};

PlsModel fit_nipals(const Matrix &X, const Matrix &Y, int A,
                    double tol = 1e-10, int max_iter = 500);

struct PlsDirection {
    Vector beta;
    int q_used = 0;
    Matrix krylov;              // the q columns the coefficient lives in
    bool zero_cross_cov = false; // cross covariance was numerically zero
};

// Closed-form coefficient: project the cross covariance onto the span of
// its own Krylov sequence under the covariance inner product.
PlsDirection pls_closed_form(const Matrix &cov_x, const Vector &cov_xy, int q);

// Split a centered sample into the oblique model part and the residual.
void pls_x_decompose(const PlsModel &model, const Vector &x_centered,
                     Vector &x_hat, Vector &x_res);

} // namespace psirmon
