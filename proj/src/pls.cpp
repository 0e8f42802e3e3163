#include "pls.hpp"

#include <string>

#include "error.hpp"
#include "psir.hpp"

namespace psirmon {

PlsModel fit_nipals(const Matrix &X, const Matrix &Y, int A, double tol,
                    int max_iter) {
    const auto n = X.rows();
    const auto p = X.cols();
    const auto m = Y.cols();
    if (Y.rows() != n) fail_invalid("predictor and response row counts differ");
    if (n < 2) fail_invalid("need at least 2 observations");
    if (A < 1 || A > p)
        fail_invalid("component count " + std::to_string(A) + " outside [1, p]");

    PlsModel model;
    model.A = A;
    model.x_mean = X.colwise().mean();
    model.y_mean = Y.colwise().mean();
    Matrix E = X.rowwise() - model.x_mean.transpose();
    const Matrix F = Y.rowwise() - model.y_mean.transpose();
    const double x_scale = E.norm();
    if (!(x_scale > 0.0)) fail_numeric("predictors have zero variance");
    if (!(F.norm() > 0.0)) fail_numeric("response has zero variance");

    model.W.resize(p, A);
    model.P.resize(p, A);
    model.Q.resize(m, A);
    model.T.resize(n, A);

    for (int a = 0; a < A; ++a) {
        if (E.norm() < 1e-12 * x_scale)
            fail_numeric("predictors exhausted after " + std::to_string(a) +
                         " components");
        // Start from the response column with the largest norm.
        Eigen::Index start = 0;
        F.colwise().norm().maxCoeff(&start);
        Vector u = F.col(start);
        Vector t = Vector::Zero(n);
        Vector w(p);
        bool settled = false;
        for (int it = 0; it < max_iter; ++it) {
            w = E.transpose() * u / u.squaredNorm();
            const double w_norm = w.norm();
            if (!(w_norm > 0.0)) fail_numeric("cross covariance vanished");
            w /= w_norm;
            const Vector t_new = E * w;
            const Vector q = F.transpose() * t_new / t_new.squaredNorm();
            const double change = (t_new - t).norm();
            t = t_new;
            if (change <= tol * t.norm() || m == 1) {
                settled = true;
                model.Q.col(a) = q;
                break;
            }
            u = F * q / q.squaredNorm();
        }
        if (!settled) {
            model.converged = false;
            model.Q.col(a) = F.transpose() * t / t.squaredNorm();
        }
        const Vector p_load = E.transpose() * t / t.squaredNorm();
        model.W.col(a) = w;
        model.P.col(a) = p_load;
        model.T.col(a) = t;
        // Only X is deflated; Y deflation is unnecessary for this scheme.
        E -= t * p_load.transpose();
    }
    model.R = model.W * pseudo_inverse(model.P.transpose() * model.W);
    return model;
}

PlsDirection pls_closed_form(const Matrix &cov_x, const Vector &cov_xy, int q) {
    const auto p = cov_x.rows();
    if (cov_x.cols() != p) fail_invalid("covariance is not square");
    if (cov_xy.size() != p) fail_invalid("cross covariance has wrong length");
    if (q < 1 || q > p)
        fail_invalid("krylov order " + std::to_string(q) + " outside [1, p]");

    PlsDirection out;
    out.q_used = q;
    const double scale = std::max(cov_x.cwiseAbs().maxCoeff(), 1.0);
    if (cov_xy.norm() <= 1e-14 * scale) {
        out.beta = Vector::Zero(p);
        out.krylov = Matrix::Zero(p, q);
        out.zero_cross_cov = true;
        return out;
    }
    const KrylovBasis basis = krylov_sequence(cov_x, cov_xy, q);
    out.krylov = basis.columns;
    // Projection under the covariance inner product. The estimate depends
    // only on the span, so it runs through an orthonormal basis; the raw
    // power columns grow nearly parallel and would poison the inner matrix.
    const Matrix Q = span_basis(basis.columns);
    const Matrix inner = Q.transpose() * cov_x * Q;
    out.beta = Q * (pseudo_inverse(inner) * (Q.transpose() * cov_xy));
    return out;
}

void pls_x_decompose(const PlsModel &model, const Vector &x_centered,
                     Vector &x_hat, Vector &x_res) {
    if (x_centered.size() != model.P.rows())
        fail_invalid("sample dimension does not match the model");
    x_hat = model.P * (model.R.transpose() * x_centered);
    x_res = x_centered - x_hat;
}

} // namespace psirmon
