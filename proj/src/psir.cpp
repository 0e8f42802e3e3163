#include "psir.hpp"

#include <string>

#include "error.hpp"

namespace psirmon {

namespace {

void check_omega(const Vector &omega, const Matrix &cov_x) {
    if (omega.size() != cov_x.rows())
        fail_invalid("generating vector length does not match covariance");
    const double scale = std::max(cov_x.cwiseAbs().maxCoeff(), 1.0);
    if (omega.norm() <= 1e-14 * scale)
        fail_numeric("degenerate generating direction (zero vector)");
}

} // namespace

KrylovBasis krylov_sequence(const Matrix &cov_x, const Vector &omega, int q) {
    const auto p = cov_x.rows();
    if (cov_x.cols() != p) fail_invalid("covariance is not square");
    if (q < 1 || q > p)
        fail_invalid("krylov order " + std::to_string(q) + " outside [1, p]");
    check_omega(omega, cov_x);

    KrylovBasis basis;
    basis.omega = omega;
    basis.q = q;
    basis.columns.resize(p, q);
    basis.scales.resize(q);
    basis.scales[0] = omega.norm();
    basis.columns.col(0) = omega / basis.scales[0];
    for (int j = 1; j < q; ++j) {
        const Vector raw = cov_x * basis.columns.col(j - 1);
        const double norm = raw.norm();
        if (!(norm > 0.0) || !raw.allFinite())
            fail_numeric("krylov sequence collapsed at column " +
                         std::to_string(j));
        basis.scales[j] = norm;
        basis.columns.col(j) = raw / norm;
    }
    return basis;
}

int select_q(const Matrix &cov_x, const Vector &omega, double alpha,
             double rank_floor) {
    if (!(alpha > 1.0)) fail_invalid("ratio threshold must exceed 1");
    check_omega(omega, cov_x);
    const auto p = cov_x.rows();

    // The rule works on the raw, unscaled sequence. Ratios are invariant to
    // the overall scale of omega, so it is normalized to keep the powers in
    // floating-point range.
    Matrix raw(p, p);
    raw.col(0) = omega / omega.norm();
    for (Eigen::Index j = 1; j < p; ++j) raw.col(j) = cov_x * raw.col(j - 1);
    if (!raw.allFinite())
        fail_numeric("krylov powers overflowed in order selection");

    Vector values;
    Matrix vectors;
    sym_eig_desc(raw * raw.transpose(), values, vectors);

    const double top = std::max(values[0], 0.0);
    if (!(top > 0.0)) fail_numeric("degenerate generating direction");
    int retained = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values[i] > rank_floor * top) ++retained;

    int count = 0;
    for (int j = 0; j + 1 < retained; ++j)
        if (values[j] / values[j + 1] > alpha) ++count;
    return std::max(count, 1);
}

PsirModel fit_psir(const Matrix &X, const Vector &y, int H, double alpha,
                   int force_q) {
    const SirModel sir = fit_sir(X, y, H, 1);
    const Vector beta_sir = sir.directions.col(0);

    PsirModel model;
    model.H = H;
    model.alpha_threshold = alpha;
    model.cov_x = sir.stats.cov;
    model.sir_eigenvalue = sir.eigenvalues[0];

    const Vector omega = model.cov_x * beta_sir;
    model.q = force_q > 0 ? force_q : select_q(model.cov_x, omega, alpha);
    model.basis = krylov_sequence(model.cov_x, omega, model.q);

    // Project the SIR direction onto the Krylov span under the covariance
    // inner product; note Q' * cov * beta_sir = Q' * omega. The projection
    // runs through an orthonormal basis of the span because the raw power
    // columns grow nearly parallel and would poison the inner matrix.
    const Matrix Q = span_basis(model.basis.columns);
    const Matrix inner = Q.transpose() * model.cov_x * Q;
    const Vector projected =
        Q * (pseudo_inverse(inner) * (Q.transpose() * omega));
    model.beta = unit_fix_sign(projected);
    return model;
}

std::vector<Vector> fit_psir_multi(const Matrix &X, const Vector &y, int H,
                                   double alpha, int max_dirs, double var_tol) {
    const auto p = X.cols();
    if (max_dirs < 1 || max_dirs > p)
        fail_invalid("direction budget outside [1, p]");
    if (!(var_tol >= 0.0)) fail_invalid("variance tolerance must be >= 0");

    const double total_var = sample_mean_cov(X).cov.trace();
    if (!(total_var > 0.0)) fail_numeric("predictors have zero variance");

    std::vector<Vector> directions;
    Matrix deflated = X;
    Matrix composer = Matrix::Identity(p, p); // product of deflation projectors
    for (int k = 0; k < max_dirs; ++k) {
        const double remaining = sample_mean_cov(deflated).cov.trace();
        if (remaining <= var_tol * total_var || remaining <= 1e-12 * total_var)
            break;
        const PsirModel fit = fit_psir(deflated, y, H, alpha);
        // Later directions are pushed through the accumulated projector so
        // they refer to the original predictor space: the stage-k score
        // beta_k' e_{k-1} equals (composer * beta_k)' x.
        directions.push_back(Vector(composer * fit.beta));
        const Matrix deflate =
            Matrix::Identity(p, p) - fit.beta * fit.beta.transpose();
        composer = composer * deflate;
        deflated = deflated * deflate;
    }
    return directions;
}

} // namespace psirmon
