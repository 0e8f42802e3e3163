#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "numlin.hpp"
#include "pls.hpp"
#include "psir.hpp"
#include "rng.hpp"
#include "simlab.hpp"

using namespace psirmon;

namespace {

double abs_cosine(const Vector &a, const Vector &b) {
    return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

Vector cross_cov(const Matrix &X, const Vector &y) {
    const Vector xm = X.colwise().mean();
    const double ym = y.mean();
    Vector out = Vector::Zero(X.cols());
    for (int i = 0; i < X.rows(); ++i)
        out += (X.row(i).transpose() - xm) * (y[i] - ym);
    return out / (X.rows() - 1);
}

} // namespace

TEST_CASE("nipals weight for a single response is the cross covariance") {
    Rng rng(601);
    const int n = 200, p = 6;
    Matrix X(n, p);
    Matrix Y(n, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        Y(i, 0) = X(i, 0) - 2.0 * X(i, 3) + 0.2 * rng.normal();
    }
    const PlsModel model = fit_nipals(X, Y, 2);
    const Vector sxy = cross_cov(X, Y.col(0));
    CHECK(abs_cosine(model.W.col(0), sxy) >= 1.0 - 1e-10);
    CHECK(model.converged);

    // score orthogonality and the R'P identity
    const Matrix TtT = model.T.transpose() * model.T;
    CHECK(std::abs(TtT(0, 1)) <= 1e-8 * std::abs(TtT(0, 0)));
    const Matrix RtP = model.R.transpose() * model.P;
    CHECK((RtP - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("nipals fully explains a rank-2 predictor block") {
    Rng rng(602);
    const int n = 60, p = 5;
    Matrix basis(2, p);
    for (int j = 0; j < p; ++j) {
        basis(0, j) = rng.normal();
        basis(1, j) = rng.normal();
    }
    Matrix X(n, p);
    Matrix Y(n, 1);
    for (int i = 0; i < n; ++i) {
        const double a = rng.normal(), b = rng.normal();
        X.row(i) = a * basis.row(0) + b * basis.row(1);
        Y(i, 0) = a + 0.5 * b;
    }
    const PlsModel model = fit_nipals(X, Y, 2);
    Matrix centered = X;
    centered.rowwise() -= model.x_mean.transpose();
    const Matrix residual = centered - model.T * model.P.transpose();
    CHECK(residual.norm() <= 1e-8);

    // one component explains less than two
    const PlsModel one = fit_nipals(X, Y, 1);
    const Matrix res_one = centered - one.T * one.P.transpose();
    CHECK(res_one.norm() >= residual.norm());
}

TEST_CASE("nipals single component recovers the direction when cov is identity") {
    Rng rng(603);
    // n large enough that the sample covariance is close to the identity;
    // the first weight is the sample cross covariance, so recovery is a
    // concentration statement, not an exact one
    const int n = 10000, p = 8;
    Matrix X(n, p);
    Vector beta(p);
    for (int j = 0; j < p; ++j) beta[j] = (j % 2 == 0) ? 1.0 : -0.5;
    Matrix Y(n, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        Y(i, 0) = X.row(i).dot(beta);
    }
    const PlsModel model = fit_nipals(X, Y, 1);
    CHECK(abs_cosine(model.W.col(0), beta) >= 0.999);
}

TEST_CASE("nipals rejects degenerate inputs") {
    Matrix X = Matrix::Ones(10, 3); // zero variance after centering
    Matrix Y = Matrix::Zero(10, 1);
    for (int i = 0; i < 10; ++i) Y(i, 0) = i;
    CHECK_THROWS_AS(fit_nipals(X, Y, 1), Error);

    Matrix Xok(10, 2);
    for (int i = 0; i < 10; ++i) {
        Xok(i, 0) = i;
        Xok(i, 1) = i * i;
    }
    CHECK_THROWS_AS(fit_nipals(Xok, Matrix::Ones(10, 1), 1), Error);
    CHECK_THROWS_AS(fit_nipals(Xok, Y, 5), Error); // A > p
}

TEST_CASE("closed form with q=1 and identity covariance returns the cross covariance") {
    Vector sxy(3);
    sxy << 0.3, -1.2, 0.5;
    const PlsDirection dir = pls_closed_form(Matrix::Identity(3, 3), sxy, 1);
    CHECK((dir.beta - sxy).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(dir.q_used == 1);
    CHECK_FALSE(dir.zero_cross_cov);
}

TEST_CASE("closed form hand case on a diagonal covariance") {
    Matrix cov = Matrix::Zero(2, 2);
    cov(0, 0) = 1.0;
    cov(1, 1) = 2.0;
    Vector sxy = Vector::Ones(2);
    const PlsDirection dir = pls_closed_form(cov, sxy, 1);
    CHECK(dir.beta[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dir.beta[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("closed form with the full Krylov space solves the linear system") {
    Rng rng(604);
    const int p = 6;
    Matrix A(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
    const Matrix cov = A * A.transpose() + 0.5 * Matrix::Identity(p, p);
    Vector sxy(p);
    for (int j = 0; j < p; ++j) sxy[j] = rng.normal();

    const PlsDirection dir = pls_closed_form(cov, sxy, p);
    const Vector direct = cov.ldlt().solve(sxy);
    CHECK((dir.beta - direct).cwiseAbs().maxCoeff() <
          1e-6 * direct.cwiseAbs().maxCoeff());

    // membership: beta lies in the span of the returned basis
    const Vector fitted =
        dir.krylov * (pseudo_inverse(dir.krylov) * dir.beta);
    CHECK((fitted - dir.beta).norm() <= 1e-8 * dir.beta.norm());
}

TEST_CASE("closed form flags a zero cross covariance") {
    const PlsDirection dir =
        pls_closed_form(Matrix::Identity(4, 4), Vector::Zero(4), 2);
    CHECK(dir.zero_cross_cov);
    CHECK(dir.beta.norm() == 0.0);
    CHECK_THROWS_AS(pls_closed_form(Matrix::Identity(4, 4), Vector::Ones(4), 5),
                    Error);
}

TEST_CASE("oblique decomposition reconstructs and is idempotent") {
    Rng rng(605);
    const int n = 300, p = 7;
    Matrix X(n, p);
    Matrix Y(n, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        Y(i, 0) = X(i, 1) + X(i, 2) + 0.1 * rng.normal();
    }
    const PlsModel model = fit_nipals(X, Y, 2);

    for (int trial = 0; trial < 200; ++trial) {
        Vector x(p);
        for (int j = 0; j < p; ++j) x[j] = rng.normal();
        Vector x_hat, x_res;
        pls_x_decompose(model, x, x_hat, x_res);
        CHECK((x_hat + x_res - x).cwiseAbs().maxCoeff() < 1e-12);
        Vector hat2, res2;
        pls_x_decompose(model, x_hat, hat2, res2);
        CHECK((hat2 - x_hat).cwiseAbs().maxCoeff() < 1e-8);
    }

    // x in the span of P has no residual
    const Vector in_span = model.P * Vector::Ones(2);
    Vector hat, res;
    pls_x_decompose(model, in_span, hat, res);
    CHECK(res.cwiseAbs().maxCoeff() < 1e-8);

    // x orthogonal to the span of R maps to zero
    Vector ortho(p);
    for (int j = 0; j < p; ++j) ortho[j] = rng.normal();
    const Matrix R = model.R;
    ortho -= R * (R.transpose() * R).ldlt().solve(R.transpose() * ortho);
    pls_x_decompose(model, ortho, hat, res);
    CHECK(hat.cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(pls_x_decompose(model, Vector::Zero(p + 1), hat, res),
                    Error);
}

TEST_CASE("closed form and nipals agree on single-index linear data") {
    Rng rng = Rng::stream(606, 0);
    const int n = 500, p = 10;
    const Matrix X = gen_predictors(n, p, 0.5, rng);
    const Vector y = gen_response(X, ModelKind::linear, 0.05, rng);

    const MeanCov stats = sample_mean_cov(X, CovDivisor::n_minus_1);
    const Vector sxy = cross_cov(X, y);
    const int q = select_q(stats.cov, sxy, 1.5);
    const PlsDirection closed = pls_closed_form(stats.cov, sxy, q);

    Matrix Y(n, 1);
    Y.col(0) = y;
    const PlsModel nipals = fit_nipals(X, Y, 1);
    CHECK(abs_cosine(closed.beta, nipals.W.col(0)) >= 0.999);
}
