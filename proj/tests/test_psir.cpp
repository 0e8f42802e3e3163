#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "numlin.hpp"
#include "psir.hpp"
#include "rng.hpp"
#include "simlab.hpp"
#include "sir.hpp"

using namespace psirmon;

namespace {

double abs_cosine(const Vector &a, const Vector &b) {
    return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

Matrix random_psd(int p, Rng &rng, double ridge = 0.3) {
    Matrix A(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
    return A * A.transpose() / p + ridge * Matrix::Identity(p, p);
}

} // namespace

TEST_CASE("krylov columns follow the scaled recurrence") {
    Rng rng(701);
    const int p = 5, q = 4;
    const Matrix cov = random_psd(p, rng);
    Vector omega(p);
    for (int j = 0; j < p; ++j) omega[j] = rng.normal();

    const KrylovBasis basis = krylov_sequence(cov, omega, q);
    CHECK(basis.q == q);
    CHECK((basis.columns.col(0) - omega / omega.norm()).cwiseAbs().maxCoeff() <
          1e-12);
    for (int j = 1; j < q; ++j) {
        CHECK(basis.columns.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
        const Vector expect = cov * basis.columns.col(j - 1);
        CHECK((basis.scales[j] * basis.columns.col(j) - expect)
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }

    // identity covariance keeps every column equal to the first
    const KrylovBasis flat = krylov_sequence(Matrix::Identity(p, p), omega, 3);
    for (int j = 1; j < 3; ++j)
        CHECK((flat.columns.col(j) - flat.columns.col(0)).cwiseAbs().maxCoeff() <
              1e-12);
}

TEST_CASE("krylov hand case on a diagonal covariance") {
    Matrix cov = Matrix::Zero(2, 2);
    cov(0, 0) = 1.0;
    cov(1, 1) = 2.0;
    Vector omega = Vector::Ones(2);
    const KrylovBasis basis = krylov_sequence(cov, omega, 2);
    // raw columns [1,1] and [1,2], stored unit length with recorded scales
    CHECK(basis.scales[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    const Vector second = basis.scales[1] * basis.columns.col(1);
    const Vector raw1 = cov * basis.columns.col(0);
    CHECK((second - raw1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(basis.columns.col(1)[1] / basis.columns.col(1)[0] ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("krylov rejects bad orders and zero generators") {
    const Matrix cov = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(krylov_sequence(cov, Vector::Ones(3), 4), Error);
    CHECK_THROWS_AS(krylov_sequence(cov, Vector::Ones(3), 0), Error);
    CHECK_THROWS_AS(krylov_sequence(cov, Vector::Zero(3), 2), Error);
}

TEST_CASE("select_q counts eigenvalue ratios over the retained spectrum") {
    // identity: all Krylov columns coincide, rank 1, q floored at 1
    CHECK(select_q(Matrix::Identity(4, 4), Vector::Ones(4), 1.5) == 1);

    // diag(1,10): one dominant eigenvalue of Rationally spread spectrum
    Matrix cov2 = Matrix::Zero(2, 2);
    cov2(0, 0) = 1.0;
    cov2(1, 1) = 10.0;
    Vector omega2 = Vector::Ones(2);
    // raw columns (normalized omega) are [1,1]/sqrt(2) and [1,10]/sqrt(2);
    // the 2x2 Gram spectrum has one ratio, far above 1.5
    Matrix raw(2, 2);
    raw.col(0) = omega2 / omega2.norm();
    raw.col(1) = cov2 * raw.col(0);
    Vector values;
    Matrix vectors;
    sym_eig_desc(raw * raw.transpose(), values, vectors);
    REQUIRE(values[1] > 1e-10 * values[0]);
    const int expected = values[0] / values[1] > 1.5 ? 1 : 0;
    CHECK(select_q(cov2, omega2, 1.5) == std::max(expected, 1));

    // widely spread diagonal: both consecutive ratios exceed the threshold
    Matrix cov3 = Matrix::Zero(3, 3);
    cov3(0, 0) = 1.0;
    cov3(1, 1) = 4.0;
    cov3(2, 2) = 16.0;
    Vector omega3 = Vector::Ones(3);
    Matrix raw3(3, 3);
    raw3.col(0) = omega3 / omega3.norm();
    raw3.col(1) = cov3 * raw3.col(0);
    raw3.col(2) = cov3 * raw3.col(1);
    sym_eig_desc(raw3 * raw3.transpose(), values, vectors);
    int manual = 0;
    int retained = 0;
    for (int i = 0; i < 3; ++i)
        if (values[i] > 1e-10 * values[0]) ++retained;
    for (int j = 0; j + 1 < retained; ++j)
        if (values[j] / values[j + 1] > 1.5) ++manual;
    CHECK(select_q(cov3, omega3, 1.5) == std::max(manual, 1));

    // an impossible threshold falls back to one component
    CHECK(select_q(cov3, omega3, 1e18) == 1);
    CHECK_THROWS_AS(select_q(cov3, omega3, 0.99), Error);
    CHECK_THROWS_AS(select_q(cov3, Vector::Zero(3), 1.5), Error);
}

TEST_CASE("fit_psir collapses to SIR when the sample covariance is identity") {
    Rng rng(702);
    const int n = 300, p = 6;
    Matrix X(n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        y[i] = X(i, 0) + X(i, 1) + 0.1 * rng.normal();
    }
    // whiten in-sample so the fitted covariance is the identity exactly
    const CenterWhitenStats stats = center_whiten_stats(X);
    const Matrix Z = whiten(X, stats);

    const PsirModel psir = fit_psir(Z, y, 10, 1.5);
    const SirModel sir = fit_sir(Z, y, 10, 1);
    CHECK(abs_cosine(psir.beta, sir.directions.col(0)) >= 1.0 - 1e-8);
    CHECK(psir.q == 1);
}

TEST_CASE("fit_psir recovers the generating direction on linear data") {
    Rng rng = Rng::stream(703, 0);
    const int n = 500, p = 10;
    const Matrix X = gen_predictors(n, p, 0.5, rng);
    const Vector y = gen_response(X, ModelKind::linear, 0.05, rng);
    const PsirModel model = fit_psir(X, y, 10, 1.5);

    const Vector target = Vector::Ones(p) / std::sqrt(double(p));
    CHECK(abs_cosine(model.beta, target) >= 0.99);
    CHECK(model.beta.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.q >= 1);

    // membership: beta lies in the span of the Krylov basis
    const Matrix &B = model.basis.columns;
    const Vector fitted = B * (pseudo_inverse(B) * model.beta);
    CHECK((fitted - model.beta).norm() <= 1e-8);
}

TEST_CASE("fit_psir with the full Krylov order reproduces the SIR direction") {
    Rng rng(704);
    const int n = 200, p = 6;
    Matrix X(n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal() * (1.0 + 0.3 * j);
        y[i] = X(i, 0) - X(i, 4) + 0.2 * rng.normal();
    }
    const PsirModel full = fit_psir(X, y, 10, 1.5, p);
    const SirModel sir = fit_sir(X, y, 10, 1);
    CHECK((full.beta - sir.directions.col(0)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("projection residual is covariance-orthogonal to the Krylov span") {
    Rng rng = Rng::stream(705, 0);
    const int n = 400, p = 8;
    const Matrix X = gen_predictors(n, p, 0.4, rng);
    const Vector y = gen_response(X, ModelKind::nonlinear, 0.05, rng);
    const PsirModel model = fit_psir(X, y, 10, 1.5);
    const SirModel sir = fit_sir(X, y, 10, 1);
    const Vector beta_sir = sir.directions.col(0);

    const Matrix &B = model.basis.columns;
    const Matrix inner = B.transpose() * model.cov_x * B;
    const Vector projected =
        B * (pseudo_inverse(inner) * (B.transpose() * model.cov_x * beta_sir));
    const Vector residual = beta_sir - projected;
    CHECK((B.transpose() * model.cov_x * residual).cwiseAbs().maxCoeff() <
          1e-8);

    // idempotence of the covariance-inner-product projector
    auto project = [&](const Vector &v) {
        return Vector(B * (pseudo_inverse(inner) *
                           (B.transpose() * model.cov_x * v)));
    };
    for (int trial = 0; trial < 50; ++trial) {
        Vector v(p);
        for (int j = 0; j < p; ++j) v[j] = rng.normal();
        const Vector once = project(v);
        const Vector twice = project(once);
        CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("rescaling the response leaves the direction unchanged") {
    Rng rng = Rng::stream(706, 0);
    const int n = 350, p = 7;
    const Matrix X = gen_predictors(n, p, 0.5, rng);
    const Vector y = gen_response(X, ModelKind::linear, 0.05, rng);
    const PsirModel base = fit_psir(X, y, 10, 1.5);
    const PsirModel scaled = fit_psir(X, Vector(42.0 * y), 10, 1.5);
    CHECK((base.beta - scaled.beta).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(base.q == scaled.q);
}

namespace {

// worst principal angle (degrees) between span{dirs} and span{e1, e2}
double two_index_span_angle(const std::vector<Vector> &dirs, int p) {
    Matrix Q(p, 2);
    Q.col(0) = dirs[0] / dirs[0].norm();
    Q.col(1) = dirs[1] / dirs[1].norm();
    Eigen::HouseholderQR<Matrix> qr(Q);
    const Matrix Qo = qr.householderQ() * Matrix::Identity(p, 2);
    Matrix E = Matrix::Zero(p, 2);
    E(0, 0) = 1.0;
    E(1, 1) = 1.0;
    Eigen::JacobiSVD<Matrix> svd(Qo.transpose() * E);
    const double worst_cos = std::min(1.0, svd.singularValues().minCoeff());
    return std::acos(worst_cos) * 180.0 / M_PI;
}

// two strong orthogonal indices: a linear one plus a saturating one whose
// inverse regression curve bends hard, so both directions are identified
void two_index_sample(int seed, int n, int p, Matrix &X, Vector &y) {
    Rng rng = Rng::stream(707, seed);
    X.resize(n, p);
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
        y[i] = X(i, 0) + 4.0 * (X(i, 1) > 0.0 ? 1.0 : -1.0) +
               0.05 * rng.normal();
    }
}

} // namespace

TEST_CASE("multi-index fitting composes deflated directions") {
    const int n = 1000, p = 5;
    Matrix X;
    Vector y;
    two_index_sample(0, n, p, X, y);

    const std::vector<Vector> dirs = fit_psir_multi(X, y, 10, 1.5, 2, 1e-12);
    REQUIRE(dirs.size() == 2);
    // later directions are orthogonal to earlier ones by construction
    CHECK(std::abs(dirs[0].dot(dirs[1])) < 1e-10);

    // the two directions span the true (e1, e2) plane
    CHECK(two_index_span_angle(dirs, p) <= 5.0);

    // a budget of one direction reproduces the plain fit
    const std::vector<Vector> one = fit_psir_multi(X, y, 10, 1.5, 1, 1e-12);
    const PsirModel plain = fit_psir(X, y, 10, 1.5);
    REQUIRE(one.size() == 1);
    CHECK((one[0] - plain.beta).cwiseAbs().maxCoeff() < 1e-12);

    // var_tol = 1 stops before any direction is extracted
    CHECK(fit_psir_multi(X, y, 10, 1.5, 3, 1.0).empty());
    CHECK_THROWS_AS(fit_psir_multi(X, y, 10, 1.5, p + 1, 0.05), Error);
}

TEST_CASE("two-index recovery holds on average, not just for one draw") {
    const int n = 1000, p = 5, reps = 10;
    double total = 0.0;
    for (int seed = 0; seed < reps; ++seed) {
        Matrix X;
        Vector y;
        two_index_sample(seed, n, p, X, y);
        const std::vector<Vector> dirs =
            fit_psir_multi(X, y, 10, 1.5, 2, 1e-12);
        REQUIRE(dirs.size() == 2);
        const double angle = two_index_span_angle(dirs, p);
        CHECK(angle <= 10.0);
        total += angle;
    }
    CHECK(total / reps <= 5.0);
}
