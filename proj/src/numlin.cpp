#include "numlin.hpp"

#include <string>

#include "error.hpp"

namespace psirmon {

namespace {

void check_matrix(const Matrix &X) {
    if (X.rows() < 2)
        fail_invalid("need at least 2 observations, got " +
                     std::to_string(X.rows()));
    if (X.cols() < 1) fail_invalid("need at least 1 variable");
    if (!X.allFinite()) fail_invalid("data contains non-finite entries");
}

void check_symmetric(const Matrix &M) {
    if (M.rows() != M.cols()) fail_invalid("matrix is not square");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        fail_invalid("matrix is not symmetric");
}

} // namespace

MeanCov sample_mean_cov(const Matrix &X, CovDivisor divisor) {
    check_matrix(X);
    const auto n = X.rows();
    MeanCov out;
    out.mean = X.colwise().mean();
    const Matrix centered = X.rowwise() - out.mean.transpose();
    const double denom =
        divisor == CovDivisor::n ? double(n) : double(n - 1);
    out.cov = centered.transpose() * centered / denom;
    // Clean up round-off so downstream symmetric solvers see exact symmetry.
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

CenterWhitenStats center_whiten_stats(const Matrix &X, double eigen_floor) {
    MeanCov mc = sample_mean_cov(X);
    CenterWhitenStats stats;
    stats.mean = std::move(mc.mean);
    stats.cov = std::move(mc.cov);
    stats.eigen_floor = eigen_floor;
    stats.inv_sqrt_cov = inv_sqrt(stats.cov, eigen_floor);
    return stats;
}

Matrix whiten(const Matrix &X, const CenterWhitenStats &stats) {
    if (X.cols() != stats.mean.size())
        fail_invalid("whitening stats built for " +
                     std::to_string(stats.mean.size()) + " variables, data has " +
                     std::to_string(X.cols()));
    return (X.rowwise() - stats.mean.transpose()) * stats.inv_sqrt_cov;
}

Matrix inv_sqrt(const Matrix &M, double floor_rel) {
    check_symmetric(M);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    if (eig.info() != Eigen::Success)
        fail_numeric("eigendecomposition failed in inv_sqrt");
    const Vector &d = eig.eigenvalues();
    const double cutoff = floor_rel * std::max(d.cwiseAbs().maxCoeff(), 0.0);
    Vector scaled = Vector::Zero(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i] > cutoff && d[i] > 0.0) scaled[i] = 1.0 / std::sqrt(d[i]);
    return eig.eigenvectors() * scaled.asDiagonal() *
           eig.eigenvectors().transpose();
}

Matrix pseudo_inverse(const Matrix &M, double rel_tol) {
    if (!M.allFinite()) fail_invalid("pseudo_inverse of non-finite matrix");
    if (M.size() == 0) return Matrix(M.cols(), M.rows());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector &s = svd.singularValues();
    const double cutoff = rel_tol * (s.size() > 0 ? s[0] : 0.0);
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > cutoff && s[i] > 0.0) inv[i] = 1.0 / s[i];
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix span_basis(const Matrix &M, double rel_tol) {
    if (!M.allFinite()) fail_invalid("span_basis of non-finite matrix");
    if (M.size() == 0 || M.cwiseAbs().maxCoeff() == 0.0)
        fail_invalid("span_basis of an empty or zero matrix");
    Eigen::ColPivHouseholderQR<Matrix> qr(M);
    qr.setThreshold(rel_tol);
    const Eigen::Index rank = std::max<Eigen::Index>(qr.rank(), 1);
    return qr.householderQ() * Matrix::Identity(M.rows(), rank);
}

void sym_eig_desc(const Matrix &M, Vector &values, Matrix &vectors) {
    check_symmetric(M);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    if (eig.info() != Eigen::Success)
        fail_numeric("symmetric eigendecomposition failed");
    // Eigen returns ascending order; flip to descending.
    values = eig.eigenvalues().reverse();
    vectors = eig.eigenvectors().rowwise().reverse();
}

Vector unit_fix_sign(Vector v, double tol) {
    const double norm = v.norm();
    if (!(norm > 0.0)) fail_numeric("cannot normalize a zero direction");
    v /= norm;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::fabs(v[i]) > tol) {
            if (v[i] < 0.0) v = -v;
            break;
        }
    }
    return v;
}

} // namespace psirmon
