// Shared numerical primitives: sample moments, whitening, symmetric
// eigendecomposition helpers and the SVD pseudo-inverse. All functions are
// pure; matrices are Eigen dense doubles throughout the library.
#pragma once

#include <Eigen/Dense>

namespace psirmon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class CovDivisor { n, n_minus_1 };

struct MeanCov {
    Vector mean;
    Matrix cov;
};

// Column means and sample covariance. Requires at least two rows and all
// entries finite.
MeanCov sample_mean_cov(const Matrix &X, CovDivisor divisor = CovDivisor::n_minus_1);

struct CenterWhitenStats {
    Vector mean;
    Matrix cov;
    Matrix inv_sqrt_cov;
    double eigen_floor = 1e-12;
};

CenterWhitenStats center_whiten_stats(const Matrix &X, double eigen_floor = 1e-12);

// Rows mapped to inv_sqrt_cov * (x - mean); in-sample output has identity
// covariance on the numerical range of cov.
Matrix whiten(const Matrix &X, const CenterWhitenStats &stats);

// Symmetric inverse square root. Eigenvalues at or below floor_rel times the
// largest are treated as zero, giving a pseudo-inverse square root for
// rank-deficient input.
Matrix inv_sqrt(const Matrix &M, double floor_rel = 1e-12);

// Moore-Penrose pseudo-inverse via SVD with relative singular value cutoff.
Matrix pseudo_inverse(const Matrix &M, double rel_tol = 1e-12);

// Orthonormal basis of the column space via rank-revealing QR. Columns of the
// result span the same space as the input; the column count is the detected
// numerical rank (at least one).
Matrix span_basis(const Matrix &M, double rel_tol = 1e-12);

// Eigenvalues (descending) and matching eigenvectors of a symmetric matrix.
void sym_eig_desc(const Matrix &M, Vector &values, Matrix &vectors);

// Scale to unit Euclidean norm and orient so the first coordinate whose
// magnitude exceeds the tolerance is positive. Fitted directions use this
// convention so results are reproducible.
Vector unit_fix_sign(Vector v, double tol = 1e-12);

} // namespace psirmon
