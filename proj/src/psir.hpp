// Partial sliced inverse regression: the SIR direction is projected onto
// the Krylov subspace generated by the predictor covariance acting on
// omega = cov_x * beta_sir, under the covariance inner product. The Krylov
// order q comes from an eigenvalue-ratio rule.
#pragma once

#include <vector>

#include "numlin.hpp"
#include "sir.hpp"

namespace psirmon {

struct KrylovBasis {
    Vector omega;   // generating vector
    Matrix columns; // p x q, rescaled to unit norm column by column
    Vector scales;  // norms removed from the raw recurrence columns
    int q = 0;
};

// Columns span (omega, cov*omega, ..., cov^(q-1)*omega), built by repeated
// multiplication. Each column is stored unit length with its scale recorded,
// because raw powers collapse numerically for spread spectra.
KrylovBasis krylov_sequence(const Matrix &cov_x, const Vector &omega, int q);

// Eigenvalue-ratio choice of the Krylov order: eigendecompose R_p R_p' built
// from the raw sequence, discard eigenvalues below rank_floor times the
// largest, count consecutive ratios above alpha, floor the answer at 1.
int select_q(const Matrix &cov_x, const Vector &omega, double alpha,
             double rank_floor = 1e-10);

struct PsirModel {
    Vector beta;            // unit direction, deterministic sign
    int q = 0;              // selected Krylov order
    KrylovBasis basis;
    double sir_eigenvalue = 0.0; // leading eigenvalue from the SIR step
    Matrix cov_x;
    int H = 0;
    double alpha_threshold = 0.0;
};

// Single-index fit: SIR first, then the Krylov projection. Pass force_q > 0
// to bypass the selection rule (used by equivalence tests).
PsirModel fit_psir(const Matrix &X, const Vector &y, int H, double alpha,
                   int force_q = 0);

// Multi-index extension by deflation. Directions are returned in the
// composed form: each new direction is orthogonalized against the ones
// already found. Stops when the residual predictor variance fraction drops
// to var_tol or max_dirs is reached.
std::vector<Vector> fit_psir_multi(const Matrix &X, const Vector &y, int H,
                                   double alpha, int max_dirs, double var_tol);

} // namespace psirmon
