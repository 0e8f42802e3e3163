// Sliced inverse regression: slice the sorted response, form the weighted
// covariance of whitened slice means, and map its leading eigenvectors back
// through the inverse square root of the predictor covariance.
#pragma once

#include <vector>

#include "numlin.hpp"

namespace psirmon {

struct SliceAssignment {
    std::vector<int> labels;         // per-observation slice in [0, H)
    int H = 0;
    std::vector<int> counts;         // per-slice sizes, differ by at most 1
    std::vector<double> proportions; // counts / n
};

// Sort by response (stable in the original index, so ties are deterministic)
// and cut into H contiguous slices. Any remainder goes to the earliest
// slices, which keeps the proportion weights exact.
SliceAssignment assign_slices(const Vector &y, int H);

// Weighted covariance of the slice means of Z: sum_h proportion_h m_h m_h'.
Matrix slice_mean_cov(const Matrix &Z, const SliceAssignment &assignment);

struct SirModel {
    CenterWhitenStats stats;
    Matrix slice_cov;    // covariance of whitened slice means
    Vector eigenvalues;  // descending
    Matrix directions;   // p x K, unit columns with deterministic sign
    int H = 0;
};

// Fit K directions with H slices. K must be at most min(H - 1, p).
SirModel fit_sir(const Matrix &X, const Vector &y, int H, int K);

} // namespace psirmon
