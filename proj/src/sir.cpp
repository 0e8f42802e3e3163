#include "sir.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "error.hpp"

namespace psirmon {

SliceAssignment assign_slices(const Vector &y, int H) {
    const auto n = y.size();
    if (H < 2) fail_invalid("need at least 2 slices, got " + std::to_string(H));
    if (n < H)
        fail_invalid("cannot cut " + std::to_string(n) + " observations into " +
                     std::to_string(H) + " slices");
    if (!y.allFinite()) fail_invalid("response contains non-finite entries");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return y[a] < y[b]; });

    SliceAssignment out;
    out.H = H;
    out.labels.assign(n, 0);
    out.counts.assign(H, 0);
    out.proportions.assign(H, 0.0);
    const int base = static_cast<int>(n) / H;
    const int remainder = static_cast<int>(n) % H;
    int pos = 0;
    for (int h = 0; h < H; ++h) {
        const int size = base + (h < remainder ? 1 : 0);
        for (int k = 0; k < size; ++k) out.labels[order[pos++]] = h;
        out.counts[h] = size;
        out.proportions[h] = double(size) / double(n);
    }
    return out;
}

Matrix slice_mean_cov(const Matrix &Z, const SliceAssignment &assignment) {
    const auto n = Z.rows();
    const auto p = Z.cols();
    if (static_cast<size_t>(n) != assignment.labels.size())
        fail_invalid("slice assignment length does not match data");
    for (int count : assignment.counts)
        if (count == 0) fail_numeric("empty slice in slice_mean_cov");

    Matrix means = Matrix::Zero(assignment.H, p);
    for (Eigen::Index i = 0; i < n; ++i)
        means.row(assignment.labels[i]) += Z.row(i);
    Matrix cov = Matrix::Zero(p, p);
    for (int h = 0; h < assignment.H; ++h) {
        means.row(h) /= double(assignment.counts[h]);
        cov += assignment.proportions[h] * means.row(h).transpose() * means.row(h);
    }
    return 0.5 * (cov + cov.transpose());
}

SirModel fit_sir(const Matrix &X, const Vector &y, int H, int K) {
    if (X.rows() != y.size())
        fail_invalid("predictor rows and response length differ");
    const auto p = X.cols();
    if (K < 1 || K > std::min<Eigen::Index>(H - 1, p))
        fail_invalid("direction count " + std::to_string(K) +
                     " outside [1, min(H-1, p)]");

    SirModel model;
    model.H = H;
    model.stats = center_whiten_stats(X);
    const Matrix Z = whiten(X, model.stats);
    const SliceAssignment slices = assign_slices(y, H);
    model.slice_cov = slice_mean_cov(Z, slices);

    Vector values;
    Matrix vectors;
    sym_eig_desc(model.slice_cov, values, vectors);
    model.eigenvalues = values.head(std::min<Eigen::Index>(H - 1, p));

    model.directions.resize(p, K);
    for (int k = 0; k < K; ++k) {
        // Map the whitened eigenvector back to the original coordinates.
        Vector beta = model.stats.inv_sqrt_cov * vectors.col(k);
        model.directions.col(k) = unit_fix_sign(std::move(beta));
    }
    return model;
}

} // namespace psirmon
