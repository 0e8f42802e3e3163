// Monte Carlo engine: equicorrelated Gaussian predictors, single-index
// responses (a linear sum and its logistic transform), additive fault
// injection along random unit directions, and detection-rate tables
// aggregated over (direction, repetition) cells.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "monitor.hpp"
#include "numlin.hpp"
#include "rng.hpp"

namespace psirmon {

enum class ModelKind { linear, nonlinear };

struct ExperimentConfig {
    int p = 10;
    double rho = 0.5;
    int n_train = 500;
    int n_faulty = 100;
    std::vector<double> fault_magnitudes{0, 1, 2, 3, 5, 8, 12};
    int n_directions = 100;
    int n_reps = 10;
    ModelKind model = ModelKind::linear;
    double noise_fraction = 0.05;
    int n_slices = 10;
    double alpha_threshold = 1.5;
    double alpha_sig = 0.01;
    uint64_t seed = 0;
};

void validate(const ExperimentConfig &config);

// Rows i.i.d. N(0, Sigma) with unit diagonal and constant off-diagonal rho,
// generated through the closed-form square root of the equicorrelation
// matrix. n = 0 yields an empty matrix.
Matrix gen_predictors(int n, int p, double rho, Rng &rng);

// Signal is the coordinate sum (linear) or its logistic transform
// (nonlinear); noise sd is noise_fraction times the sample sd of the signal.
Vector gen_response(const Matrix &X, ModelKind model, double noise_fraction,
                    Rng &rng);

// Uniform on the unit sphere: a normalized standard Gaussian vector.
Vector random_unit_direction(int p, Rng &rng);

// Shift every row by magnitude times the unit direction.
Matrix inject_fault(const Matrix &X, const Vector &xi, double magnitude);

struct RateTable {
    std::vector<double> fault_magnitudes;
    static constexpr std::array<Method, 3> methods{Method::pls, Method::sir,
                                                   Method::psir};
    // Indexed [magnitude][method]; percentages over the aggregated cells.
    std::vector<std::array<double, 3>> mean_pct;
    std::vector<std::array<double, 3>> std_pct;
    int n_cells = 0;      // cells that fitted and scored successfully
    int failed_cells = 0; // cells skipped because a fit failed

    std::string to_csv() const;
    std::string to_table() const;
};

// Fit all three monitors per cell on shared training data, score one fresh
// faulty block per magnitude against the combined index, and aggregate.
// Deterministic for a given config: per-cell RNG streams are derived from
// (seed, direction, rep), so the thread count never changes the result.
RateTable run_experiment(const ExperimentConfig &config, int threads = 0);

} // namespace psirmon
