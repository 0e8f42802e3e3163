#include "simlab.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "error.hpp"

namespace psirmon {

void validate(const ExperimentConfig &config) {
    if (config.p < 1) fail_invalid("p must be at least 1");
    if (!(config.rho < 1.0) ||
        (config.p > 1 && !(config.rho > -1.0 / (config.p - 1))))
        fail_invalid("rho must keep the equicorrelation matrix positive "
                     "definite: rho in (-1/(p-1), 1)");
    if (config.n_train < 2) fail_invalid("n_train must be at least 2");
    if (config.n_faulty < 1) fail_invalid("n_faulty must be at least 1");
    if (config.fault_magnitudes.empty())
        fail_invalid("need at least one fault magnitude");
    for (double f : config.fault_magnitudes)
        if (!(f >= 0.0) || !std::isfinite(f))
            fail_invalid("fault magnitudes must be finite and nonnegative");
    if (config.n_directions < 1) fail_invalid("n_directions must be at least 1");
    if (config.n_reps < 1) fail_invalid("n_reps must be at least 1");
    if (!(config.noise_fraction > 0.0))
        fail_invalid("noise_fraction must be positive");
    if (config.n_slices < 2) fail_invalid("n_slices must be at least 2");
    if (!(config.alpha_threshold > 1.0))
        fail_invalid("alpha_threshold must exceed 1");
    if (!(config.alpha_sig > 0.0 && config.alpha_sig < 1.0))
        fail_invalid("alpha_sig must lie in (0,1)");
}

Matrix gen_predictors(int n, int p, double rho, Rng &rng) {
    if (n < 0) fail_invalid("negative sample count");
    if (p < 1) fail_invalid("p must be at least 1");
    if (!(rho < 1.0) || (p > 1 && !(rho > -1.0 / (p - 1))))
        fail_invalid("rho outside (-1/(p-1), 1)");
    // Sigma = (1-rho) I + rho 11' has the closed-form square root
    // a I + b 11' with a = sqrt(1-rho) and a + p b = sqrt(1 + (p-1) rho).
    const double a = std::sqrt(1.0 - rho);
    const double b = (std::sqrt(1.0 + (p - 1) * rho) - a) / p;
    Matrix X(n, p);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < p; ++j) {
            X(i, j) = rng.normal();
            sum += X(i, j);
        }
        for (int j = 0; j < p; ++j) X(i, j) = a * X(i, j) + b * sum;
    }
    return X;
}

Vector gen_response(const Matrix &X, ModelKind model, double noise_fraction,
                    Rng &rng) {
    const auto n = X.rows();
    if (n < 2) fail_invalid("need at least 2 samples for the response");
    if (!(noise_fraction > 0.0)) fail_invalid("noise_fraction must be positive");
    Vector signal = X.rowwise().sum();
    if (model == ModelKind::nonlinear)
        signal = signal.unaryExpr(
            [](double s) { return 1.0 / (1.0 + std::exp(-s)); });
    const double mean = signal.mean();
    const double var =
        (signal.array() - mean).square().sum() / double(n - 1);
    if (!(var > 0.0)) fail_numeric("response signal has zero variance");
    const double sigma = noise_fraction * std::sqrt(var);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = signal[i] + sigma * rng.normal();
    return y;
}

Vector random_unit_direction(int p, Rng &rng) {
    if (p < 1) fail_invalid("p must be at least 1");
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vector v(p);
        for (int j = 0; j < p; ++j) v[j] = rng.normal();
        const double norm = v.norm();
        if (norm > 1e-12) return v / norm;
    }
    fail_numeric("failed to draw a nonzero direction");
}

Matrix inject_fault(const Matrix &X, const Vector &xi, double magnitude) {
    if (X.cols() != xi.size())
        fail_invalid("fault direction length does not match data");
    if (std::fabs(xi.norm() - 1.0) > 1e-6)
        fail_invalid("fault direction must have unit norm");
    return X.rowwise() + (magnitude * xi).transpose();
}

namespace {

// Distinct stream tags so direction draws never collide with cell draws.
constexpr uint64_t kDirectionTag = 1;
constexpr uint64_t kCellTag = 2;

struct CellResult {
    bool ok = false;
    // Indexed [magnitude][method], percentage of alarming samples.
    std::vector<std::array<double, 3>> rate_pct;
};

CellResult run_cell(const ExperimentConfig &config, const Vector &direction,
                    int dir_index, int rep_index) {
    CellResult cell;
    Rng rng = Rng::stream(config.seed, dir_index, rep_index, kCellTag);
    try {
        const Matrix X =
            gen_predictors(config.n_train, config.p, config.rho, rng);
        const Vector y =
            gen_response(X, config.model, config.noise_fraction, rng);

        std::array<Monitor, 3> monitors;
        for (size_t mi = 0; mi < RateTable::methods.size(); ++mi)
            monitors[mi] =
                build_monitor(X, y, RateTable::methods[mi], config.n_slices,
                              config.alpha_threshold, config.alpha_sig);

        // One fresh in-control block per cell, shifted for every magnitude,
        // so the methods and magnitudes see paired samples.
        const Matrix base =
            gen_predictors(config.n_faulty, config.p, config.rho, rng);
        cell.rate_pct.resize(config.fault_magnitudes.size());
        for (size_t fi = 0; fi < config.fault_magnitudes.size(); ++fi) {
            const Matrix faulty =
                inject_fault(base, direction, config.fault_magnitudes[fi]);
            for (size_t mi = 0; mi < monitors.size(); ++mi) {
                int alarms = 0;
                for (Eigen::Index row = 0; row < faulty.rows(); ++row)
                    if (combined_index(monitors[mi], faulty.row(row)) >
                        monitors[mi].phi_lim)
                        ++alarms;
                cell.rate_pct[fi][mi] = 100.0 * alarms / double(faulty.rows());
            }
        }
        cell.ok = true;
    } catch (const Error &) {
        cell.ok = false;
    }
    return cell;
}

} // namespace

RateTable run_experiment(const ExperimentConfig &config, int threads) {
    validate(config);

    // Directions are drawn from their own streams so they are shared by all
    // repetitions of a direction and independent of the execution order.
    std::vector<Vector> directions(config.n_directions);
    for (int d = 0; d < config.n_directions; ++d) {
        Rng rng = Rng::stream(config.seed, d, 0, kDirectionTag);
        directions[d] = random_unit_direction(config.p, rng);
    }

    const int total = config.n_directions * config.n_reps;
    std::vector<CellResult> cells(total);
    const auto worker_body = [&](std::atomic<int> &next) {
        for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            const int d = i / config.n_reps;
            const int r = i % config.n_reps;
            cells[i] = run_cell(config, directions[d], d, r);
        }
    };

    int n_workers = threads > 0
                        ? threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min(n_workers, total));
    std::atomic<int> next{0};
    if (n_workers == 1) {
        worker_body(next);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] { worker_body(next); });
        for (auto &t : pool) t.join();
    }

    // Aggregation walks the cells in a fixed order, so the table is
    // identical for every thread count.
    RateTable table;
    table.fault_magnitudes = config.fault_magnitudes;
    const size_t n_mags = config.fault_magnitudes.size();
    table.mean_pct.assign(n_mags, {0.0, 0.0, 0.0});
    table.std_pct.assign(n_mags, {0.0, 0.0, 0.0});
    for (const CellResult &cell : cells) {
        if (cell.ok)
            ++table.n_cells;
        else
            ++table.failed_cells;
    }
    if (table.n_cells == 0) fail_numeric("every simulation cell failed to fit");

    for (size_t fi = 0; fi < n_mags; ++fi) {
        for (size_t mi = 0; mi < RateTable::methods.size(); ++mi) {
            double sum = 0.0;
            for (const CellResult &cell : cells)
                if (cell.ok) sum += cell.rate_pct[fi][mi];
            const double mean = sum / table.n_cells;
            double ss = 0.0;
            for (const CellResult &cell : cells)
                if (cell.ok) {
                    const double d = cell.rate_pct[fi][mi] - mean;
                    ss += d * d;
                }
            table.mean_pct[fi][mi] = mean;
            table.std_pct[fi][mi] =
                table.n_cells > 1 ? std::sqrt(ss / (table.n_cells - 1)) : 0.0;
        }
    }
    return table;
}

std::string RateTable::to_csv() const {
    std::string out = "f,method,mean_pct,std_pct,n_cells\n";
    char buf[160];
    for (size_t fi = 0; fi < fault_magnitudes.size(); ++fi) {
        for (size_t mi = 0; mi < methods.size(); ++mi) {
            std::snprintf(buf, sizeof buf, "%.10g,%s,%.10g,%.10g,%d\n",
                          fault_magnitudes[fi], method_name(methods[mi]),
                          mean_pct[fi][mi], std_pct[fi][mi], n_cells);
            out += buf;
        }
    }
    return out;
}

std::string RateTable::to_table() const {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%6s  %-16s %-16s %-16s\n", "f", "pls",
                  "sir", "psir");
    out += buf;
    out += "        mean (std)       mean (std)       mean (std)\n";
    for (size_t fi = 0; fi < fault_magnitudes.size(); ++fi) {
        std::snprintf(buf, sizeof buf,
                      "%6g  %6.2f (%6.2f)  %6.2f (%6.2f)  %6.2f (%6.2f)\n",
                      fault_magnitudes[fi], mean_pct[fi][0], std_pct[fi][0],
                      mean_pct[fi][1], std_pct[fi][1], mean_pct[fi][2],
                      std_pct[fi][2]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "cells per configuration: %d\n", n_cells);
    out += buf;
    if (failed_cells > 0) {
        std::snprintf(buf, sizeof buf, "warning: %d cells failed to fit\n",
                      failed_cells);
        out += buf;
    }
    return out;
}

} // namespace psirmon
