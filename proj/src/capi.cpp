// C boundary of the shared library. Handles wrap the C++ objects, every
// entry point catches and converts exceptions to status codes, and the
// failure message is kept in thread-local storage for psirmon_last_error.
#include "psirmon/psirmon.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "error.hpp"
#include "fileio.hpp"
#include "monitor.hpp"
#include "numlin.hpp"
#include "quantiles.hpp"
#include "simlab.hpp"

namespace {

thread_local std::string g_last_error;

psirmon_status set_error(psirmon_status status, const std::string &message) {
    g_last_error = message;
    return status;
}

psirmon_status handle_current_exception() {
    try {
        throw;
    } catch (const psirmon::Error &e) {
        return set_error(e.status(), e.what());
    } catch (const std::bad_alloc &) {
        return set_error(PSIRMON_ERR_NUMERIC, "out of memory");
    } catch (const std::exception &e) {
        return set_error(PSIRMON_ERR_NUMERIC, e.what());
    } catch (...) {
        return set_error(PSIRMON_ERR_NUMERIC, "unknown failure");
    }
}

psirmon_status require(bool condition, const char *message) {
    if (condition) return PSIRMON_OK;
    return set_error(PSIRMON_ERR_INVALID_ARGUMENT, message);
}

} // namespace

#define PSIRMON_TRY try {
#define PSIRMON_CATCH                                                          \
    }                                                                          \
    catch (...) {                                                              \
        return handle_current_exception();                                     \
    }                                                                          \
    g_last_error.clear();                                                      \
    return PSIRMON_OK;

struct psirmon_dataset {
    psirmon::Matrix X;
    psirmon::Vector y;
    bool has_y = false;
};

struct psirmon_monitor {
    psirmon::Monitor model;
};

struct psirmon_experiment {
    psirmon::ExperimentConfig config;
};

struct psirmon_rate_table {
    psirmon::RateTable table;
};

extern "C" {

const char *psirmon_version(void) { return "1.0.0"; }

const char *psirmon_status_name(psirmon_status status) {
    switch (status) {
        case PSIRMON_OK: return "ok";
        case PSIRMON_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case PSIRMON_ERR_NUMERIC: return "numeric";
        case PSIRMON_ERR_IO: return "io";
        case PSIRMON_ERR_PARSE: return "parse";
    }
    return "unknown";
}

const char *psirmon_last_error(void) { return g_last_error.c_str(); }

/* ---------------- datasets ---------------- */

psirmon_status psirmon_dataset_create(const double *x, const double *y,
                                      int32_t n, int32_t p,
                                      psirmon_dataset **out) {
    if (auto s = require(out && x, "null pointer argument")) return s;
    if (auto s = require(n >= 0 && p >= 1, "need n >= 0 and p >= 1")) return s;
    PSIRMON_TRY
    auto data = std::make_unique<psirmon_dataset>();
    data->X.resize(n, p);
    for (int32_t i = 0; i < n; ++i)
        for (int32_t j = 0; j < p; ++j) data->X(i, j) = x[i * p + j];
    if (y) {
        data->y.resize(n);
        for (int32_t i = 0; i < n; ++i) data->y[i] = y[i];
        data->has_y = true;
    }
    *out = data.release();
    PSIRMON_CATCH
}

psirmon_status psirmon_dataset_read_csv(const char *path,
                                        const char *response_column,
                                        psirmon_dataset **out) {
    if (auto s = require(out && path, "null pointer argument")) return s;
    PSIRMON_TRY
    const psirmon::CsvData csv = psirmon::read_csv_file(path);
    auto data = std::make_unique<psirmon_dataset>();
    if (response_column) {
        psirmon::split_response(csv, response_column, data->X, data->y,
                                nullptr);
        data->has_y = true;
    } else {
        data->X = csv.values;
    }
    *out = data.release();
    PSIRMON_CATCH
}

psirmon_status psirmon_dataset_dims(const psirmon_dataset *data, int32_t *n,
                                    int32_t *p) {
    if (auto s = require(data != nullptr, "null dataset")) return s;
    if (n) *n = static_cast<int32_t>(data->X.rows());
    if (p) *p = static_cast<int32_t>(data->X.cols());
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_dataset_has_response(const psirmon_dataset *data,
                                            int32_t *out) {
    if (auto s = require(data && out, "null pointer argument")) return s;
    *out = data->has_y ? 1 : 0;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_dataset_values(const psirmon_dataset *data,
                                      double *out) {
    if (auto s = require(data && out, "null pointer argument")) return s;
    const auto n = data->X.rows();
    const auto p = data->X.cols();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) out[i * p + j] = data->X(i, j);
    g_last_error.clear();
    return PSIRMON_OK;
}

void psirmon_dataset_destroy(psirmon_dataset *data) { delete data; }

/* ---------------- monitors ---------------- */

psirmon_status psirmon_fit_options_init(psirmon_fit_options *opts) {
    if (auto s = require(opts != nullptr, "null options")) return s;
    opts->n_slices = 10;
    opts->alpha_threshold = 1.5;
    opts->alpha_sig = 0.01;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_fit(const psirmon_dataset *data,
                                   psirmon_method method,
                                   const psirmon_fit_options *opts,
                                   psirmon_monitor **out) {
    if (auto s = require(data && out, "null pointer argument")) return s;
    if (auto s = require(data->has_y, "dataset has no response column"))
        return s;
    PSIRMON_TRY
    psirmon_fit_options defaults;
    psirmon_fit_options_init(&defaults);
    const psirmon_fit_options &use = opts ? *opts : defaults;
    psirmon::Method m;
    switch (method) {
        case PSIRMON_METHOD_PLS: m = psirmon::Method::pls; break;
        case PSIRMON_METHOD_SIR: m = psirmon::Method::sir; break;
        case PSIRMON_METHOD_PSIR: m = psirmon::Method::psir; break;
        default: psirmon::fail_invalid("unknown method code");
    }
    auto monitor = std::make_unique<psirmon_monitor>();
    monitor->model =
        psirmon::build_monitor(data->X, data->y, m, use.n_slices,
                               use.alpha_threshold, use.alpha_sig);
    *out = monitor.release();
    PSIRMON_CATCH
}

psirmon_status psirmon_monitor_save(const psirmon_monitor *monitor,
                                    const char *path) {
    if (auto s = require(monitor && path, "null pointer argument")) return s;
    PSIRMON_TRY
    psirmon::save_monitor(monitor->model, path);
    PSIRMON_CATCH
}

psirmon_status psirmon_monitor_load(const char *path, psirmon_monitor **out) {
    if (auto s = require(out && path, "null pointer argument")) return s;
    PSIRMON_TRY
    auto monitor = std::make_unique<psirmon_monitor>();
    monitor->model = psirmon::load_monitor(path);
    *out = monitor.release();
    PSIRMON_CATCH
}

void psirmon_monitor_destroy(psirmon_monitor *monitor) { delete monitor; }

psirmon_status psirmon_monitor_method(const psirmon_monitor *monitor,
                                      psirmon_method *out) {
    if (auto s = require(monitor && out, "null pointer argument")) return s;
    switch (monitor->model.method) {
        case psirmon::Method::pls: *out = PSIRMON_METHOD_PLS; break;
        case psirmon::Method::sir: *out = PSIRMON_METHOD_SIR; break;
        case psirmon::Method::psir: *out = PSIRMON_METHOD_PSIR; break;
    }
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_dims(const psirmon_monitor *monitor, int32_t *p,
                                    int32_t *r, int32_t *n_train, int32_t *q) {
    if (auto s = require(monitor != nullptr, "null monitor")) return s;
    if (p) *p = monitor->model.p;
    if (r) *r = monitor->model.r;
    if (n_train) *n_train = monitor->model.n_train;
    if (q) *q = monitor->model.q;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_beta(const psirmon_monitor *monitor,
                                    double *out) {
    if (auto s = require(monitor && out, "null pointer argument")) return s;
    for (int i = 0; i < monitor->model.p; ++i) out[i] = monitor->model.beta[i];
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_mean(const psirmon_monitor *monitor,
                                    double *out) {
    if (auto s = require(monitor && out, "null pointer argument")) return s;
    for (int i = 0; i < monitor->model.p; ++i)
        out[i] = monitor->model.x_mean[i];
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_limits(const psirmon_monitor *monitor,
                                      double *t2_limit, double *spe_limit,
                                      double *phi_limit) {
    if (auto s = require(monitor != nullptr, "null monitor")) return s;
    if (t2_limit) *t2_limit = monitor->model.t2_lim;
    if (spe_limit) *spe_limit = monitor->model.spe_lim;
    if (phi_limit) *phi_limit = monitor->model.phi_lim;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_thetas(const psirmon_monitor *monitor,
                                      double *theta1, double *theta2,
                                      double *theta3) {
    if (auto s = require(monitor != nullptr, "null monitor")) return s;
    if (theta1) *theta1 = monitor->model.theta1;
    if (theta2) *theta2 = monitor->model.theta2;
    if (theta3) *theta3 = monitor->model.theta3;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_alpha_sig(const psirmon_monitor *monitor,
                                         double *out) {
    if (auto s = require(monitor && out, "null pointer argument")) return s;
    *out = monitor->model.alpha_sig;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_monitor_score(const psirmon_monitor *monitor,
                                     const double *x, psirmon_verdict *out) {
    return psirmon_monitor_detect(monitor, x, 1, out);
}

psirmon_status psirmon_monitor_detect(const psirmon_monitor *monitor,
                                      const double *x, int32_t n,
                                      psirmon_verdict *out) {
    if (auto s = require(monitor, "null pointer argument")) return s;
    if (auto s = require(n >= 0, "negative sample count")) return s;
    if (auto s = require(n == 0 || (x && out), "null pointer argument"))
        return s;
    PSIRMON_TRY
    const int p = monitor->model.p;
    psirmon::Vector sample(p);
    for (int32_t i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) sample[j] = x[i * p + j];
        const psirmon::DetectionReport report =
            psirmon::detect(monitor->model, sample);
        out[i].t2 = report.t2;
        out[i].spe = report.spe;
        out[i].phi = report.phi;
        out[i].t2_alarm = report.t2_alarm ? 1 : 0;
        out[i].spe_alarm = report.spe_alarm ? 1 : 0;
        out[i].phi_alarm = report.phi_alarm ? 1 : 0;
    }
    PSIRMON_CATCH
}

/* ---------------- limits and quantiles ---------------- */

psirmon_status psirmon_t2_limit(int32_t n, int32_t r, double alpha_sig,
                                double *out) {
    if (auto s = require(out != nullptr, "null output pointer")) return s;
    PSIRMON_TRY
    *out = psirmon::t2_limit(n, r, alpha_sig);
    PSIRMON_CATCH
}

psirmon_status psirmon_spe_limit_box(double theta1, double theta2,
                                     double alpha_sig, double *out) {
    if (auto s = require(out != nullptr, "null output pointer")) return s;
    PSIRMON_TRY
    *out = psirmon::spe_limit_box(theta1, theta2, alpha_sig);
    PSIRMON_CATCH
}

psirmon_status psirmon_spe_limit_jm(double theta1, double theta2,
                                    double theta3, double alpha_sig,
                                    double *out) {
    if (auto s = require(out != nullptr, "null output pointer")) return s;
    PSIRMON_TRY
    *out = psirmon::spe_limit_jm(theta1, theta2, theta3, alpha_sig);
    PSIRMON_CATCH
}

psirmon_status psirmon_combined_limit(double t2_limit, double spe_limit,
                                      double theta1, double theta2,
                                      double alpha_sig, double *out) {
    if (auto s = require(out != nullptr, "null output pointer")) return s;
    PSIRMON_TRY
    *out = psirmon::combined_limit(t2_limit, spe_limit, theta1, theta2,
                                   alpha_sig);
    PSIRMON_CATCH
}

psirmon_status psirmon_quantile(const char *family, double prob, double df1,
                                double df2, double *out) {
    if (auto s = require(family && out, "null pointer argument")) return s;
    PSIRMON_TRY
    const std::string name = family;
    if (name == "normal")
        *out = psirmon::normal_quantile(prob);
    else if (name == "chi_square")
        *out = psirmon::chi_square_quantile(prob, df1);
    else if (name == "student_t")
        *out = psirmon::student_t_quantile(prob, df1);
    else if (name == "f")
        *out = psirmon::f_quantile(prob, df1, df2);
    else
        psirmon::fail_invalid("unknown quantile family '" + name + "'");
    PSIRMON_CATCH
}

/* ---------------- experiments ---------------- */

psirmon_status psirmon_experiment_create(psirmon_experiment **out) {
    if (auto s = require(out != nullptr, "null output pointer")) return s;
    PSIRMON_TRY
    *out = new psirmon_experiment();
    PSIRMON_CATCH
}

psirmon_status psirmon_experiment_set(psirmon_experiment *config,
                                      const char *key, const char *value) {
    if (auto s = require(config && key && value, "null pointer argument"))
        return s;
    PSIRMON_TRY
    psirmon::set_experiment_field(config->config, key, value);
    PSIRMON_CATCH
}

psirmon_status psirmon_experiment_load_file(psirmon_experiment *config,
                                            const char *path) {
    if (auto s = require(config && path, "null pointer argument")) return s;
    PSIRMON_TRY
    config->config = psirmon::load_experiment_config(path);
    PSIRMON_CATCH
}

void psirmon_experiment_destroy(psirmon_experiment *config) { delete config; }

psirmon_status psirmon_experiment_run(const psirmon_experiment *config,
                                      int32_t threads,
                                      psirmon_rate_table **out) {
    if (auto s = require(config && out, "null pointer argument")) return s;
    PSIRMON_TRY
    auto table = std::make_unique<psirmon_rate_table>();
    table->table = psirmon::run_experiment(config->config, threads);
    *out = table.release();
    PSIRMON_CATCH
}

psirmon_status psirmon_rate_table_rows(const psirmon_rate_table *table,
                                       int32_t *n_rows) {
    if (auto s = require(table && n_rows, "null pointer argument")) return s;
    *n_rows = static_cast<int32_t>(table->table.fault_magnitudes.size() *
                                   psirmon::RateTable::methods.size());
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_rate_table_row(const psirmon_rate_table *table,
                                      int32_t index, double *fault_magnitude,
                                      int32_t *method, double *mean_pct,
                                      double *std_pct, int32_t *n_cells) {
    if (auto s = require(table != nullptr, "null table")) return s;
    const auto n_methods = psirmon::RateTable::methods.size();
    const auto total =
        table->table.fault_magnitudes.size() * n_methods;
    if (auto s = require(index >= 0 && static_cast<size_t>(index) < total,
                         "row index out of range"))
        return s;
    const size_t fi = index / n_methods;
    const size_t mi = index % n_methods;
    if (fault_magnitude) *fault_magnitude = table->table.fault_magnitudes[fi];
    if (method) *method = static_cast<int32_t>(mi);
    if (mean_pct) *mean_pct = table->table.mean_pct[fi][mi];
    if (std_pct) *std_pct = table->table.std_pct[fi][mi];
    if (n_cells) *n_cells = table->table.n_cells;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_rate_table_failed_cells(const psirmon_rate_table *table,
                                               int32_t *out) {
    if (auto s = require(table && out, "null pointer argument")) return s;
    *out = table->table.failed_cells;
    g_last_error.clear();
    return PSIRMON_OK;
}

psirmon_status psirmon_rate_table_format(const psirmon_rate_table *table,
                                         int32_t as_csv, char *buf, size_t cap,
                                         size_t *needed) {
    if (auto s = require(table != nullptr, "null table")) return s;
    if (auto s = require(buf != nullptr || cap == 0, "null buffer with cap > 0"))
        return s;
    PSIRMON_TRY
    const std::string text =
        as_csv ? table->table.to_csv() : table->table.to_table();
    if (needed) *needed = text.size() + 1;
    if (buf && cap > 0) {
        const size_t copy = std::min(cap - 1, text.size());
        std::memcpy(buf, text.data(), copy);
        buf[copy] = '\0';
    }
    PSIRMON_CATCH
}

void psirmon_rate_table_destroy(psirmon_rate_table *table) { delete table; }

} /* extern "C" */
