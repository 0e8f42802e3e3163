// Command-line front end for the psirmon library. Each subcommand is a
// thin wrapper over the C interface: fit monitors from CSV, score new
// samples, print control limits, run the Monte Carlo experiment.
//
// Exit codes: 0 ok (no alarm), 1 alarms present (detect only),
// 2 usage/parse/IO, 3 numerical failure.
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psirmon/psirmon.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAlarm = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(psirmon_status status) {
    switch (status) {
        case PSIRMON_OK: return kExitOk;
        case PSIRMON_ERR_NUMERIC: return kExitNumeric;
        default: return kExitUsage;
    }
}

// Report a failed library call and translate its status to an exit code.
int report_failure(psirmon_status status) {
    std::fprintf(stderr, "error (%s): %s\n", psirmon_status_name(status),
                 psirmon_last_error());
    return exit_code_for(status);
}

struct DatasetDeleter {
    void operator()(psirmon_dataset *d) const { psirmon_dataset_destroy(d); }
};
struct MonitorDeleter {
    void operator()(psirmon_monitor *m) const { psirmon_monitor_destroy(m); }
};
struct ExperimentDeleter {
    void operator()(psirmon_experiment *e) const {
        psirmon_experiment_destroy(e);
    }
};
struct RateTableDeleter {
    void operator()(psirmon_rate_table *t) const {
        psirmon_rate_table_destroy(t);
    }
};

using DatasetPtr = std::unique_ptr<psirmon_dataset, DatasetDeleter>;
using MonitorPtr = std::unique_ptr<psirmon_monitor, MonitorDeleter>;
using ExperimentPtr = std::unique_ptr<psirmon_experiment, ExperimentDeleter>;
using RateTablePtr = std::unique_ptr<psirmon_rate_table, RateTableDeleter>;

bool write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "error (io): cannot open '%s' for writing\n",
                     path.c_str());
        return false;
    }
    out << content;
    out.flush();
    if (!out) {
        std::fprintf(stderr, "error (io): failed writing '%s'\n",
                     path.c_str());
        return false;
    }
    return true;
}

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

struct FitArgs {
    std::string data_csv;
    std::string response;
    std::string method = "psir";
    std::string model_out;
    int slices = 10;
    double alpha_threshold = 1.5;
    double alpha_sig = 0.01;
};

int cmd_fit(const FitArgs &args) {
    psirmon_method method;
    if (args.method == "pls") method = PSIRMON_METHOD_PLS;
    else if (args.method == "sir") method = PSIRMON_METHOD_SIR;
    else if (args.method == "psir") method = PSIRMON_METHOD_PSIR;
    else {
        std::fprintf(stderr, "error: unknown method '%s' (use pls, sir or psir)\n",
                     args.method.c_str());
        return kExitUsage;
    }

    psirmon_dataset *raw_data = nullptr;
    psirmon_status status = psirmon_dataset_read_csv(
        args.data_csv.c_str(), args.response.c_str(), &raw_data);
    if (status != PSIRMON_OK) return report_failure(status);
    DatasetPtr data(raw_data);

    psirmon_fit_options opts;
    psirmon_fit_options_init(&opts);
    opts.n_slices = args.slices;
    opts.alpha_threshold = args.alpha_threshold;
    opts.alpha_sig = args.alpha_sig;

    psirmon_monitor *raw_monitor = nullptr;
    status = psirmon_monitor_fit(data.get(), method, &opts, &raw_monitor);
    if (status != PSIRMON_OK) return report_failure(status);
    MonitorPtr monitor(raw_monitor);

    status = psirmon_monitor_save(monitor.get(), args.model_out.c_str());
    if (status != PSIRMON_OK) return report_failure(status);

    int32_t p = 0, r = 0, n_train = 0, q = 0;
    psirmon_monitor_dims(monitor.get(), &p, &r, &n_train, &q);
    std::vector<double> beta(p);
    psirmon_monitor_beta(monitor.get(), beta.data());
    double theta1 = 0, theta2 = 0, theta3 = 0;
    psirmon_monitor_thetas(monitor.get(), &theta1, &theta2, &theta3);
    double t2_lim = 0, spe_lim = 0, phi_lim = 0;
    psirmon_monitor_limits(monitor.get(), &t2_lim, &spe_lim, &phi_lim);

    std::printf("method: %s\n", args.method.c_str());
    std::printf("n_train: %d  p: %d  q: %d\n", n_train, p, q);
    std::printf("beta:");
    for (double b : beta) std::printf(" %s", format_real(b).c_str());
    std::printf("\n");
    std::printf("theta1: %s  theta2: %s  theta3: %s\n",
                format_real(theta1).c_str(), format_real(theta2).c_str(),
                format_real(theta3).c_str());
    std::printf("t2_limit: %s\n", format_real(t2_lim).c_str());
    std::printf("spe_limit: %s\n", format_real(spe_lim).c_str());
    std::printf("phi_limit: %s\n", format_real(phi_lim).c_str());
    std::printf("model written to %s\n", args.model_out.c_str());
    return kExitOk;
}

struct DetectArgs {
    std::string model_in;
    std::string data_csv;
    std::string report_out;
};

int cmd_detect(const DetectArgs &args) {
    psirmon_monitor *raw_monitor = nullptr;
    psirmon_status status =
        psirmon_monitor_load(args.model_in.c_str(), &raw_monitor);
    if (status != PSIRMON_OK) return report_failure(status);
    MonitorPtr monitor(raw_monitor);

    psirmon_dataset *raw_data = nullptr;
    status = psirmon_dataset_read_csv(args.data_csv.c_str(), nullptr, &raw_data);
    if (status != PSIRMON_OK) return report_failure(status);
    DatasetPtr data(raw_data);

    int32_t n = 0, p = 0;
    psirmon_dataset_dims(data.get(), &n, &p);
    int32_t model_p = 0;
    psirmon_monitor_dims(monitor.get(), &model_p, nullptr, nullptr, nullptr);

    std::string report = "t2,spe,phi,t2_alarm,spe_alarm,phi_alarm\n";
    bool any_phi_alarm = false;
    if (n > 0) {
        if (p != model_p) {
            std::fprintf(stderr,
                         "error: data has %d columns but the model expects %d\n",
                         p, model_p);
            return kExitUsage;
        }
        std::vector<double> x(static_cast<size_t>(n) * p);
        status = psirmon_dataset_values(data.get(), x.data());
        if (status != PSIRMON_OK) return report_failure(status);
        std::vector<psirmon_verdict> verdicts(n);
        status = psirmon_monitor_detect(monitor.get(), x.data(), n,
                                        verdicts.data());
        if (status != PSIRMON_OK) return report_failure(status);
        char buf[160];
        for (const psirmon_verdict &v : verdicts) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%d,%d,%d\n",
                          v.t2, v.spe, v.phi, v.t2_alarm, v.spe_alarm,
                          v.phi_alarm);
            report += buf;
            if (v.phi_alarm) any_phi_alarm = true;
        }
    }

    if (args.report_out.empty()) {
        std::fputs(report.c_str(), stdout);
    } else if (!write_file(args.report_out, report)) {
        return kExitUsage;
    }
    return any_phi_alarm ? kExitAlarm : kExitOk;
}

struct LimitsArgs {
    int n = 0;
    int r = 1;
    double theta1 = 0;
    double theta2 = 0;
    double theta3 = 0;
    double alpha_sig = 0.01;
};

int cmd_limits(const LimitsArgs &args) {
    double t2 = 0, box = 0, jm = 0, phi = 0;
    psirmon_status status = psirmon_t2_limit(args.n, args.r, args.alpha_sig, &t2);
    if (status != PSIRMON_OK) return report_failure(status);
    status = psirmon_spe_limit_box(args.theta1, args.theta2, args.alpha_sig, &box);
    if (status != PSIRMON_OK) return report_failure(status);
    status = psirmon_spe_limit_jm(args.theta1, args.theta2, args.theta3,
                                  args.alpha_sig, &jm);
    if (status != PSIRMON_OK) return report_failure(status);
    status = psirmon_combined_limit(t2, box, args.theta1, args.theta2,
                                    args.alpha_sig, &phi);
    if (status != PSIRMON_OK) return report_failure(status);

    std::printf("t2_limit: %s\n", format_real(t2).c_str());
    std::printf("spe_limit_box: %s\n", format_real(box).c_str());
    std::printf("spe_limit_jm: %s\n", format_real(jm).c_str());
    std::printf("phi_limit: %s\n", format_real(phi).c_str());
    return kExitOk;
}

struct SimulateArgs {
    std::string config_file;
    std::string table_out;
    std::string format = "table";
    int threads = 0;
    uint64_t seed = 0;
    bool seed_given = false;
};

// True when the config file itself assigns the given key, following the
// same comment and key=value rules as the parser.
bool config_assigns_key(const std::string &path, const std::string &key) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string name = line.substr(0, eq);
        const size_t first = name.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const size_t last = name.find_last_not_of(" \t\r");
        if (name.substr(first, last - first + 1) == key) return true;
    }
    return false;
}

int cmd_simulate(const SimulateArgs &args) {
    psirmon_experiment *raw_config = nullptr;
    psirmon_status status = psirmon_experiment_create(&raw_config);
    if (status != PSIRMON_OK) return report_failure(status);
    ExperimentPtr config(raw_config);

    status = psirmon_experiment_load_file(config.get(), args.config_file.c_str());
    if (status != PSIRMON_OK) return report_failure(status);

    if (args.seed_given) {
        status = psirmon_experiment_set(config.get(), "seed",
                                        std::to_string(args.seed).c_str());
        if (status != PSIRMON_OK) return report_failure(status);
    } else if (!config_assigns_key(args.config_file, "seed")) {
        std::random_device entropy;
        const uint64_t drawn =
            (static_cast<uint64_t>(entropy()) << 32) ^ entropy();
        status = psirmon_experiment_set(config.get(), "seed",
                                        std::to_string(drawn).c_str());
        if (status != PSIRMON_OK) return report_failure(status);
        std::fprintf(stderr, "seed (from entropy): %" PRIu64 "\n", drawn);
    }

    psirmon_rate_table *raw_table = nullptr;
    status = psirmon_experiment_run(config.get(), args.threads, &raw_table);
    if (status != PSIRMON_OK) return report_failure(status);
    RateTablePtr table(raw_table);

    const int32_t as_csv = args.format == "csv" ? 1 : 0;
    size_t needed = 0;
    status = psirmon_rate_table_format(table.get(), as_csv, nullptr, 0, &needed);
    if (status != PSIRMON_OK) return report_failure(status);
    std::string text(needed, '\0');
    status = psirmon_rate_table_format(table.get(), as_csv, text.data(),
                                       text.size(), &needed);
    if (status != PSIRMON_OK) return report_failure(status);
    text.resize(needed > 0 ? needed - 1 : 0);
    std::fputs(text.c_str(), stdout);

    if (!args.table_out.empty()) {
        size_t csv_needed = 0;
        status = psirmon_rate_table_format(table.get(), 1, nullptr, 0,
                                           &csv_needed);
        if (status != PSIRMON_OK) return report_failure(status);
        std::string csv(csv_needed, '\0');
        status = psirmon_rate_table_format(table.get(), 1, csv.data(),
                                           csv.size(), &csv_needed);
        if (status != PSIRMON_OK) return report_failure(status);
        csv.resize(csv_needed > 0 ? csv_needed - 1 : 0);
        if (!write_file(args.table_out, csv)) return kExitUsage;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Process monitoring with supervised X-space decompositions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(psirmon_version()));

    FitArgs fit_args;
    CLI::App *fit = app.add_subcommand(
        "fit", "Fit a monitor from a CSV file with a response column");
    fit->add_option("data", fit_args.data_csv, "Training data CSV")->required();
    fit->add_option("--response", fit_args.response,
                    "Name of the response column")
        ->required();
    fit->add_option("--method", fit_args.method,
                    "Direction method: pls, sir or psir");
    fit->add_option("--slices", fit_args.slices, "Response slices (sir/psir)");
    fit->add_option("--alpha-threshold", fit_args.alpha_threshold,
                    "Eigenvalue-ratio threshold for subspace order");
    fit->add_option("--alpha-sig", fit_args.alpha_sig,
                    "Significance level for control limits");
    fit->add_option("--output,-o", fit_args.model_out, "Model file to write")
        ->required();

    DetectArgs detect_args;
    CLI::App *detect = app.add_subcommand(
        "detect", "Score samples against a fitted monitor");
    detect->add_option("model", detect_args.model_in, "Fitted model file")
        ->required();
    detect->add_option("data", detect_args.data_csv, "Samples CSV (predictors only)")
        ->required();
    detect->add_option("--output,-o", detect_args.report_out,
                       "Report CSV path (default: standard output)");

    LimitsArgs limits_args;
    CLI::App *limits = app.add_subcommand(
        "limits", "Print control limits for given training statistics");
    limits->add_option("--n", limits_args.n, "Training sample count")->required();
    limits->add_option("--r", limits_args.r, "Score dimension");
    limits->add_option("--theta1", limits_args.theta1,
                       "First residual spectral sum")
        ->required();
    limits->add_option("--theta2", limits_args.theta2,
                       "Second residual spectral sum")
        ->required();
    limits->add_option("--theta3", limits_args.theta3,
                       "Third residual spectral sum")
        ->required();
    limits->add_option("--alpha-sig", limits_args.alpha_sig,
                       "Significance level");

    SimulateArgs sim_args;
    CLI::App *simulate = app.add_subcommand(
        "simulate", "Run the Monte Carlo detection-rate experiment");
    simulate->add_option("config", sim_args.config_file,
                         "Experiment config file (key = value lines)")
        ->required();
    simulate->add_option("--output,-o", sim_args.table_out,
                         "CSV export path for the rate table");
    simulate->add_option("--format", sim_args.format,
                         "Standard output format: table or csv")
        ->check(CLI::IsMember({"table", "csv"}));
    simulate->add_option("--threads", sim_args.threads,
                         "Worker threads (0 = hardware count)");
    simulate
        ->add_option("--seed", sim_args.seed,
                     "Experiment seed (overrides the config file)")
        ->trigger_on_parse()
        ->each([&sim_args](const std::string &) { sim_args.seed_given = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    if (fit->parsed()) return cmd_fit(fit_args);
    if (detect->parsed()) return cmd_detect(detect_args);
    if (limits->parsed()) return cmd_limits(limits_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    return kExitUsage;
}
