// Text formats: comma-delimited data files with a header row, flat
// "key = value" experiment configs, and the per-row detection report.
// The dialect is deliberately rigid: decimal point, no quoting, no locale.
#pragma once

#include <string>
#include <vector>

#include "monitor.hpp"
#include "numlin.hpp"
#include "simlab.hpp"

namespace psirmon {

struct CsvData {
    std::vector<std::string> header;
    Matrix values; // n rows x |header| columns
};

// Parse a CSV file. Errors name the offending line and column. A file with
// no content rows yields zero rows; a blank file yields an empty table.
CsvData read_csv_file(const std::string &path);
CsvData parse_csv(const std::string &text, const std::string &origin);

// Column index for a header name, or -1 when absent.
int find_column(const CsvData &data, const std::string &name);

// Split off the named response column; remaining columns become predictors
// in their original order.
void split_response(const CsvData &data, const std::string &response_column,
                    Matrix &X, Vector &y, std::vector<std::string> *x_names);

std::string detect_report_csv(const std::vector<DetectionReport> &reports);

// Apply one "key = value" setting to an experiment config. Unknown keys and
// malformed values raise parse errors naming the field.
void set_experiment_field(ExperimentConfig &config, const std::string &key,
                          const std::string &value);

ExperimentConfig parse_experiment_config(const std::string &text);
ExperimentConfig load_experiment_config(const std::string &path);

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &content);

} // namespace psirmon
