#include "fileio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace psirmon {

namespace {

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string &line, char delim) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_cell(const std::string &text, const std::string &origin,
                  size_t line_no, const std::string &column) {
    const std::string token = trim(text);
    char *end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
        fail_parse(origin + " line " + std::to_string(line_no) +
                   ", column '" + column + "': not a number: '" + token + "'");
    return value;
}

} // namespace

CsvData parse_csv(const std::string &text, const std::string &origin) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);

    CsvData data;
    size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) {
        data.values.resize(0, 0);
        return data; // blank input: empty table
    }
    for (std::string &name : split(lines[first], ','))
        data.header.push_back(trim(name));

    std::vector<std::vector<double>> rows;
    for (size_t i = first + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::vector<std::string> cells = split(lines[i], ',');
        if (cells.size() != data.header.size())
            fail_parse(origin + " line " + std::to_string(i + 1) + ": expected " +
                       std::to_string(data.header.size()) + " fields, got " +
                       std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (size_t c = 0; c < cells.size(); ++c)
            row[c] = parse_cell(cells[c], origin, i + 1, data.header[c]);
        rows.push_back(std::move(row));
    }
    data.values.resize(rows.size(), data.header.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t c = 0; c < rows[i].size(); ++c)
            data.values(i, c) = rows[i][c];
    return data;
}

CsvData read_csv_file(const std::string &path) {
    return parse_csv(read_text_file(path), path);
}

int find_column(const CsvData &data, const std::string &name) {
    for (size_t i = 0; i < data.header.size(); ++i)
        if (data.header[i] == name) return static_cast<int>(i);
    return -1;
}

void split_response(const CsvData &data, const std::string &response_column,
                    Matrix &X, Vector &y, std::vector<std::string> *x_names) {
    const int y_col = find_column(data, response_column);
    if (y_col < 0)
        fail_parse("response column '" + response_column + "' not found");
    if (data.header.size() < 2)
        fail_invalid("no predictor columns besides the response");
    const auto n = data.values.rows();
    X.resize(n, data.header.size() - 1);
    y = data.values.col(y_col);
    if (x_names) x_names->clear();
    Eigen::Index out = 0;
    for (size_t c = 0; c < data.header.size(); ++c) {
        if (static_cast<int>(c) == y_col) continue;
        X.col(out++) = data.values.col(c);
        if (x_names) x_names->push_back(data.header[c]);
    }
}

std::string detect_report_csv(const std::vector<DetectionReport> &reports) {
    std::string out = "t2,spe,phi,t2_alarm,spe_alarm,phi_alarm\n";
    char buf[160];
    for (const DetectionReport &r : reports) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%d,%d,%d\n", r.t2,
                      r.spe, r.phi, r.t2_alarm ? 1 : 0, r.spe_alarm ? 1 : 0,
                      r.phi_alarm ? 1 : 0);
        out += buf;
    }
    return out;
}

namespace {

long to_int(const std::string &value, const std::string &key) {
    char *end = nullptr;
    const long parsed = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        fail_parse("config field '" + key + "': bad integer '" + value + "'");
    return parsed;
}

double to_real(const std::string &value, const std::string &key) {
    char *end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(parsed))
        fail_parse("config field '" + key + "': bad number '" + value + "'");
    return parsed;
}

} // namespace

void set_experiment_field(ExperimentConfig &config, const std::string &key,
                          const std::string &value) {
    if (key == "p") {
        config.p = static_cast<int>(to_int(value, key));
    } else if (key == "rho") {
        config.rho = to_real(value, key);
    } else if (key == "n_train") {
        config.n_train = static_cast<int>(to_int(value, key));
    } else if (key == "n_faulty") {
        config.n_faulty = static_cast<int>(to_int(value, key));
    } else if (key == "fault_magnitudes") {
        std::vector<double> mags;
        for (const std::string &part : split(value, ','))
            mags.push_back(to_real(trim(part), key));
        config.fault_magnitudes = std::move(mags);
    } else if (key == "n_directions") {
        config.n_directions = static_cast<int>(to_int(value, key));
    } else if (key == "n_reps") {
        config.n_reps = static_cast<int>(to_int(value, key));
    } else if (key == "model") {
        if (value == "linear")
            config.model = ModelKind::linear;
        else if (value == "nonlinear")
            config.model = ModelKind::nonlinear;
        else
            fail_parse("config field 'model': expected linear or nonlinear, "
                       "got '" + value + "'");
    } else if (key == "noise_fraction") {
        config.noise_fraction = to_real(value, key);
    } else if (key == "n_slices") {
        config.n_slices = static_cast<int>(to_int(value, key));
    } else if (key == "alpha_threshold") {
        config.alpha_threshold = to_real(value, key);
    } else if (key == "alpha_sig") {
        config.alpha_sig = to_real(value, key);
    } else if (key == "seed") {
        char *end = nullptr;
        config.seed = std::strtoull(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0')
            fail_parse("config field 'seed': bad integer '" + value + "'");
    } else {
        fail_parse("unknown config field '" + key + "'");
    }
}

ExperimentConfig parse_experiment_config(const std::string &text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail_parse("config line " + std::to_string(line_no) +
                       ": expected 'key = value', got: " + line);
        set_experiment_field(config, trim(line.substr(0, eq)),
                             trim(line.substr(eq + 1)));
    }
    return config;
}

ExperimentConfig load_experiment_config(const std::string &path) {
    return parse_experiment_config(read_text_file(path));
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot open '" + path + "' for writing");
    out << content;
    if (!out.flush()) fail_io("failed writing '" + path + "'");
}

} // namespace psirmon
