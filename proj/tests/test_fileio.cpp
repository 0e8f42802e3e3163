#include <cstdio>

#include "doctest.h"
#include "error.hpp"
#include "fileio.hpp"

using namespace psirmon;

namespace {

bool parse_fails_mentioning(const std::string &text,
                            const std::string &needle) {
    try {
        parse_csv(text, "input");
        return false;
    } catch (const Error &e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
}

} // namespace

TEST_CASE("csv parser reads a well-formed table") {
    const std::string text =
        "a,b,response\n"
        "1, 2.5, -3\n"
        "\n"
        "4e-1,0.0,17\n";
    const CsvData data = parse_csv(text, "input");
    REQUIRE(data.header.size() == 3);
    CHECK(data.header[0] == "a");
    CHECK(data.header[1] == "b");
    CHECK(data.header[2] == "response");
    REQUIRE(data.values.rows() == 2);
    CHECK(data.values(0, 0) == 1.0);
    CHECK(data.values(0, 1) == 2.5);
    CHECK(data.values(0, 2) == -3.0);
    CHECK(data.values(1, 0) == 0.4);
    CHECK(data.values(1, 2) == 17.0);
}

TEST_CASE("csv parser handles blank and header-only inputs") {
    const CsvData blank = parse_csv("", "input");
    CHECK(blank.header.empty());
    CHECK(blank.values.rows() == 0);

    const CsvData spaces = parse_csv("\n  \n\t\n", "input");
    CHECK(spaces.header.empty());

    const CsvData only_header = parse_csv("x1,x2\n", "input");
    REQUIRE(only_header.header.size() == 2);
    CHECK(only_header.values.rows() == 0);
    CHECK(only_header.values.cols() == 2);
}

TEST_CASE("csv parser names the offending line and column") {
    // ragged row
    CHECK(parse_fails_mentioning("a,b\n1,2\n3\n", "line 3"));
    // non-numeric cell names the column
    CHECK(parse_fails_mentioning("a,b\n1,oops\n", "column 'b'"));
    CHECK(parse_fails_mentioning("a,b\n1,oops\n", "line 2"));
    // trailing junk after a number is rejected
    CHECK(parse_fails_mentioning("a\n1.5x\n", "not a number"));
    // empty cell
    CHECK(parse_fails_mentioning("a,b\n1,\n", "column 'b'"));
}

TEST_CASE("column lookup and response splitting") {
    const CsvData data = parse_csv(
        "x1,y,x2\n"
        "1,10,2\n"
        "3,30,4\n",
        "input");
    CHECK(find_column(data, "y") == 1);
    CHECK(find_column(data, "x2") == 2);
    CHECK(find_column(data, "nope") == -1);

    Matrix X;
    Vector y;
    std::vector<std::string> names;
    split_response(data, "y", X, y, &names);
    REQUIRE(X.rows() == 2);
    REQUIRE(X.cols() == 2);
    CHECK(X(0, 0) == 1.0);
    CHECK(X(0, 1) == 2.0);
    CHECK(X(1, 0) == 3.0);
    CHECK(X(1, 1) == 4.0);
    CHECK(y[0] == 10.0);
    CHECK(y[1] == 30.0);
    REQUIRE(names.size() == 2);
    CHECK(names[0] == "x1");
    CHECK(names[1] == "x2");

    CHECK_THROWS_AS(split_response(data, "missing", X, y, nullptr), Error);

    const CsvData lone = parse_csv("y\n1\n", "input");
    CHECK_THROWS_AS(split_response(lone, "y", X, y, nullptr), Error);
}

TEST_CASE("detection reports serialize to the fixed csv layout") {
    DetectionReport quiet;
    quiet.t2 = 0.5;
    quiet.spe = 1.25;
    quiet.phi = 0.75;
    DetectionReport loud;
    loud.t2 = 9.0;
    loud.spe = 30.0;
    loud.phi = 4.0;
    loud.t2_alarm = loud.spe_alarm = loud.phi_alarm = true;

    const std::string csv = detect_report_csv({quiet, loud});
    CHECK(csv ==
          "t2,spe,phi,t2_alarm,spe_alarm,phi_alarm\n"
          "0.5,1.25,0.75,0,0,0\n"
          "9,30,4,1,1,1\n");

    CHECK(detect_report_csv({}) ==
          "t2,spe,phi,t2_alarm,spe_alarm,phi_alarm\n");
}

TEST_CASE("experiment fields parse one key at a time") {
    ExperimentConfig config;
    set_experiment_field(config, "p", "12");
    CHECK(config.p == 12);
    set_experiment_field(config, "rho", "0.25");
    CHECK(config.rho == 0.25);
    set_experiment_field(config, "n_train", "321");
    CHECK(config.n_train == 321);
    set_experiment_field(config, "n_faulty", "55");
    CHECK(config.n_faulty == 55);
    set_experiment_field(config, "fault_magnitudes", "0, 1.5, 7");
    REQUIRE(config.fault_magnitudes.size() == 3);
    CHECK(config.fault_magnitudes[1] == 1.5);
    set_experiment_field(config, "n_directions", "40");
    CHECK(config.n_directions == 40);
    set_experiment_field(config, "n_reps", "4");
    CHECK(config.n_reps == 4);
    set_experiment_field(config, "model", "nonlinear");
    CHECK(config.model == ModelKind::nonlinear);
    set_experiment_field(config, "model", "linear");
    CHECK(config.model == ModelKind::linear);
    set_experiment_field(config, "noise_fraction", "0.1");
    CHECK(config.noise_fraction == 0.1);
    set_experiment_field(config, "n_slices", "8");
    CHECK(config.n_slices == 8);
    set_experiment_field(config, "alpha_threshold", "2.5");
    CHECK(config.alpha_threshold == 2.5);
    set_experiment_field(config, "alpha_sig", "0.05");
    CHECK(config.alpha_sig == 0.05);
    set_experiment_field(config, "seed", "18446744073709551615");
    CHECK(config.seed == 18446744073709551615ull);

    CHECK_THROWS_AS(set_experiment_field(config, "frobnicate", "1"), Error);
    CHECK_THROWS_AS(set_experiment_field(config, "p", "ten"), Error);
    CHECK_THROWS_AS(set_experiment_field(config, "rho", "0.5garbage"), Error);
    CHECK_THROWS_AS(set_experiment_field(config, "model", "quadratic"), Error);
    CHECK_THROWS_AS(set_experiment_field(config, "fault_magnitudes", "1,x"),
                    Error);
    CHECK_THROWS_AS(set_experiment_field(config, "seed", "-"), Error);
}

TEST_CASE("experiment config text supports comments and reports lines") {
    const std::string text =
        "# desk-scale check\n"
        "p = 5\n"
        "rho = 0.3   # correlation\n"
        "\n"
        "model = nonlinear\n"
        "seed = 99\n";
    const ExperimentConfig config = parse_experiment_config(text);
    CHECK(config.p == 5);
    CHECK(config.rho == 0.3);
    CHECK(config.model == ModelKind::nonlinear);
    CHECK(config.seed == 99);
    // untouched keys keep their defaults
    CHECK(config.n_train == 500);
    CHECK(config.fault_magnitudes.size() == 7);

    try {
        parse_experiment_config("p = 5\nthis line is wrong\n");
        FAIL("expected a parse failure");
    } catch (const Error &e) {
        CHECK(e.status() == PSIRMON_ERR_PARSE);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("text files round trip and missing paths surface io errors") {
    const std::string path = "/tmp/psirmon_test_fileio.txt";
    const std::string content = "line one\nline two\n\ttabbed\n";
    write_text_file(path, content);
    CHECK(read_text_file(path) == content);

    // overwrite, not append
    write_text_file(path, "short\n");
    CHECK(read_text_file(path) == "short\n");
    std::remove(path.c_str());

    try {
        read_text_file("/tmp/psirmon_definitely_missing_file.txt");
        FAIL("expected an io failure");
    } catch (const Error &e) {
        CHECK(e.status() == PSIRMON_ERR_IO);
    }
    CHECK_THROWS_AS(load_experiment_config("/tmp/psirmon_missing_config.conf"),
                    Error);

    // config files load through the same text reader
    write_text_file(path, "p = 7\nseed = 3\n");
    const ExperimentConfig config = load_experiment_config(path);
    CHECK(config.p == 7);
    CHECK(config.seed == 3);
    std::remove(path.c_str());
}
