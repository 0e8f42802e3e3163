#include "monitor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "pls.hpp"
#include "psir.hpp"
#include "quantiles.hpp"
#include "sir.hpp"

namespace psirmon {

namespace {

void check_alpha_sig(double alpha_sig) {
    if (!(alpha_sig > 0.0 && alpha_sig < 1.0))
        fail_invalid("significance level must lie in (0,1), got " +
                     std::to_string(alpha_sig));
}

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_real(const std::string &text, const std::string &key) {
    char *end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !std::isfinite(value))
        fail_parse("bad numeric value for '" + key + "': " + text);
    return value;
}

long parse_int(const std::string &text, const std::string &key) {
    char *end = nullptr;
    const long value = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        fail_parse("bad integer value for '" + key + "': " + text);
    return value;
}

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

Method method_from_name(const std::string &name) {
    if (name == "pls") return Method::pls;
    if (name == "sir") return Method::sir;
    if (name == "psir") return Method::psir;
    fail_invalid("unknown method '" + name + "' (expected pls, sir or psir)");
}

const char *method_name(Method method) {
    switch (method) {
        case Method::pls: return "pls";
        case Method::sir: return "sir";
        case Method::psir: return "psir";
    }
    return "?";
}

double t2_limit(int n, int r, double alpha_sig) {
    if (r < 1) fail_invalid("score dimension must be at least 1");
    if (n <= r) fail_invalid("need more training rows than score dimensions");
    check_alpha_sig(alpha_sig);
    const double nn = n;
    const double constant = r * (nn * nn - 1.0) / (nn * (nn - r));
    return constant * f_quantile(1.0 - alpha_sig, r, nn - r);
}

double spe_limit_box(double theta1, double theta2, double alpha_sig) {
    if (!(theta1 > 0.0 && theta2 > 0.0))
        fail_invalid("spectral sums must be positive");
    check_alpha_sig(alpha_sig);
    const double g = theta2 / theta1;
    const double h = theta1 * theta1 / theta2;
    return g * chi_square_quantile(1.0 - alpha_sig, h);
}

double spe_limit_jm(double theta1, double theta2, double theta3,
                    double alpha_sig) {
    if (!(theta1 > 0.0 && theta2 > 0.0 && theta3 > 0.0))
        fail_invalid("spectral sums must be positive");
    check_alpha_sig(alpha_sig);
    const double h0 = 1.0 - 2.0 * theta1 * theta3 / (3.0 * theta2 * theta2);
    if (std::fabs(h0) < 1e-12)
        fail_numeric("normal approximation degenerates at h0 = 0");
    const double z = normal_quantile(1.0 - alpha_sig);
    const double base = 1.0 + theta2 * h0 * (h0 - 1.0) / (theta1 * theta1) +
                        z * std::sqrt(2.0 * theta2 * h0 * h0) / theta1;
    if (!(base > 0.0))
        fail_numeric("normal approximation left its domain");
    return theta1 * std::pow(base, 1.0 / h0);
}

double combined_limit(double t2_lim, double spe_lim, double theta1,
                      double theta2, double alpha_sig) {
    if (!(t2_lim > 0.0 && spe_lim > 0.0))
        fail_invalid("component limits must be positive");
    if (!(theta1 > 0.0 && theta2 > 0.0))
        fail_invalid("spectral sums must be positive");
    check_alpha_sig(alpha_sig);
    // Moment matching of the weighted sum of the two quadratic forms.
    const double first = 1.0 / t2_lim + theta1 / spe_lim;
    const double second =
        1.0 / (t2_lim * t2_lim) + theta2 / (spe_lim * spe_lim);
    const double g = second / first;
    const double h = first * first / second;
    return g * chi_square_quantile(1.0 - alpha_sig, h);
}

Monitor build_monitor(const Matrix &X, const Vector &y, Method method,
                      int n_slices, double alpha_threshold, double alpha_sig) {
    if (X.rows() < 2) fail_invalid("need at least 2 training rows");
    check_alpha_sig(alpha_sig);

    Monitor m;
    m.method = method;
    m.p = static_cast<int>(X.cols());
    m.n_train = static_cast<int>(X.rows());
    m.alpha_sig = alpha_sig;

    const MeanCov mc = sample_mean_cov(X);
    m.x_mean = mc.mean;

    switch (method) {
        case Method::psir: {
            const PsirModel fit = fit_psir(X, y, n_slices, alpha_threshold);
            m.beta = fit.beta;
            m.q = fit.q;
            break;
        }
        case Method::sir: {
            const SirModel fit = fit_sir(X, y, n_slices, 1);
            m.beta = fit.directions.col(0);
            m.q = 1;
            break;
        }
        case Method::pls: {
            if (y.size() != X.rows())
                fail_invalid("predictor rows and response length differ");
            const Matrix centered = X.rowwise() - mc.mean.transpose();
            const Vector y_centered = y.array() - y.mean();
            const Vector cov_xy =
                centered.transpose() * y_centered / double(X.rows() - 1);
            const double scale = std::max(mc.cov.cwiseAbs().maxCoeff(), 1.0);
            if (cov_xy.norm() <= 1e-14 * scale)
                fail_numeric("response is uncorrelated with every predictor");
            m.q = select_q(mc.cov, cov_xy, alpha_threshold);
            const PlsDirection dir = pls_closed_form(mc.cov, cov_xy, m.q);
            m.beta = unit_fix_sign(dir.beta);
            break;
        }
    }

    // Score variance over the training set, divisor n-1. The direction has
    // unit norm, so the score is a plain inner product.
    const Matrix centered = X.rowwise() - m.x_mean.transpose();
    const Vector scores = centered * m.beta;
    m.lambda = scores.squaredNorm() / double(m.n_train - 1);
    if (!(m.lambda > 0.0)) fail_numeric("score variance is zero");

    const Matrix residual_proj =
        Matrix::Identity(m.p, m.p) - m.beta * m.beta.transpose();
    m.sigma_spe = residual_proj * mc.cov * residual_proj.transpose();
    m.sigma_spe = 0.5 * (m.sigma_spe + m.sigma_spe.transpose()).eval();
    m.has_sigma_spe = true;

    Vector values;
    Matrix vectors;
    sym_eig_desc(m.sigma_spe, values, vectors);
    m.theta1 = m.theta2 = m.theta3 = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double v = std::max(values[i], 0.0); // round-off negatives
        m.theta1 += v;
        m.theta2 += v * v;
        m.theta3 += v * v * v;
    }
    if (!(m.theta1 > 0.0 && m.theta2 > 0.0))
        fail_numeric("residual space is empty, nothing to monitor");

    m.t2_lim = t2_limit(m.n_train, m.r, alpha_sig);
    m.spe_lim = spe_limit_box(m.theta1, m.theta2, alpha_sig);
    m.phi_lim = combined_limit(m.t2_lim, m.spe_lim, m.theta1, m.theta2,
                               alpha_sig);
    return m;
}

void x_decompose(const Monitor &monitor, const Vector &x, double &score,
                 Vector &residual) {
    if (x.size() != monitor.p)
        fail_invalid("sample has " + std::to_string(x.size()) +
                     " variables, monitor expects " + std::to_string(monitor.p));
    const Vector centered = x - monitor.x_mean;
    score = monitor.beta.dot(centered);
    residual = centered - score * monitor.beta;
}

double t_squared(const Monitor &monitor, const Vector &x) {
    double score;
    Vector residual;
    x_decompose(monitor, x, score, residual);
    return score * score / monitor.lambda;
}

double spe(const Monitor &monitor, const Vector &x) {
    double score;
    Vector residual;
    x_decompose(monitor, x, score, residual);
    return residual.squaredNorm();
}

double combined_index(const Monitor &monitor, const Vector &x) {
    double score;
    Vector residual;
    x_decompose(monitor, x, score, residual);
    const double t2 = score * score / monitor.lambda;
    return t2 / monitor.t2_lim + residual.squaredNorm() / monitor.spe_lim;
}

DetectionReport detect(const Monitor &monitor, const Vector &x) {
    double score;
    Vector residual;
    x_decompose(monitor, x, score, residual);
    DetectionReport report;
    report.t2 = score * score / monitor.lambda;
    report.spe = residual.squaredNorm();
    report.phi = report.t2 / monitor.t2_lim + report.spe / monitor.spe_lim;
    report.t2_alarm = report.t2 > monitor.t2_lim;
    report.spe_alarm = report.spe > monitor.spe_lim;
    report.phi_alarm = report.phi > monitor.phi_lim;
    return report;
}

std::string monitor_to_document(const Monitor &monitor) {
    std::ostringstream out;
    out << "psirmon_monitor_v1\n";
    out << "method = " << method_name(monitor.method) << "\n";
    out << "p = " << monitor.p << "\n";
    out << "r = " << monitor.r << "\n";
    out << "n_train = " << monitor.n_train << "\n";
    out << "q = " << monitor.q << "\n";
    out << "alpha_sig = " << format_real(monitor.alpha_sig) << "\n";
    out << "lambda = " << format_real(monitor.lambda) << "\n";
    out << "theta1 = " << format_real(monitor.theta1) << "\n";
    out << "theta2 = " << format_real(monitor.theta2) << "\n";
    out << "theta3 = " << format_real(monitor.theta3) << "\n";
    out << "t2_limit = " << format_real(monitor.t2_lim) << "\n";
    out << "spe_limit = " << format_real(monitor.spe_lim) << "\n";
    out << "phi_limit = " << format_real(monitor.phi_lim) << "\n";
    out << "x_mean =";
    for (Eigen::Index i = 0; i < monitor.x_mean.size(); ++i)
        out << " " << format_real(monitor.x_mean[i]);
    out << "\nbeta =";
    for (Eigen::Index i = 0; i < monitor.beta.size(); ++i)
        out << " " << format_real(monitor.beta[i]);
    out << "\n";
    return out.str();
}

Monitor monitor_from_document(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "psirmon_monitor_v1")
        fail_parse("not a psirmon monitor document");

    std::map<std::string, std::string> fields;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail_parse("expected 'key = value', got: " + line);
        fields[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const auto field = [&](const char *key) -> const std::string & {
        const auto it = fields.find(key);
        if (it == fields.end())
            fail_parse(std::string("missing field '") + key + "'");
        return it->second;
    };
    const auto vector_field = [&](const char *key, int expected) {
        std::istringstream parts(field(key));
        Vector v(expected);
        std::string token;
        for (int i = 0; i < expected; ++i) {
            if (!(parts >> token))
                fail_parse(std::string("field '") + key + "' has fewer than " +
                           std::to_string(expected) + " entries");
            v[i] = parse_real(token, key);
        }
        if (parts >> token)
            fail_parse(std::string("field '") + key + "' has extra entries");
        return v;
    };

    Monitor m;
    m.method = method_from_name(field("method"));
    m.p = static_cast<int>(parse_int(field("p"), "p"));
    m.r = static_cast<int>(parse_int(field("r"), "r"));
    m.n_train = static_cast<int>(parse_int(field("n_train"), "n_train"));
    m.q = static_cast<int>(parse_int(field("q"), "q"));
    if (m.p < 1 || m.r < 1 || m.n_train < 2 || m.q < 1)
        fail_parse("monitor document has out-of-range dimensions");
    m.alpha_sig = parse_real(field("alpha_sig"), "alpha_sig");
    m.lambda = parse_real(field("lambda"), "lambda");
    m.theta1 = parse_real(field("theta1"), "theta1");
    m.theta2 = parse_real(field("theta2"), "theta2");
    m.theta3 = parse_real(field("theta3"), "theta3");
    m.t2_lim = parse_real(field("t2_limit"), "t2_limit");
    m.spe_lim = parse_real(field("spe_limit"), "spe_limit");
    m.phi_lim = parse_real(field("phi_limit"), "phi_limit");
    if (!(m.lambda > 0.0) || !(m.theta1 > 0.0) || !(m.theta2 > 0.0))
        fail_parse("monitor document has degenerate moments");
    if (!(m.t2_lim > 0.0 && m.spe_lim > 0.0 && m.phi_lim > 0.0))
        fail_parse("monitor document has nonpositive control limits");
    m.x_mean = vector_field("x_mean", m.p);
    m.beta = vector_field("beta", m.p);
    if (std::fabs(m.beta.norm() - 1.0) > 1e-8)
        fail_parse("stored direction is not unit length");
    m.has_sigma_spe = false;
    return m;
}

void save_monitor(const Monitor &monitor, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot open '" + path + "' for writing");
    out << monitor_to_document(monitor);
    if (!out.flush()) fail_io("failed writing monitor to '" + path + "'");
}

Monitor load_monitor(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return monitor_from_document(buffer.str());
}

} // namespace psirmon
