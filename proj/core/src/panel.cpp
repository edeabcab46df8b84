#include "corrbreak/panel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "corrbreak/error.hpp"

namespace corrbreak {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool iequals(const std::string& a, const char* b) {
    std::size_t n = 0;
    for (; b[n] != '\0'; ++n) {
        if (n >= a.size()) return false;
        if (std::tolower(static_cast<unsigned char>(a[n])) !=
            std::tolower(static_cast<unsigned char>(b[n]))) return false;
    }
    return n == a.size();
}

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

// Accepts YYYY-MM-DD, optionally followed by a time part.
bool is_iso8601_date(const std::string& s) {
    if (s.size() < 10) return false;
    if (s[4] != '-' || s[7] != '-') return false;
    if (!all_digits(s, 0, 4) || !all_digits(s, 5, 7) || !all_digits(s, 8, 10)) return false;
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double parse_cell(const std::string& cell, int line_no, const std::string& col_name) {
    if (cell.empty()) {
        throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ", column '" +
                                          col_name + "': missing value");
    }
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ", column '" +
                                          col_name + "': cannot parse '" + cell +
                                          "' as a finite number");
    }
    return value;
}

}  // namespace

ReturnPanel load_panel(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::parse, "empty input: expected a CSV header row");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) {
        throw Error(ErrorKind::parse, "line 1: empty header row");
    }

    const bool has_labels = iequals(header.front(), "date");
    const int p = static_cast<int>(header.size()) - (has_labels ? 1 : 0);
    if (p < 2) {
        throw Error(ErrorKind::validation,
                    "need at least 2 numeric columns, found " + std::to_string(p));
    }

    ReturnPanel panel;
    panel.names.assign(header.begin() + (has_labels ? 1 : 0), header.end());

    std::vector<double> values;
    int line_no = 1;
    int rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != static_cast<int>(header.size())) {
            throw Error(ErrorKind::parse,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        }
        int c = 0;
        if (has_labels) {
            const std::string& label = cells.front();
            if (!is_iso8601_date(label)) {
                throw Error(ErrorKind::parse, "line " + std::to_string(line_no) +
                                                  ", column 'date': '" + label +
                                                  "' is not an ISO-8601 date");
            }
            if (!panel.labels.empty() && label <= panel.labels.back()) {
                throw Error(ErrorKind::validation,
                            "line " + std::to_string(line_no) + ": label '" + label +
                                "' does not increase over '" + panel.labels.back() + "'");
            }
            panel.labels.push_back(label);
            c = 1;
        }
        for (int j = 0; j < p; ++j) {
            values.push_back(parse_cell(cells[static_cast<std::size_t>(c + j)], line_no,
                                        panel.names[static_cast<std::size_t>(j)]));
        }
        ++rows;
    }

    if (rows < 2) {
        throw Error(ErrorKind::validation,
                    "need at least 2 data rows, found " + std::to_string(rows));
    }
    panel.observations = Matrix(rows, p);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < p; ++j)
            panel.observations(i, j) = values[static_cast<std::size_t>(i) * p + j];

    validate_panel(panel);
    return panel;
}

ReturnPanel load_panel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::parse, "cannot open '" + path + "'");
    }
    return load_panel(in);
}

void validate_panel(const ReturnPanel& panel) {
    const int T = panel.rows();
    const int p = panel.cols();
    if (T < 2 || p < 2) {
        throw Error(ErrorKind::validation, "panel must be at least 2 x 2, got " +
                                               std::to_string(T) + " x " + std::to_string(p));
    }
    if (static_cast<int>(panel.names.size()) != p) {
        throw Error(ErrorKind::validation, "expected " + std::to_string(p) + " column names");
    }
    if (!panel.labels.empty()) {
        if (static_cast<int>(panel.labels.size()) != T) {
            throw Error(ErrorKind::validation, "labels must cover every row");
        }
        for (int i = 1; i < T; ++i) {
            if (panel.labels[static_cast<std::size_t>(i)] <=
                panel.labels[static_cast<std::size_t>(i - 1)]) {
                throw Error(ErrorKind::validation,
                            "labels are not strictly increasing at row " + std::to_string(i + 1));
            }
        }
    }
    for (int j = 0; j < p; ++j) {
        double lo = panel.observations(0, j);
        double hi = lo;
        for (int i = 0; i < T; ++i) {
            const double v = panel.observations(i, j);
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::validation,
                            "column '" + panel.names[static_cast<std::size_t>(j)] +
                                "' holds a non-finite entry at row " + std::to_string(i + 1));
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) {
            throw Error(ErrorKind::validation,
                        "column '" + panel.names[static_cast<std::size_t>(j)] +
                            "' is constant (zero variance)");
        }
    }
}

void write_panel_csv(const ReturnPanel& panel, std::ostream& out) {
    const int T = panel.rows();
    const int p = panel.cols();
    const bool has_labels = !panel.labels.empty();
    if (has_labels) out << "date,";
    for (int j = 0; j < p; ++j) out << panel.names[static_cast<std::size_t>(j)] << (j + 1 < p ? "," : "\n");
    char buf[32];
    for (int i = 0; i < T; ++i) {
        if (has_labels) out << panel.labels[static_cast<std::size_t>(i)] << ',';
        for (int j = 0; j < p; ++j) {
            std::snprintf(buf, sizeof(buf), "%.10g", panel.observations(i, j));
            out << buf << (j + 1 < p ? "," : "\n");
        }
    }
}

ReturnPanel to_returns(const ReturnPanel& prices, ReturnsMode mode) {
    if (mode == ReturnsMode::as_is) return prices;
    const int T = prices.rows();
    const int p = prices.cols();
    if (T < 3) {
        throw Error(ErrorKind::validation, "need at least 3 price rows to difference");
    }
    ReturnPanel out;
    out.names = prices.names;
    out.observations = Matrix(T - 1, p);
    for (int i = 1; i < T; ++i) {
        for (int j = 0; j < p; ++j) {
            const double prev = prices.observations(i - 1, j);
            const double cur = prices.observations(i, j);
            double r = 0.0;
            if (mode == ReturnsMode::log_diff) {
                if (prev <= 0.0 || cur <= 0.0) {
                    throw Error(ErrorKind::validation,
                                "log returns need positive prices; column '" +
                                    prices.names[static_cast<std::size_t>(j)] + "', row " +
                                    std::to_string(i + 1));
                }
                r = std::log(cur / prev);
            } else {
                if (prev == 0.0) {
                    throw Error(ErrorKind::validation,
                                "percent returns need nonzero prices; column '" +
                                    prices.names[static_cast<std::size_t>(j)] + "', row " +
                                    std::to_string(i));
                }
                r = (cur - prev) / prev;
            }
            out.observations(i - 1, j) = r;
        }
    }
    if (!prices.labels.empty()) {
        out.labels.assign(prices.labels.begin() + 1, prices.labels.end());
    }
    validate_panel(out);
    return out;
}

StandardizedPanel standardize(const ReturnPanel& panel) {
    validate_panel(panel);
    const int T = panel.rows();
    const int p = panel.cols();
    StandardizedPanel out;
    out.observations = Matrix(T, p);
    out.means.resize(static_cast<std::size_t>(p));
    out.sds.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        double mean = 0.0;
        for (int i = 0; i < T; ++i) mean += panel.observations(i, j);
        mean /= T;
        double ss = 0.0;
        for (int i = 0; i < T; ++i) {
            const double d = panel.observations(i, j) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / T);  // denominator-T convention
        if (!(sd > 0.0)) {
            throw Error(ErrorKind::validation,
                        "column '" + panel.names[static_cast<std::size_t>(j)] +
                            "' has zero variance");
        }
        out.means[static_cast<std::size_t>(j)] = mean;
        out.sds[static_cast<std::size_t>(j)] = sd;
        for (int i = 0; i < T; ++i)
            out.observations(i, j) = (panel.observations(i, j) - mean) / sd;
    }
    return out;
}

CorrelationMatrix prefix_correlation(const StandardizedPanel& panel, int k,
                                     MeanConvention means) {
    const int T = panel.rows();
    const int p = panel.cols();
    if (k < 2 || k > T) {
        throw Error(ErrorKind::domain,
                    "prefix length k must satisfy 2 <= k <= T; got k=" + std::to_string(k) +
                        ", T=" + std::to_string(T));
    }

    std::vector<double> mean(static_cast<std::size_t>(p), 0.0);
    if (means == MeanConvention::prefix) {
        for (int j = 0; j < p; ++j) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += panel.observations(i, j);
            mean[static_cast<std::size_t>(j)] = s / k;
        }
    }
    // full_sample: the standardized panel has exact zero full-sample means.

    std::vector<double> var(static_cast<std::size_t>(p), 0.0);
    for (int j = 0; j < p; ++j) {
        double ss = 0.0;
        for (int i = 0; i < k; ++i) {
            const double d = panel.observations(i, j) - mean[static_cast<std::size_t>(j)];
            ss += d * d;
        }
        if (!(ss > 0.0)) {
            throw Error(ErrorKind::validation,
                        "column " + std::to_string(j + 1) + " is constant on the prefix 1.." +
                            std::to_string(k));
        }
        var[static_cast<std::size_t>(j)] = ss;
    }

    CorrelationMatrix out;
    out.window_end = k;
    out.entries = Matrix(p, p);
    for (int a = 0; a < p; ++a) out.entries(a, a) = 1.0;
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            double cross = 0.0;
            for (int i = 0; i < k; ++i) {
                cross += (panel.observations(i, a) - mean[static_cast<std::size_t>(a)]) *
                         (panel.observations(i, b) - mean[static_cast<std::size_t>(b)]);
            }
            double rho = cross / std::sqrt(var[static_cast<std::size_t>(a)] *
                                           var[static_cast<std::size_t>(b)]);
            rho = std::clamp(rho, -1.0, 1.0);  // absorb last-bit rounding
            out.entries(a, b) = rho;
            out.entries(b, a) = rho;
        }
    }
    return out;
}

Matrix prefix_second_moment(const StandardizedPanel& panel, int k) {
    const int T = panel.rows();
    const int p = panel.cols();
    if (k < 1 || k > T) {
        throw Error(ErrorKind::domain, "prefix length k must satisfy 1 <= k <= T");
    }
    Matrix m(p, p);
    for (int i = 0; i < k; ++i) {
        const double* row = panel.observations.row_ptr(i);
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) m(a, b) += row[a] * row[b];
    }
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b) {
            m(a, b) /= k;
            m(b, a) = m(a, b);
        }
    return m;
}

CorrelationMatrix full_correlation(const StandardizedPanel& panel, MeanConvention means) {
    return prefix_correlation(panel, panel.rows(), means);
}

}  // namespace corrbreak
