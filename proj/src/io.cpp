#include "gra/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gra::io {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

double to_double(const std::string& text, const std::string& source, std::size_t line) {
    const std::string t = trim(text);
    if (t.empty()) {
        fail(source, line, "empty numeric field");
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) {
        fail(source, line, "not a number: '" + t + "'");
    }
    return v;
}

// Table rows after checking the header; each row is split and trimmed.
struct Rows {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> line_numbers;
};

Rows read_table(const std::string& text, const std::string& header, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    bool saw_header = false;
    Rows rows;
    const std::size_t width = split(header).size();
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (!saw_header) {
            if (line != header) {
                fail(source, number, "expected header '" + header + "'");
            }
            saw_header = true;
            continue;
        }
        auto fields = split(line);
        if (fields.size() != width) {
            fail(source, number,
                 "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
        }
        for (auto& f : fields) {
            f = trim(f);
        }
        rows.cells.push_back(std::move(fields));
        rows.line_numbers.push_back(number);
    }
    if (!saw_header) {
        fail(source, number, "missing header '" + header + "'");
    }
    return rows;
}

void check_index(const std::string& field, std::size_t expected, const std::string& source, std::size_t line) {
    if (to_double(field, source, line) != static_cast<double>(expected)) {
        fail(source, line, "expected index " + std::to_string(expected));
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        if (!out.flush()) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string distribution_csv(const AlphaGrid& grid, const Eigen::VectorXd& p) {
    if (static_cast<std::size_t>(p.size()) != grid.size()) {
        throw std::invalid_argument("distribution_csv: size mismatch");
    }
    std::string out = "index,alpha,p\n";
    for (std::size_t l = 0; l < grid.size(); ++l) {
        out += std::to_string(l + 1) + "," + format_double(grid.alphas[l]) + "," +
               format_double(p(static_cast<Eigen::Index>(l))) + "\n";
    }
    return out;
}

DistributionTable parse_distribution_csv(const std::string& text, const std::string& source) {
    const Rows rows = read_table(text, "index,alpha,p", source);
    DistributionTable table;
    table.p.resize(static_cast<Eigen::Index>(rows.cells.size()));
    for (std::size_t i = 0; i < rows.cells.size(); ++i) {
        const auto& c = rows.cells[i];
        const std::size_t line = rows.line_numbers[i];
        check_index(c[0], i + 1, source, line);
        table.alphas.push_back(to_double(c[1], source, line));
        table.p(static_cast<Eigen::Index>(i)) = to_double(c[2], source, line);
    }
    return table;
}

std::string controls_csv(const ControlSet& controls) {
    std::string out = "index,u_x,u_y,t_f,method\n";
    const std::string tag = to_string(controls.method);
    for (std::size_t k = 0; k < controls.size(); ++k) {
        const auto& p = controls.pulses[k];
        out += std::to_string(k + 1) + "," + format_double(p.u_x) + "," + format_double(p.u_y) + "," +
               format_double(p.t_f) + "," + tag + "\n";
    }
    return out;
}

ControlSet parse_controls_csv(const std::string& text, const std::string& source) {
    const Rows rows = read_table(text, "index,u_x,u_y,t_f,method", source);
    ControlSet set;
    for (std::size_t i = 0; i < rows.cells.size(); ++i) {
        const auto& c = rows.cells[i];
        const std::size_t line = rows.line_numbers[i];
        check_index(c[0], i + 1, source, line);
        ControlPulse p;
        p.u_x = to_double(c[1], source, line);
        p.u_y = to_double(c[2], source, line);
        p.t_f = to_double(c[3], source, line);
        if (p.t_f < 0.0) {
            fail(source, line, "negative duration");
        }
        try {
            const Method m = parse_method(c[4]);
            if (i == 0) {
                set.method = m;
            } else if (m != set.method) {
                fail(source, line, "mixed method tags");
            }
        } catch (const std::invalid_argument& e) {
            fail(source, line, e.what());
        }
        set.pulses.push_back(p);
    }
    return set;
}

std::string measurements_csv(const MeasurementSet& ms) {
    std::string out = "control_index,x,y\n";
    for (std::size_t k = 0; k < ms.readings.size(); ++k) {
        out += std::to_string(k + 1) + "," + format_double(ms.readings[k].x()) + "," +
               format_double(ms.readings[k].y()) + "\n";
    }
    return out;
}

std::vector<TransverseReading> parse_measurements_csv(const std::string& text, const std::string& source) {
    const Rows rows = read_table(text, "control_index,x,y", source);
    std::vector<TransverseReading> out;
    for (std::size_t i = 0; i < rows.cells.size(); ++i) {
        const auto& c = rows.cells[i];
        const std::size_t line = rows.line_numbers[i];
        check_index(c[0], i + 1, source, line);
        out.emplace_back(to_double(c[1], source, line), to_double(c[2], source, line));
    }
    return out;
}

std::string spectrum_csv(const Eigen::VectorXd& eigenvalues) {
    std::string out = "index,eigenvalue\n";
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_double(eigenvalues(i)) + "\n";
    }
    return out;
}

Eigen::VectorXd parse_spectrum_csv(const std::string& text, const std::string& source) {
    const Rows rows = read_table(text, "index,eigenvalue", source);
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.cells.size()));
    for (std::size_t i = 0; i < rows.cells.size(); ++i) {
        check_index(rows.cells[i][0], i + 1, source, rows.line_numbers[i]);
        out(static_cast<Eigen::Index>(i)) = to_double(rows.cells[i][1], source, rows.line_numbers[i]);
    }
    return out;
}

std::string trace_csv(const std::vector<OgraStep>& trace) {
    std::string out = "iteration,chosen_index,objective,stop_reason\n";
    for (const auto& step : trace) {
        out += std::to_string(step.iteration) + ",";
        if (step.chosen_index) {
            out += std::to_string(*step.chosen_index + 1);
        }
        out += ",";
        if (!std::isnan(step.objective)) {
            out += format_double(step.objective);
        }
        out += "," + to_string(step.stop_reason) + "\n";
    }
    return out;
}

std::string result_csv(const AlphaGrid& grid, const Eigen::VectorXd* p_true, const Eigen::VectorXd& p_recovered) {
    std::string out = "index,alpha,p_true,p_recovered\n";
    for (std::size_t l = 0; l < grid.size(); ++l) {
        const auto i = static_cast<Eigen::Index>(l);
        out += std::to_string(l + 1) + "," + format_double(grid.alphas[l]) + ",";
        if (p_true != nullptr) {
            out += format_double((*p_true)(i));
        }
        out += "," + format_double(p_recovered(i)) + "\n";
    }
    return out;
}

Eigen::MatrixXd parse_matrix_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        for (const auto& f : split(line)) {
            row.push_back(to_double(f, source, number));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            fail(source, number, "ragged matrix row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.size() != rows.front().size()) {
        fail(source, number, "expected a nonempty square matrix");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return m;
}

}  // namespace gra::io
