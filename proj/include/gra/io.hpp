#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gra/experiment.hpp"

namespace gra::io {

/// Malformed input; the message carries the file name and 1-based line number.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that round-trips a double (17 significant digits).
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

struct DistributionTable {
    std::vector<double> alphas;
    Eigen::VectorXd p;
};

// index,alpha,p
std::string distribution_csv(const AlphaGrid& grid, const Eigen::VectorXd& p);
DistributionTable parse_distribution_csv(const std::string& text, const std::string& source = "<distribution>");

// index,u_x,u_y,t_f,method
std::string controls_csv(const ControlSet& controls);
ControlSet parse_controls_csv(const std::string& text, const std::string& source = "<controls>");

// control_index,x,y
std::string measurements_csv(const MeasurementSet& ms);
std::vector<TransverseReading> parse_measurements_csv(const std::string& text,
                                                      const std::string& source = "<measurements>");

// index,eigenvalue
std::string spectrum_csv(const Eigen::VectorXd& eigenvalues);
Eigen::VectorXd parse_spectrum_csv(const std::string& text, const std::string& source = "<spectrum>");

// iteration,chosen_index,objective,stop_reason
std::string trace_csv(const std::vector<OgraStep>& trace);

// index,alpha,p_true,p_recovered  (p_true left empty when unknown)
std::string result_csv(const AlphaGrid& grid, const Eigen::VectorXd* p_true, const Eigen::VectorXd& p_recovered);

/// Square matrix, one comma-separated row per line, no header.
Eigen::MatrixXd parse_matrix_csv(const std::string& text, const std::string& source = "<matrix>");

}  // namespace gra::io
