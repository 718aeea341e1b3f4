#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "gra/io.hpp"

using namespace gra;
namespace fs = std::filesystem;

namespace {

const AlphaGrid kGrid = alpha_grid(30, -0.2, 0.2, std::numbers::pi / 10.0);

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("gra_io_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, i % 40 - 20);
        CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(io::format_double(std::nan("")) == "nan");
}

TEST_CASE("exact headers") {
    CHECK(io::distribution_csv(kGrid, uniform_distribution(30).values()).rfind("index,alpha,p\n", 0) == 0);
    CHECK(io::spectrum_csv(Eigen::Vector2d(2.0, 1.0)) == "index,eigenvalue\n1,2\n2,1\n");
    CHECK(io::controls_csv({{{1.0, -2.0, 16.0}}, Method::grat}) == "index,u_x,u_y,t_f,method\n1,1,-2,16,GRAt\n");
    MeasurementSet ms;
    ms.readings = {{0.5, -0.25}};
    CHECK(io::measurements_csv(ms) == "control_index,x,y\n1,0.5,-0.25\n");
    const std::vector<OgraStep> trace = {
        {0, 4, 2.5, StopReason::none, 1.0},
        {1, std::nullopt, std::numeric_limits<double>::quiet_NaN(), StopReason::iteration_cap, 0.0}};
    CHECK(io::trace_csv(trace) == "iteration,chosen_index,objective,stop_reason\n0,5,2.5,none\n1,,,iteration_cap\n");
    const AlphaGrid g{{-1.0, 1.0}, 0.0};
    const Eigen::VectorXd truth = Eigen::Vector2d(0.25, 0.75);
    CHECK(io::result_csv(g, &truth, Eigen::Vector2d(0.5, 0.5)) ==
          "index,alpha,p_true,p_recovered\n1,-1,0.25,0.5\n2,1,0.75,0.5\n");
    CHECK(io::result_csv(g, nullptr, Eigen::Vector2d(0.5, 0.5)) ==
          "index,alpha,p_true,p_recovered\n1,-1,,0.5\n2,1,,0.5\n");
}

TEST_CASE("round trips") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> amp(-10.0, 10.0);
    std::uniform_real_distribution<double> dur(0.0, 16.0);
    ControlSet controls;
    controls.method = Method::rcct;
    for (int k = 0; k < 30; ++k) controls.pulses.push_back({amp(rng), amp(rng), dur(rng)});
    const ControlSet back = io::parse_controls_csv(io::controls_csv(controls));
    CHECK(back.pulses == controls.pulses);
    CHECK(back.method == Method::rcct);

    const Eigen::VectorXd p = double_peak_distribution(kGrid).values();
    const io::DistributionTable table = io::parse_distribution_csv(io::distribution_csv(kGrid, p));
    CHECK(table.p == p);
    CHECK(table.alphas == kGrid.alphas);

    MeasurementSet ms;
    for (int k = 0; k < 10; ++k) ms.readings.emplace_back(amp(rng) / 10.0, amp(rng) / 10.0);
    CHECK(io::parse_measurements_csv(io::measurements_csv(ms)) == ms.readings);

    Eigen::VectorXd ev(5);
    ev << 3.5, 1e-300, 0.1, -2e-17, 7.0;
    CHECK(io::parse_spectrum_csv(io::spectrum_csv(ev)) == ev);

    CHECK(io::parse_matrix_csv("1,0\n0,1\n") == Eigen::Matrix2d::Identity());
}

TEST_CASE("parse errors carry source and line") {
    auto message = [](auto&& fn) {
        try {
            fn();
        } catch (const io::ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message([] { io::parse_controls_csv("index,u_x,u_y\n", "c.csv"); }) ==
          "c.csv:1: expected header 'index,u_x,u_y,t_f,method'");
    CHECK(message([] { io::parse_controls_csv("index,u_x,u_y,t_f,method\n1,1,2,3,GRA\n2,1,x,3,GRA\n", "c.csv"); }) ==
          "c.csv:3: not a number: 'x'");
    CHECK(message([] { io::parse_controls_csv("index,u_x,u_y,t_f,method\n1,1,2,-3,GRA\n", "c.csv"); }) ==
          "c.csv:2: negative duration");
    CHECK(message([] { io::parse_controls_csv("index,u_x,u_y,t_f,method\n1,1,2,3,GRA\n2,1,2,3,RCC\n", "c"); }) ==
          "c:3: mixed method tags");
    CHECK(message([] { io::parse_measurements_csv("control_index,x,y\n2,0,0\n", "m"); }) ==
          "m:2: expected index 1");
    CHECK(message([] { io::parse_measurements_csv("control_index,x,y\n1,0\n", "m"); }) ==
          "m:2: expected 3 fields, found 2");
    CHECK(message([] { io::parse_matrix_csv("1,2\n3\n", "w"); }) == "w:2: ragged matrix row");
    CHECK(message([] { io::parse_distribution_csv("", "d"); }) == "d:0: missing header 'index,alpha,p'");
}

TEST_CASE("atomic writes") {
    const fs::path dir = scratch_dir("atomic");
    const fs::path file = dir / "nested" / "out.csv";
    io::write_atomic(file, "first\n");
    io::write_atomic(file, "second\n");
    CHECK(io::read_file(file) == "second\n");
    for (const auto& entry : fs::directory_iterator(file.parent_path())) {
        CHECK(entry.path().filename() == "out.csv");
    }
    CHECK_THROWS(io::read_file(dir / "missing.csv"));
    fs::remove_all(dir);
}
