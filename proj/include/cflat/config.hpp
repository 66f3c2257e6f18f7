#pragma once

#include "cflat/linalg.hpp"
#include "cflat/uk_system.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cflat {

/// Parses "0.5", "-2", "0.7i", "-i", "1.5-0.25i" and similar.
Complex parse_complex(const std::string& text);
std::string format_complex(Complex z);

struct DressingSpec {
    Complex alpha;
    std::string alpha_text;
    /// Offset mixed with the global seed; defaults to the element position.
    std::uint64_t seed = 0;
    /// Explicit spanning vector of the line, bypassing the random draw.
    std::optional<CVec> line;
};

struct Tolerances {
    double fd_constant = 25.0; ///< finite-difference gates are fd_constant * h^2
    double pointwise = 1e-10;
    double frame = 1e-9;
    double ribaucour = 1e-8;
    double permutability = 1e-9;
    double bianchi = 1e-8;
};

struct ScreenSpec {
    bool enabled = true;
    double min_q = 0.1;
    double max_potential = 1.5;
    int attempts = 256;
    int steps = 7;
};

struct ObjSpec {
    bool enabled = true;
    std::string file = "slice.obj";
    int slice_index = -1; ///< index along x_3; -1 picks the middle
    std::vector<int> coordinates{0, 1, 2};
};

struct PipelineConfig {
    int n = 3;
    BasisVariant variant = BasisVariant::semisimple;
    int p = 1;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<int> steps;
    std::uint64_t seed = 1;
    std::vector<DressingSpec> dressing;
    RVec c;
    std::optional<RVec> b;
    std::vector<Complex> lambdas;
    Tolerances tolerances;
    ScreenSpec screen;
    double mask_budget = 0.01;
    double inject_noise = 0.0;
    std::string csv_file = "immersion.csv";
    std::string report_file = "report.txt";
    ObjSpec obj;
};

/// Throws ConfigError with the offending key on any schema or value problem.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::string& path);

} // namespace cflat
