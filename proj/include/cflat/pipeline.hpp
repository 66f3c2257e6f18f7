#pragma once

#include "cflat/config.hpp"
#include "cflat/frames.hpp"
#include "cflat/immersion.hpp"
#include "cflat/parallel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cflat {

struct ElementProvenance {
    Complex alpha;
    std::string alpha_text;
    bool explicit_line = false;
    std::uint64_t seed = 0;
    int attempts = 0;   ///< candidate lines drawn before acceptance
    bool regular = true; ///< false when no candidate passed the screen and the best one was kept
    double min_q = 0.0;
    double max_potential = 0.0;
};

struct Artifacts {
    PipelineConfig config;
    CartanBasis basis;
    GridGeometry geometry;
    ExtendedFrame frame;
    std::vector<ElementProvenance> provenance;
    ImmersionGrid immersion;
};

CartanBasis config_basis(const PipelineConfig& config);
GridGeometry config_geometry(const PipelineConfig& config);

/// Draws or reads each dressing line in order and dresses the vacuum with it.
/// Seeded lines are rejection-sampled against the regularity screen.
ExtendedFrame build_frame(const PipelineConfig& config, std::vector<ElementProvenance>* provenance = nullptr);

Artifacts run_build(const PipelineConfig& config, Exec exec = Exec::parallel);

enum class Compare { le, gt, info };
const char* to_string(Compare c);

struct Record {
    std::string name;
    std::string identity;
    double residual = 0.0;
    double gate = 0.0;
    Compare compare = Compare::le;
    bool pass = true;
    std::size_t masked = 0;
};

struct Report {
    std::vector<Record> records;
    std::size_t grid_points = 0;
    std::size_t masked_points = 0;
    double mask_budget = 0.0;

    bool all_pass() const;
    bool budget_exceeded() const;
    /// 0 ok, 3 a gate failed, 4 too many masked points.
    int exit_code() const;
    const Record* find(const std::string& name) const;
    std::string text() const;
};

Report run_verify(const Artifacts& artifacts, Exec exec = Exec::parallel);

/// Sample points used by pointwise checks: a 3-point lattice per axis inside the grid.
std::vector<std::size_t> sample_points(const GridGeometry& geometry);

/// F of the flat lift on every grid point, sign-adjusted so that (F, t_0) > 0; empty at failures.
std::vector<RVec> lift_field(const ExtendedFrame& frame, const GridGeometry& geometry, const RVec& c, Exec exec);

struct OutputFiles {
    std::string csv;
    std::string normals;
    std::string report;
    std::string obj;
};

OutputFiles output_paths(const PipelineConfig& config, const std::string& dir);

void write_build_outputs(const Artifacts& artifacts, const std::string& dir);

/// Reads the CSV written by build and writes the OBJ slice; returns the OBJ path.
std::string run_export(const PipelineConfig& config, const std::string& dir);

} // namespace cflat
