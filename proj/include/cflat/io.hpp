#pragma once

#include "cflat/grid.hpp"
#include "cflat/immersion.hpp"

#include <array>
#include <string>
#include <vector>

namespace cflat {

/// Row-major values: values[r * columns() + c].
struct CsvTable {
    std::vector<std::string> header;
    std::vector<double> values;

    std::size_t columns() const { return header.size(); }
    std::size_t rows() const { return header.empty() ? 0 : values.size() / header.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * header.size() + col]; }
    int column(const std::string& name) const;
};

std::vector<std::string> immersion_header(int n);

/// x, F, f, u, q, h per grid point; masked entries are NaN.
CsvTable immersion_table(const ImmersionGrid& grid);

/// x and the curvature normals v_i read from the frame.
CsvTable normals_table(const ImmersionGrid& grid);

/// Every value is printed with %.17g so that reading it back is exact.
std::string format_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

struct ObjMesh {
    std::vector<RVec> vertices;
    std::vector<std::array<int, 4>> quads; ///< zero-based vertex indices
};

/// Stereographic projection from -e_{2n-1}: f -> f_{1..2n-2} / (1 + f_{2n-1}).
RVec stereographic(const RVec& f);

/// Slice at fixed x_n index of an n = 3 immersion table, vertices in row-major order over (x_1, x_2).
ObjMesh obj_slice(const CsvTable& table, const GridGeometry& geometry, int slice_index,
                  const std::vector<int>& coordinates);

std::string format_obj(const ObjMesh& mesh);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace cflat
