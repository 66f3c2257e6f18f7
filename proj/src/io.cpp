#include "cflat/io.hpp"

#include "cflat/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace cflat {

namespace {

void append_number(std::string& out, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void append_vec(std::vector<double>& row, const RVec& v, int size)
{
    for (int i = 0; i < size; ++i) {
        row.push_back(v.size() == size ? v(i) : std::numeric_limits<double>::quiet_NaN());
    }
}

} // namespace

int CsvTable::column(const std::string& name) const
{
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) {
            return static_cast<int>(c);
        }
    }
    throw ArgumentError("csv: no column named '" + name + "'");
}

std::vector<std::string> immersion_header(int n)
{
    std::vector<std::string> h;
    for (int i = 1; i <= n; ++i) {
        h.push_back("x" + std::to_string(i));
    }
    for (int i = 1; i <= 2 * n; ++i) {
        h.push_back("F_" + std::to_string(i));
    }
    for (int i = 1; i <= 2 * n; ++i) {
        h.push_back("f_" + std::to_string(i));
    }
    h.push_back("u");
    for (int i = 1; i <= n; ++i) {
        h.push_back("q_" + std::to_string(i));
    }
    for (int i = 1; i <= n; ++i) {
        h.push_back("h_" + std::to_string(i));
    }
    return h;
}

CsvTable immersion_table(const ImmersionGrid& grid)
{
    const int n = grid.geometry.dim();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CsvTable t;
    t.header = immersion_header(n);
    t.values.reserve(grid.geometry.size() * t.header.size());
    for (std::size_t k = 0; k < grid.geometry.size(); ++k) {
        append_vec(t.values, grid.geometry.point(k), n);
        const bool masked = grid.mask.masked(k);
        append_vec(t.values, masked ? RVec() : grid.F[k], 2 * n);
        append_vec(t.values, masked ? RVec() : grid.f[k], 2 * n);
        t.values.push_back(masked ? nan : grid.u[k]);
        append_vec(t.values, masked ? RVec() : grid.q[k], n);
        append_vec(t.values, masked ? RVec() : grid.h[k], n);
    }
    return t;
}

CsvTable normals_table(const ImmersionGrid& grid)
{
    const int n = grid.geometry.dim();
    CsvTable t;
    for (int i = 1; i <= n; ++i) {
        t.header.push_back("x" + std::to_string(i));
    }
    for (int i = 1; i <= n; ++i) {
        for (int a = 1; a <= 2 * n; ++a) {
            t.header.push_back("v" + std::to_string(i) + "_" + std::to_string(a));
        }
    }
    for (std::size_t k = 0; k < grid.geometry.size(); ++k) {
        append_vec(t.values, grid.geometry.point(k), n);
        const bool masked = grid.mask.masked(k);
        for (int i = 0; i < n; ++i) {
            append_vec(t.values, masked ? RVec() : grid.v[k][i], 2 * n);
        }
    }
    return t;
}

std::string format_csv(const CsvTable& table)
{
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        out += c ? "," : "";
        out += table.header[c];
    }
    out += '\n';
    const std::size_t cols = table.columns();
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) {
                out += ',';
            }
            append_number(out, table.values[r * cols + c]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw ArgumentError("csv: missing header");
    }
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) {
            t.header.push_back(cell);
        }
    }
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        ++row;
        std::size_t count = 0;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p) {
                throw ArgumentError("csv: unreadable value in row " + std::to_string(row));
            }
            t.values.push_back(v);
            ++count;
            if (*end == '\0') {
                break;
            }
            if (*end != ',') {
                throw ArgumentError("csv: unexpected character in row " + std::to_string(row));
            }
            p = end + 1;
        }
        if (count != t.header.size()) {
            throw ArgumentError("csv: row " + std::to_string(row) + " has " + std::to_string(count) +
                                " values, expected " + std::to_string(t.header.size()));
        }
    }
    return t;
}

RVec stereographic(const RVec& f)
{
    const Eigen::Index m = f.size() - 2;
    return f.head(m) / (1.0 + f(m));
}

ObjMesh obj_slice(const CsvTable& table, const GridGeometry& geometry, int slice_index,
                  const std::vector<int>& coordinates)
{
    if (geometry.dim() != 3) {
        throw ArgumentError("obj: slices are defined for n = 3 only");
    }
    if (table.rows() != geometry.size()) {
        throw ArgumentError("obj: table has " + std::to_string(table.rows()) + " rows, grid has " +
                            std::to_string(geometry.size()) + " points");
    }
    const int n = 3;
    if (slice_index < 0) {
        slice_index = geometry.steps(2) / 2;
    }
    if (slice_index >= geometry.steps(2)) {
        throw ArgumentError("obj: slice index beyond the grid");
    }
    if (coordinates.size() != 3) {
        throw ArgumentError("obj: expected three coordinates");
    }
    for (int c : coordinates) {
        if (c < 0 || c >= 2 * n - 2) {
            throw ArgumentError("obj: coordinate index out of range");
        }
    }
    const int f0 = table.column("f_1");
    const int s0 = geometry.steps(0);
    const int s1 = geometry.steps(1);
    ObjMesh mesh;
    std::vector<char> valid;
    for (int i = 0; i < s0; ++i) {
        for (int j = 0; j < s1; ++j) {
            const std::size_t row = geometry.flat_index({i, j, slice_index});
            RVec f(2 * n);
            for (int a = 0; a < 2 * n; ++a) {
                f(a) = table.at(row, f0 + a);
            }
            const RVec s = stereographic(f);
            RVec v(3);
            for (int c = 0; c < 3; ++c) {
                v(c) = s(coordinates[c]);
            }
            valid.push_back(v.allFinite());
            mesh.vertices.push_back(v);
        }
    }
    for (int i = 0; i + 1 < s0; ++i) {
        for (int j = 0; j + 1 < s1; ++j) {
            const std::array<int, 4> q{i * s1 + j, (i + 1) * s1 + j, (i + 1) * s1 + j + 1, i * s1 + j + 1};
            if (valid[q[0]] && valid[q[1]] && valid[q[2]] && valid[q[3]]) {
                mesh.quads.push_back(q);
            }
        }
    }
    return mesh;
}

std::string format_obj(const ObjMesh& mesh)
{
    std::string out;
    for (const RVec& v : mesh.vertices) {
        out += "v";
        for (Eigen::Index c = 0; c < v.size(); ++c) {
            out += ' ';
            append_number(out, v(c));
        }
        out += '\n';
    }
    for (const auto& q : mesh.quads) {
        out += "f";
        for (int idx : q) {
            out += ' ' + std::to_string(idx + 1);
        }
        out += '\n';
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ArgumentError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ArgumentError("cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw ArgumentError("write failed for '" + path + "'");
    }
}

} // namespace cflat
