#include "cflat/config.hpp"
#include "cflat/dressing.hpp"
#include "cflat/errors.hpp"
#include "cflat/io.hpp"
#include "cflat/pipeline.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

using namespace cflat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("cflat_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args)
{
    const char* cli = std::getenv("CFLAT_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "CFLAT_CLI is not set");
    const std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const fs::path& dir, const std::string& json)
{
    const fs::path p = dir / "config.json";
    write_file(p.string(), json);
    return p.string();
}

} // namespace

TEST_CASE("complex parameters parse in the usual spellings")
{
    CHECK(parse_complex("0.5") == Complex(0.5, 0.0));
    CHECK(parse_complex("-2") == Complex(-2.0, 0.0));
    CHECK(parse_complex("0.7i") == Complex(0.0, 0.7));
    CHECK(parse_complex("-i") == Complex(0.0, -1.0));
    CHECK(parse_complex("i") == Complex(0.0, 1.0));
    CHECK(parse_complex("1.5-0.25i") == Complex(1.5, -0.25));
    CHECK(parse_complex(" 2 ") == Complex(2.0, 0.0));
    CHECK_THROWS_AS(parse_complex("abc"), ConfigError);
    CHECK_THROWS_AS(parse_complex(""), ConfigError);
    for (Complex z : {Complex(0.5), Complex(0.0, 0.7), Complex(1.5, -0.25), Complex(-3.0)}) {
        CHECK(parse_complex(format_complex(z)) == z);
    }
}

TEST_CASE("configuration defaults and validation")
{
    const PipelineConfig cfg = parse_config("{}");
    CHECK(cfg.n == 3);
    CHECK(cfg.variant == BasisVariant::semisimple);
    CHECK(cfg.steps == std::vector<int>{21, 21, 21});
    CHECK(cfg.lo == std::vector<double>{-1.0, -1.0, -1.0});
    CHECK(cfg.hi == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(cfg.dressing.empty());
    CHECK(cfg.c.size() == 3);
    CHECK(cfg.mask_budget == 0.01);
    CHECK(cfg.tolerances.fd_constant == 25.0);
    CHECK(cfg.lambdas.size() == 9);

    const PipelineConfig d = parse_config(R"({"n":4,"steps":[11,13,15,17],"box":[[-1,0.5],[-0.5,1],[-1,1],[0,1]],
        "dressing":[{"alpha":"0.7i","seed":9},{"alpha":0.8}],"seed":5})");
    CHECK(d.n == 4);
    CHECK(d.steps == std::vector<int>{11, 13, 15, 17});
    CHECK(d.lo[3] == 0.0);
    CHECK(d.dressing.size() == 2);
    CHECK(d.dressing[0].alpha == Complex(0.0, 0.7));
    CHECK(d.dressing[0].seed == 9);
    CHECK(d.dressing[1].seed == 1);
    CHECK(d.seed == 5);

    for (const char* bad : {R"({"n":2})", R"({"n":7})", R"({"steps":3})", R"({"dressing":[{"alpha":"1"}]})",
                            R"({"dressing":[{"alpha":"-1"}]})", R"({"dressing":[{"alpha":"1+1i"}]})",
                            R"({"dressing":[{"alpha":0}]})", R"({"c":[1,1,1]})", R"({"b":[1,0,0]})",
                            R"({"box":[0.5,1]})", R"({"unknown":1})", R"({"outputs":{"mesh":"a"}})",
                            R"({"variant":"other"})", R"({"variant":"channel","p":2})", R"({"mask_budget":-1})",
                            "{", "[]"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_config(bad), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/cflat.json"), ConfigError);
}

TEST_CASE("immersion CSV layout and exact round trip")
{
    CHECK(immersion_header(3) == std::vector<std::string>{"x1",  "x2",  "x3",  "F_1", "F_2", "F_3", "F_4", "F_5",
                                                          "F_6", "f_1", "f_2", "f_3", "f_4", "f_5", "f_6", "u",
                                                          "q_1", "q_2", "q_3", "h_1", "h_2", "h_3"});
    PipelineConfig cfg = parse_config(R"({"dressing":[{"alpha":"0.5"}],"seed":1})");
    const Artifacts art = run_build(cfg);
    const CsvTable table = immersion_table(art.immersion);
    CHECK(table.rows() == 9261);
    CHECK(table.columns() == 22);
    // row-major, last axis fastest
    CHECK(table.at(0, 0) == -1.0);
    CHECK(table.at(0, 2) == -1.0);
    CHECK(table.at(1, 2) == doctest::Approx(-0.9));
    CHECK(table.at(1, 0) == -1.0);
    CHECK(table.at(21, 1) == doctest::Approx(-0.9));
    const int u = table.column("u");
    CHECK(u == 15);
    CHECK(table.at(100, u) == art.immersion.u[100]);

    const std::string text = format_csv(table);
    const CsvTable back = parse_csv(text);
    REQUIRE(back.values.size() == table.values.size());
    CHECK(back.header == table.header);
    bool exact = true;
    for (std::size_t k = 0; k < table.values.size(); ++k) {
        const double a = table.values[k];
        const double b = back.values[k];
        exact = exact && (a == b || (std::isnan(a) && std::isnan(b)));
    }
    CHECK(exact);
    CHECK(format_csv(back) == text);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), ArgumentError);
}

TEST_CASE("OBJ slice for n = 3")
{
    const PipelineConfig cfg = parse_config(R"({"dressing":[{"alpha":"0.5"}],"seed":1})");
    const fs::path dir = scratch("obj");
    const Artifacts art = run_build(cfg);
    write_build_outputs(art, dir.string());
    const std::string obj = run_export(cfg, dir.string());
    const std::string text = read_file(obj);
    std::size_t vertices = 0;
    std::size_t faces = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        const std::string line = text.substr(pos, end - pos);
        vertices += line.rfind("v ", 0) == 0;
        faces += line.rfind("f ", 0) == 0;
        pos = end == std::string::npos ? text.size() : end + 1;
    }
    CHECK(vertices == 441);
    CHECK(faces == 400);

    const ObjMesh mesh = obj_slice(immersion_table(art.immersion), art.geometry, -1, {0, 1, 2});
    CHECK(mesh.vertices.size() == 441);
    CHECK(mesh.quads.size() == 400);
    CHECK(mesh.quads[0] == std::array<int, 4>{0, 21, 22, 1});
    CHECK(format_obj(mesh) == text);

    RVec f(6);
    f << 0.0, 0.0, 0.0, 0.0, 1.0, 0.0;
    CHECK(max_abs(stereographic(f)) == 0.0);

    const fs::path empty = scratch("obj_missing");
    CHECK_THROWS_AS(run_export(cfg, empty.string()), ConfigError);
    PipelineConfig four = parse_config(R"({"n":4,"steps":7})");
    CHECK_THROWS_AS(obj_slice(immersion_table(run_build(four).immersion), config_geometry(four), -1, {0, 1, 2}),
                    ArgumentError);
}

TEST_CASE("report records equal direct library evaluations")
{
    const PipelineConfig cfg = parse_config(R"({"dressing":[{"alpha":"0.5"}],"seed":1})");
    const Artifacts art = run_build(cfg);
    const Report report = run_verify(art);
    CHECK(report.all_pass());
    CHECK(report.exit_code() == 0);
    CHECK(report.grid_points == 9261);

    const Record* null = report.find("lift.null");
    REQUIRE(null != nullptr);
    CHECK(null->residual == null_lift_residual(art.immersion).max);
    const Record* uk = report.find("uk.residual");
    REQUIRE(uk != nullptr);
    CHECK(uk->residual == uk_residual(dressed_solution(art.frame, art.geometry)).max);
    CHECK(uk->gate == doctest::Approx(0.25));
    const Record* flat = report.find("metric.flatness");
    REQUIRE(flat != nullptr);
    CHECK(flat->residual == metric_flatness_residual(art.immersion.h, art.geometry, &art.immersion.mask).max);
    const Record* squared = report.find("first_form.squared");
    REQUIRE(squared != nullptr);
    CHECK(squared->residual == first_form_residual(art.immersion, 2).max);
    CHECK(report.find("first_form.linear")->compare == Compare::info);
    CHECK(report.find("no.such.record") == nullptr);

    const std::string text = report.text();
    CHECK(text.find("record name=lift.null ") != std::string::npos);
    CHECK(text.find("summary records=") != std::string::npos);
    CHECK(text.find("exit_code=0") != std::string::npos);
}

TEST_CASE("build and verify are deterministic")
{
    const PipelineConfig cfg = parse_config(R"({"dressing":[{"alpha":"0.5"},{"alpha":"0.8"}],"seed":4})");
    const Artifacts a = run_build(cfg, Exec::parallel);
    const Artifacts b = run_build(cfg, Exec::serial);
    CHECK(format_csv(immersion_table(a.immersion)) == format_csv(immersion_table(b.immersion)));
    CHECK(run_verify(a, Exec::parallel).text() == run_verify(b, Exec::serial).text());
    REQUIRE(a.provenance.size() == 2);
    CHECK(a.provenance[0].seed == b.provenance[0].seed);
    CHECK(a.provenance[1].attempts == b.provenance[1].attempts);
}

TEST_CASE("report exit codes")
{
    Report r;
    r.grid_points = 1000;
    r.mask_budget = 0.01;
    r.records.push_back({"a", "", 0.0, 1.0, Compare::le, true, 0});
    CHECK(r.exit_code() == 0);
    r.records.push_back({"b", "", 2.0, 1.0, Compare::le, false, 0});
    CHECK(r.exit_code() == 3);
    r.masked_points = 10;
    CHECK(r.exit_code() == 3);
    r.masked_points = 11;
    CHECK(r.budget_exceeded());
    CHECK(r.exit_code() == 4);
}

TEST_CASE("command line exit codes")
{
    const fs::path dir = scratch("cli");
    const std::string out = " --out " + dir.string();
    const std::string vac = write_config(dir, R"({"steps":11})");
    CHECK(run_cli("verify --config " + vac + out) == 0);
    CHECK(fs::exists(dir / "report.txt"));
    CHECK(run_cli("build --config " + vac + out + " --parallel 1") == 0);
    CHECK(fs::exists(dir / "immersion.csv"));
    CHECK(fs::exists(dir / "normals.csv"));
    CHECK(run_cli("export --config " + vac + out) == 0);
    CHECK(fs::exists(dir / "slice.obj"));
    CHECK(run_cli("info --config " + vac) == 0);
    CHECK(run_cli("info") == 0);

    const fs::path bad_dir = scratch("cli_bad");
    const std::string bad = write_config(bad_dir, R"({"dressing":[{"alpha":"1"}]})");
    CHECK(run_cli("verify --config " + bad + out) == 2);
    CHECK(run_cli("verify --config " + (bad_dir / "missing.json").string() + out) == 2);
    CHECK(run_cli("verify") == 2);
    CHECK(run_cli("frobnicate") == 2);

    const fs::path noise_dir = scratch("cli_noise");
    const std::string noisy = write_config(noise_dir, R"({"steps":11,"inject_noise":0.05})");
    CHECK(run_cli("verify --config " + noisy + " --out " + noise_dir.string()) == 3);
    const std::string report = read_file((noise_dir / "report.txt").string());
    CHECK(report.find("record name=uk.residual") != std::string::npos);
    CHECK(report.find("exit_code=3") != std::string::npos);
}
