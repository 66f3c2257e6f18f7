#include "cflat/config.hpp"
#include "cflat/errors.hpp"
#include "cflat/io.hpp"
#include "cflat/parallel.hpp"
#include "cflat/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    int parallel = 0;
    std::string out = ".";
};

void add_common(CLI::App* cmd, Options& opt, bool needs_config)
{
    auto* c = cmd->add_option("--config", opt.config, "JSON configuration file");
    if (needs_config) {
        c->required();
    }
    cmd->add_option("--seed", opt.seed, "override the configured seed");
    cmd->add_option("--parallel", opt.parallel, "thread count; 1 runs the serial path, 0 uses the OpenMP default")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", opt.out, "output directory");
}

cflat::PipelineConfig load(const Options& opt)
{
    cflat::PipelineConfig cfg = cflat::load_config(opt.config);
    if (opt.seed) {
        cfg.seed = *opt.seed;
    }
    return cfg;
}

cflat::Exec exec_for(const Options& opt)
{
    cflat::set_thread_count(opt.parallel);
    return opt.parallel == 1 ? cflat::Exec::serial : cflat::Exec::parallel;
}

int cmd_build(const Options& opt)
{
    const cflat::PipelineConfig cfg = load(opt);
    const cflat::Artifacts art = cflat::run_build(cfg, exec_for(opt));
    cflat::write_build_outputs(art, opt.out);
    const cflat::OutputFiles files = cflat::output_paths(cfg, opt.out);
    const std::size_t masked = art.immersion.mask.count();
    std::printf("build points=%zu masked=%zu csv=%s normals=%s\n", art.geometry.size(), masked, files.csv.c_str(),
                files.normals.c_str());
    for (std::size_t k = 0; k < art.provenance.size(); ++k) {
        const cflat::ElementProvenance& p = art.provenance[k];
        std::printf("element %zu alpha=%s source=%s attempts=%d regular=%s min_q=%.6g max_potential=%.6g\n", k,
                    p.alpha_text.c_str(), p.explicit_line ? "line" : "seed", p.attempts,
                    p.regular ? "true" : "false", p.min_q, p.max_potential);
    }
    if (static_cast<double>(masked) > cfg.mask_budget * static_cast<double>(art.geometry.size())) {
        std::fprintf(stderr, "error: kind=MaskBudget message=\"%zu of %zu grid points masked, budget %.3g\"\n", masked,
                     art.geometry.size(), cfg.mask_budget);
        for (std::size_t k = 0; k < art.geometry.size(); ++k) {
            if (art.immersion.mask.masked(k)) {
                std::fprintf(stderr, "first masked point index=%zu reason=\"%s\"\n", k,
                             art.immersion.mask.reason(k).c_str());
                break;
            }
        }
        return 4;
    }
    return 0;
}

int cmd_verify(const Options& opt)
{
    const cflat::PipelineConfig cfg = load(opt);
    const cflat::Exec exec = exec_for(opt);
    const cflat::Artifacts art = cflat::run_build(cfg, exec);
    const cflat::Report report = cflat::run_verify(art, exec);
    std::filesystem::create_directories(opt.out);
    const cflat::OutputFiles files = cflat::output_paths(cfg, opt.out);
    const std::string text = report.text();
    cflat::write_file(files.report, text);
    std::fputs(text.c_str(), stdout);
    return report.exit_code();
}

int cmd_export(const Options& opt)
{
    const cflat::PipelineConfig cfg = load(opt);
    const std::string obj = cflat::run_export(cfg, opt.out);
    if (obj.empty()) {
        std::printf("export csv verified; no OBJ slice for this configuration\n");
    } else {
        std::printf("export obj=%s\n", obj.c_str());
    }
    return 0;
}

const char* variant_name(cflat::BasisVariant v) { return v == cflat::BasisVariant::channel ? "channel" : "semisimple"; }

int cmd_info(const Options& opt)
{
    std::printf("cflat: curved flats, dressing and flat-lift immersions\n");
    std::printf("threads=%d\n", cflat::thread_count());
    exec_for(opt);
    if (opt.config.empty()) {
        return 0;
    }
    const cflat::PipelineConfig cfg = load(opt);
    const cflat::GridGeometry g = cflat::config_geometry(cfg);
    std::printf("n=%d variant=%s", cfg.n, variant_name(cfg.variant));
    if (cfg.variant == cflat::BasisVariant::channel) {
        std::printf(" p=%d", cfg.p);
    }
    std::printf("\ngrid points=%zu h=%.6g fd_gate=%.6g seed=%llu\n", g.size(), g.max_spacing(),
                cfg.tolerances.fd_constant * g.max_spacing() * g.max_spacing(),
                static_cast<unsigned long long>(cfg.seed));
    for (std::size_t k = 0; k < cfg.dressing.size(); ++k) {
        std::printf("dressing %zu alpha=%s %s\n", k, cflat::format_complex(cfg.dressing[k].alpha).c_str(),
                    cfg.dressing[k].line ? "explicit line" : "seeded line");
    }
    std::printf("c=");
    for (Eigen::Index i = 0; i < cfg.c.size(); ++i) {
        std::printf("%s%.17g", i ? "," : "", cfg.c(i));
    }
    std::printf("\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cflat: build, verify and export flat-lift immersions"};
    app.require_subcommand(1);
    Options opt;
    auto* build = app.add_subcommand("build", "build the immersion grid and write CSV files");
    auto* verify = app.add_subcommand("verify", "build and check every invariant, write the report");
    auto* exp = app.add_subcommand("export", "write the OBJ slice from built CSV files");
    auto* info = app.add_subcommand("info", "print configuration and runtime information");
    add_common(build, opt, true);
    add_common(verify, opt, true);
    add_common(exp, opt, true);
    add_common(info, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*build) {
            return cmd_build(opt);
        }
        if (*verify) {
            return cmd_verify(opt);
        }
        if (*exp) {
            return cmd_export(opt);
        }
        return cmd_info(opt);
    } catch (const cflat::ConfigError& err) {
        std::fprintf(stderr, "error: kind=ConfigError message=\"%s\"\n", err.what());
        return 2;
    } catch (const cflat::ArgumentError& err) {
        std::fprintf(stderr, "error: kind=ArgumentError message=\"%s\"\n", err.what());
        return 2;
    } catch (const cflat::Error& err) {
        std::fprintf(stderr, "error: kind=NumericalDegeneracy message=\"%s\"\n", err.what());
        return 4;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: kind=Internal message=\"%s\"\n", err.what());
        return 3;
    }
}
