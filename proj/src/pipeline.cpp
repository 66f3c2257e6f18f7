#include "cflat/pipeline.hpp"

#include "cflat/dressing.hpp"
#include "cflat/errors.hpp"
#include "cflat/io.hpp"
#include "cflat/simple_element.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

namespace cflat {

CartanBasis config_basis(const PipelineConfig& config)
{
    return config.variant == BasisVariant::channel ? CartanBasis::channel(config.n, config.p)
                                                   : CartanBasis::semisimple(config.n);
}

GridGeometry config_geometry(const PipelineConfig& config)
{
    return GridGeometry(config.lo, config.hi, config.steps);
}

namespace {

std::mt19937_64 element_rng(std::uint64_t global_seed, std::uint64_t element_seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(global_seed), static_cast<std::uint32_t>(global_seed >> 32),
                      static_cast<std::uint32_t>(element_seed), static_cast<std::uint32_t>(element_seed >> 32)};
    return std::mt19937_64(seq);
}

double screen_score(const RegularityScreen& s, const ScreenSpec& spec)
{
    if (!std::isfinite(s.min_q) || !std::isfinite(s.max_potential)) {
        return -1.0;
    }
    return std::min(s.min_q / spec.min_q, spec.max_potential / std::max(s.max_potential, 1e-300));
}

} // namespace

ExtendedFrame build_frame(const PipelineConfig& config, std::vector<ElementProvenance>* provenance)
{
    const CartanBasis basis = config_basis(config);
    const QuadraticForm& form = basis.form();
    ExtendedFrame frame = ExtendedFrame::vacuum(basis);
    const GridGeometry coarse(config.lo, config.hi, std::vector<int>(config.n, config.screen.steps));
    for (std::size_t k = 0; k < config.dressing.size(); ++k) {
        const DressingSpec& spec = config.dressing[k];
        ElementProvenance prov;
        prov.alpha = spec.alpha;
        prov.alpha_text = spec.alpha_text;
        prov.seed = spec.seed;
        std::optional<SimpleElement> chosen;
        std::optional<RegularityScreen> chosen_screen;
        if (spec.line) {
            prov.explicit_line = true;
            prov.attempts = 1;
            try {
                chosen = SimpleElement::make(spec.alpha, *spec.line, form);
            } catch (const DegenerateLine& err) {
                throw ConfigError("dressing[" + std::to_string(k) + "].line: " + err.what());
            } catch (const ArgumentError& err) {
                throw ConfigError("dressing[" + std::to_string(k) + "].line: " + err.what());
            }
            chosen_screen = screen_regularity(frame.dressed(*chosen), coarse, config.c, config.screen.min_q,
                                              config.screen.max_potential);
        } else {
            std::mt19937_64 rng = element_rng(config.seed, spec.seed);
            const int attempts = config.screen.enabled ? config.screen.attempts : 1;
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < attempts; ++a) {
                SimpleElement candidate = random_simple_element(spec.alpha, form, rng);
                const RegularityScreen s = screen_regularity(frame.dressed(candidate), coarse, config.c,
                                                             config.screen.min_q, config.screen.max_potential);
                const double score = screen_score(s, config.screen);
                if (score > best) {
                    best = score;
                    chosen = candidate;
                    chosen_screen = s;
                    prov.attempts = a + 1;
                }
                if (s.regular) {
                    break;
                }
            }
        }
        prov.regular = chosen_screen->regular;
        prov.min_q = chosen_screen->min_q;
        prov.max_potential = chosen_screen->max_potential;
        frame = frame.dressed(*chosen);
        if (provenance) {
            provenance->push_back(prov);
        }
    }
    return frame;
}

Artifacts run_build(const PipelineConfig& config, Exec exec)
{
    std::vector<ElementProvenance> provenance;
    ExtendedFrame frame = build_frame(config, &provenance);
    const GridGeometry geometry = config_geometry(config);
    ImmersionGrid immersion = build_immersion(frame, geometry, config.c, exec);
    return Artifacts{config, frame.basis(), geometry, std::move(frame), std::move(provenance), std::move(immersion)};
}

const char* to_string(Compare c)
{
    switch (c) {
    case Compare::le:
        return "le";
    case Compare::gt:
        return "gt";
    case Compare::info:
        return "info";
    }
    return "?";
}

bool Report::all_pass() const
{
    return std::all_of(records.begin(), records.end(), [](const Record& r) { return r.pass; });
}

bool Report::budget_exceeded() const
{
    return grid_points > 0 && static_cast<double>(masked_points) > mask_budget * static_cast<double>(grid_points);
}

int Report::exit_code() const
{
    if (budget_exceeded()) {
        return 4;
    }
    return all_pass() ? 0 : 3;
}

const Record* Report::find(const std::string& name) const
{
    for (const Record& r : records) {
        if (r.name == name) {
            return &r;
        }
    }
    return nullptr;
}

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

} // namespace

std::string Report::text() const
{
    std::string out;
    std::size_t failed = 0;
    for (const Record& r : records) {
        failed += r.pass ? 0 : 1;
        out += "record name=" + r.name + " identity=\"" + r.identity + "\" residual=" + num(r.residual) +
               " gate=" + num(r.gate) + " compare=" + to_string(r.compare) + " pass=" + (r.pass ? "true" : "false") +
               " masked=" + std::to_string(r.masked) + "\n";
    }
    out += "summary records=" + std::to_string(records.size()) + " failed=" + std::to_string(failed) +
           " masked_points=" + std::to_string(masked_points) + " grid_points=" + std::to_string(grid_points) +
           " mask_budget=" + num(mask_budget) + " exit_code=" + std::to_string(exit_code()) + "\n";
    return out;
}

std::vector<std::size_t> sample_points(const GridGeometry& geometry)
{
    const int n = geometry.dim();
    std::vector<std::vector<int>> picks(n);
    for (int a = 0; a < n; ++a) {
        const int s = geometry.steps(a);
        picks[a] = {1, s / 2, s - 2};
    }
    std::vector<std::size_t> out;
    std::vector<int> idx(n, 0);
    std::vector<int> counter(n, 0);
    while (true) {
        for (int a = 0; a < n; ++a) {
            idx[a] = picks[a][counter[a]];
        }
        out.push_back(geometry.flat_index(idx));
        int a = n - 1;
        while (a >= 0 && ++counter[a] == 3) {
            counter[a] = 0;
            --a;
        }
        if (a < 0) {
            break;
        }
    }
    return out;
}

std::vector<RVec> lift_field(const ExtendedFrame& frame, const GridGeometry& geometry, const RVec& c, Exec exec)
{
    std::vector<RVec> out(geometry.size());
    for_each_index(geometry.size(), exec, [&](std::size_t k) {
        try {
            const LiftPoint lift = flat_lift(frame, geometry.point(k), c);
            const SpherePoint sp = project_to_sphere(lift.F, frame.form());
            out[k] = sp.orientation * lift.F;
        } catch (const Error&) {
            out[k] = RVec();
        }
    });
    return out;
}

namespace {

class Recorder {
public:
    explicit Recorder(Report& report) : report_(report) {}

    void le(const std::string& name, const std::string& identity, double residual, double gate,
            std::size_t masked = 0)
    {
        report_.records.push_back({name, identity, residual, gate, Compare::le, residual <= gate, masked});
    }
    void gt(const std::string& name, const std::string& identity, double residual, double gate,
            std::size_t masked = 0)
    {
        report_.records.push_back({name, identity, residual, gate, Compare::gt, residual > gate, masked});
    }
    void info(const std::string& name, const std::string& identity, double residual, double gate,
              std::size_t masked = 0)
    {
        report_.records.push_back({name, identity, residual, gate, Compare::info, true, masked});
    }
    void measure(const std::string& name, const std::string& identity, const Measure& m, double gate)
    {
        // a check that could not be evaluated anywhere is a failure, not a pass
        Record r{name, identity, m.max, gate, Compare::le, m.evaluated > 0 && m.max <= gate, m.skipped};
        report_.records.push_back(r);
    }

private:
    Report& report_;
};

SolutionGrid with_noise(SolutionGrid sol, double amplitude, std::uint64_t seed)
{
    if (amplitude <= 0.0) {
        return sol;
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    const int n = sol.basis.n();
    for (RMat& v : sol.values) {
        RMat xi = extract_xi(v, n);
        for (Eigen::Index k = 0; k < xi.size(); ++k) {
            xi.data()[k] += amplitude * normal(rng);
        }
        v = PPotential::projected(xi, sol.basis).matrix();
    }
    return sol;
}

double max_diff(const std::vector<RVec>& a, const std::vector<RVec>& b, std::size_t& masked)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].size() == 0 || b[k].size() == 0) {
            ++masked;
            continue;
        }
        worst = std::max(worst, (a[k] - b[k]).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

Report run_verify(const Artifacts& art, Exec exec)
{
    const PipelineConfig& cfg = art.config;
    const Tolerances& tol = cfg.tolerances;
    const GridGeometry& g = art.geometry;
    const ExtendedFrame& frame = art.frame;
    const QuadraticForm& form = frame.form();
    const CartanBasis& basis = frame.basis();
    const int n = form.n();
    const double h = g.max_spacing();
    const double fd = tol.fd_constant * h * h;
    const bool semisimple = basis.variant() == BasisVariant::semisimple;

    Report report;
    report.grid_points = g.size();
    report.mask_budget = cfg.mask_budget;
    Recorder rec(report);

    const std::vector<std::size_t> samples = sample_points(g);
    const FrameEvaluator eval = evaluator(frame);
    {
        RVec step(n);
        for (int a = 0; a < n; ++a) {
            step(a) = g.spacing(a);
        }
        double group = 0.0;
        double reality = 0.0;
        double lax = 0.0;
        std::size_t skipped = 0;
        for (std::size_t k : samples) {
            const RVec x = g.point(k);
            for (const Complex& l : cfg.lambdas) {
                try {
                    group = std::max(group, group_residual(eval(x, l), form));
                    reality = std::max(reality, reality_residual(eval, x, l, form));
                    const std::vector<CMat> numeric = log_derivative(eval, x, l, step);
                    const std::vector<CMat> exact = frame.lax(x, l);
                    for (int i = 0; i < n; ++i) {
                        lax = std::max(lax, max_abs(CMat(numeric[i] - exact[i])));
                    }
                } catch (const Error&) {
                    ++skipped;
                }
            }
        }
        rec.le("frame.group", "Phi^T I Phi = I", group, tol.frame, skipped);
        rec.le("frame.reality", "conj Phi(l) = Phi(conj l), rho Phi(l) rho = Phi(-l)", reality, tol.frame, skipped);
        rec.le("frame.lax", "Phi^-1 d_i Phi = l a_i + [a_i, Xi]", lax, fd, skipped);
    }

    const SolutionGrid closed = dressed_solution(frame, g, exec);
    {
        const SolutionGrid tested = with_noise(closed, cfg.inject_noise, cfg.seed);
        const FieldResidual uk = uk_residual(tested, exec);
        rec.le("uk.residual", "[a_i, d_j Xi] - [a_j, d_i Xi] - [[a_i, Xi], [a_j, Xi]] = 0", uk.max, fd, uk.skipped);
        if (uk.evaluated == 0) {
            report.records.back().pass = false;
        }
    }
    if (!frame.chain().empty()) {
        const SolutionGrid numeric = extracted_solution(frame, g, exec);
        double worst = 0.0;
        std::size_t masked = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!g.interior(k)) {
                continue;
            }
            if (closed.mask.masked(k) || numeric.mask.masked(k)) {
                ++masked;
                continue;
            }
            worst = std::max(worst, max_abs(RMat(closed.values[k] - numeric.values[k])));
        }
        rec.le("uk.extraction", "projector formula Xi = log-derivative Xi at l = 0", worst, fd, masked);
    }

    const ImmersionGrid& im = art.immersion;
    rec.measure("lift.null", "(F, F) = 0", null_lift_residual(im), tol.pointwise);
    rec.measure("lift.sphere", "(f, f) = 1, (f, t_0) = 0", sphere_residual(im), tol.pointwise);
    rec.measure("lift.gram", "Phi_1^T I Phi_1 = I", frame_gram_residual(im), tol.frame);

    const std::vector<std::vector<RVec>> fd_normals = fd_curvature_normals(im);
    if (semisimple) {
        const CurvatureReport cr = curvature_identities(im, fd_normals);
        rec.measure("curvature.routes", "frame normals = pi_N(d_i e_i) / (d_i F, e_i)", cr.route_agreement, fd);
        rec.measure("curvature.orthogonality", "(v_i, v_j) = 0, i != j", cr.orthogonality, fd);
        rec.measure("curvature.reconstruction", "F = -sum v_j / (v_j, v_j)", cr.reconstruction, fd);
        rec.le("curvature.signature", "signs of (v_i, v_i) are (+, ..., +, -)",
               static_cast<double>(cr.sign_pattern_failures), 0.0);
    }
    rec.measure("metric.flatness", "Riemann tensor of sum h_i^2 dx_i^2 vanishes",
                metric_flatness_residual(im.h, g, &im.mask), fd);

    if (semisimple) {
        rec.measure("first_form.squared", "|d_i F|^2 = q_i^2", first_form_residual(im, 2), fd);
        const Measure linear = first_form_residual(im, 1);
        rec.info("first_form.linear", "|d_i F|^2 = |q_i|", linear.max, fd, linear.skipped);

        const std::vector<RMat> xm = xi_from_metric(im.h, g, &im.mask);
        Measure oracle;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!g.interior(k) || im.mask.masked(k) || im.mask.stencil_masked(k, g) || closed.mask.masked(k)) {
                ++oracle.skipped;
                continue;
            }
            bool finite = xm[k].allFinite();
            if (!finite) {
                ++oracle.skipped;
                continue;
            }
            const RMat xi_frame = metric_gauge(xm[k], im.q[k], form);
            oracle.add(max_abs(RMat(xi_frame - extract_xi(closed.values[k], n))));
        }
        rec.measure("metric.xi_oracle", "xi_ij = d_j h_i / h_j, gauged to the frame", oracle, fd);
        rec.measure("sphere.normals", "v^S_i = -e^u pi_N v_i", sphere_normal_residual(im), fd);
        rec.measure("sphere.directions", "-e_i + e^-u (e_i, t_0) F parallel to d_i f", sphere_direction_residual(im),
                    fd);
    } else {
        const ChannelReport ch = channel_checks(im, fd_normals);
        rec.measure("channel.isotropy_frame", "(v, v) = 0 for the repeated normal from the frame", ch.isotropy_frame,
                    tol.frame);
        rec.measure("channel.isotropy_fd", "(v_j, v_j) = 0 for finite-difference normals", ch.isotropy_fd, fd);
        rec.measure("channel.repeated_fd", "v_j equal along the repeated block", ch.repeated_fd, fd);
        rec.measure("channel.orthogonality", "(v, v_i) = 0 against rank-one normals", ch.orthogonality, fd);
        rec.measure("channel.leaf_sphere", "d_j (f + v^R / (v^R, v^R)) = 0 along the repeated block", ch.leaf_sphere,
                    fd);
        rec.measure("channel.first_form", "|d_j F|^2 = q_j^2, (q_{n-1} - q_n)^2 on the repeated block",
                    ch.first_form, fd);
    }

    for (std::size_t e = 0; e < frame.chain().size(); ++e) {
        const ExtendedFrame before = frame.prefix(e);
        const ExtendedFrame after = frame.prefix(e + 1);
        const SimpleElement& element = frame.chain()[e];
        RibaucourChecks worst;
        worst.kind_matches = true;
        double closed_form = 0.0;
        std::size_t skipped = 0;
        std::size_t evaluated = 0;
        for (std::size_t k : samples) {
            const RVec x = g.point(k);
            try {
                const LiftPoint lift = flat_lift(before, x, cfg.c);
                const TransportedLine tl = transport_line(before, element, x);
                const DressedImmersion target = dressed_immersion(lift.phi1, lift.q, element.alpha(), tl, form);
                const RibaucourData data = ribaucour_data(lift.phi1, lift.q, target, tl, form);
                const RibaucourChecks c =
                    check_ribaucour(lift.phi1, lift.q, lift.F, target, data, tl, element.alpha(), form);
                // the dressed frame carries the constant left factor p_v(l); its lift with c matches the
                // closed form for c' = k^-1 c, k the lower block of p_v(0), moved by p_v(1)
                const CMat left0 = element.evaluate(0.0);
                const CMat left1 = element.evaluate(1.0);
                const RVec shifted = left0.real().bottomRightCorner(n, n).partialPivLu().solve(cfg.c);
                const LiftPoint moved = flat_lift(before, x, shifted);
                const DressedImmersion closed_target =
                    dressed_immersion(moved.phi1, moved.q, element.alpha(), transport_line(before, element, x), form);
                const LiftPoint next = flat_lift(after, x, cfg.c);
                closed_form = std::max(closed_form, (next.F - left1.real() * closed_target.F).cwiseAbs().maxCoeff());
                worst.imag = std::max({worst.imag, max_imag(left0), max_imag(left1), closed_target.imag});
                worst.envelope = std::max(worst.envelope, c.envelope);
                worst.radius = std::max(worst.radius, c.radius);
                worst.collinearity = std::max(worst.collinearity, c.collinearity);
                worst.cone = std::max(worst.cone, c.cone);
                worst.imag = std::max(worst.imag, c.imag);
                worst.kind_matches = worst.kind_matches && c.kind_matches;
                ++evaluated;
            } catch (const Error&) {
                ++skipped;
            }
        }
        const std::string p = "ribaucour[" + std::to_string(e) + "].";
        const bool any = evaluated > 0;
        rec.le(p + "closed_form", "lift of the dressed frame = p_v(1) F~ for c' = k^-1 c", closed_form, tol.ribaucour, skipped);
        rec.le(p + "envelope", "F + xi = F~ + xi~", worst.envelope, tol.ribaucour, skipped);
        rec.le(p + "radius", "(xi, xi) = (xi~, xi~)", worst.radius, tol.ribaucour, skipped);
        rec.le(p + "collinearity", "F~ - F parallel to e~_i - e_i", worst.collinearity, tol.ribaucour, skipped);
        rec.le(p + "cone", "(c, c) = +r^2 for hyperbolas, -r^2 for spheres", worst.cone, tol.ribaucour, skipped);
        rec.le(p + "kind", std::string("congruence kind is ") +
                               (element.kind() == AlphaKind::real ? "hyperbola" : "sphere"),
               worst.kind_matches ? 0.0 : 1.0, 0.0, skipped);
        rec.le(p + "imag", "imaginary parts of real outputs vanish", worst.imag, tol.pointwise, skipped);
        if (!any) {
            for (std::size_t r = report.records.size() - 7; r < report.records.size(); ++r) {
                report.records[r].pass = false;
            }
        }
    }

    if (frame.chain().size() >= 2) {
        const SimpleElement& a = frame.chain()[0];
        const SimpleElement& b = frame.chain()[1];
        rec.le("permutability", "p_A'(l) p_B(l) = p_B'(l) p_A(l)",
               permutability_residual(a, b, permutability_samples(a, b), form), tol.permutability);
        const auto [first, second] = bianchi_chains(a, b, form);
        ExtendedFrame one = frame.prefix(0);
        ExtendedFrame two = frame.prefix(0);
        for (const SimpleElement& s : first) {
            one = one.dressed(s);
        }
        for (const SimpleElement& s : second) {
            two = two.dressed(s);
        }
        std::size_t masked = 0;
        const double diff =
            max_diff(lift_field(one, g, cfg.c, exec), lift_field(two, g, cfg.c, exec), masked);
        rec.le("bianchi", "fourth immersion independent of the dressing order", diff, tol.bianchi, masked);
    }

    if (cfg.b) {
        const ImmersionGrid other = build_immersion(frame, g, *cfg.b, exec);
        const CombescureReport cb = combescure_compare(im, other);
        rec.measure("combescure.parallelism", "d_i F_b - (d_i F_b . t) t = 0, t the unit d_i F_c", cb.parallelism, fd);
        rec.info("combescure.sine", "sine of the angle between d_i F_c and d_i F_b", cb.sine.max, fd,
                 cb.sine.skipped);
        rec.info("combescure.christoffel", "points where prod q^c and prod q^b differ in sign",
                 static_cast<double>(cb.flagged), 0.0);
    }

    PointMask all = im.mask;
    all.merge(closed.mask);
    report.masked_points = all.count();
    const double fraction = static_cast<double>(report.masked_points) / static_cast<double>(g.size());
    rec.le("mask.budget", "fraction of masked grid points", fraction, cfg.mask_budget, report.masked_points);
    return report;
}

OutputFiles output_paths(const PipelineConfig& config, const std::string& dir)
{
    const std::filesystem::path d(dir);
    return {(d / config.csv_file).string(), (d / "normals.csv").string(), (d / config.report_file).string(),
            (d / config.obj.file).string()};
}

void write_build_outputs(const Artifacts& artifacts, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    const OutputFiles files = output_paths(artifacts.config, dir);
    write_file(files.csv, format_csv(immersion_table(artifacts.immersion)));
    write_file(files.normals, format_csv(normals_table(artifacts.immersion)));
}

std::string run_export(const PipelineConfig& config, const std::string& dir)
{
    const OutputFiles files = output_paths(config, dir);
    if (!std::filesystem::exists(files.csv)) {
        throw ConfigError("export: no built artifacts at '" + files.csv + "'; run build first");
    }
    const CsvTable table = parse_csv(read_file(files.csv));
    const GridGeometry geometry = config_geometry(config);
    if (table.header != immersion_header(config.n) || table.rows() != geometry.size()) {
        throw ConfigError("export: '" + files.csv + "' does not match the configured grid");
    }
    if (config.n != 3 || !config.obj.enabled) {
        return {};
    }
    const ObjMesh mesh = obj_slice(table, geometry, config.obj.slice_index, config.obj.coordinates);
    write_file(files.obj, format_obj(mesh));
    return files.obj;
}

} // namespace cflat
