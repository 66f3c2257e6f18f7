#include "cflat/config.hpp"

#include "cflat/errors.hpp"
#include "cflat/frames.hpp"
#include "cflat/immersion.hpp"
#include "cflat/simple_element.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cflat {

using nlohmann::json;

namespace {

double parse_real(const std::string& s, const std::string& whole)
{
    if (s.empty() || s == "+") {
        return 1.0;
    }
    if (s == "-") {
        return -1.0;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + whole + "'");
    }
    if (used != s.size() || !std::isfinite(v)) {
        throw ConfigError("cannot parse number '" + whole + "'");
    }
    return v;
}

} // namespace

Complex parse_complex(const std::string& text)
{
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            s.push_back(ch);
        }
    }
    if (s.empty()) {
        throw ConfigError("empty complex number");
    }
    if (s.back() != 'i' && s.back() != 'j') {
        return {parse_real(s, text), 0.0};
    }
    s.pop_back();
    // split at the last sign that is not an exponent sign or the leading one
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) {
        return {0.0, parse_real(s, text)};
    }
    return {parse_real(s.substr(0, split), text), parse_real(s.substr(split), text)};
}

std::string format_complex(Complex z)
{
    char buf[64];
    if (z.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", z.real());
    } else if (z.real() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17gi", z.imag());
    } else {
        std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    }
    return buf;
}

namespace {

const std::set<std::string> kTopKeys = {"n",        "variant",  "p",       "box",           "steps",
                                        "seed",     "dressing", "c",       "b",             "lambdas",
                                        "tolerances", "screen", "mask_budget", "inject_noise", "outputs"};

Complex complex_value(const json& j, const std::string& key)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_string()) {
        return parse_complex(j.get<std::string>());
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(key + ": expected a number, a string like \"0.7i\", or a [re, im] pair");
}

std::string complex_text(const json& j)
{
    return j.is_string() ? j.get<std::string>() : j.dump();
}

RVec real_vector(const json& j, const std::string& key, int size)
{
    if (!j.is_array() || static_cast<int>(j.size()) != size) {
        throw ConfigError(key + ": expected an array of " + std::to_string(size) + " numbers");
    }
    RVec v(size);
    for (int i = 0; i < size; ++i) {
        if (!j[i].is_number()) {
            throw ConfigError(key + ": entry " + std::to_string(i) + " is not a number");
        }
        v(i) = j[i].get<double>();
    }
    return v;
}

template <typename T>
T number(const json& obj, const std::string& key, T fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& j = obj.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!j.is_boolean()) {
            throw ConfigError(key + ": expected true or false");
        }
    } else if (!j.is_number()) {
        throw ConfigError(key + ": expected a number");
    } else if constexpr (std::is_integral_v<T>) {
        if (!j.is_number_integer()) {
            throw ConfigError(key + ": expected an integer");
        }
        if constexpr (std::is_unsigned_v<T>) {
            if (j.get<long long>() < 0) {
                throw ConfigError(key + ": expected a nonnegative integer");
            }
        }
    }
    return j.get<T>();
}

std::string text(const json& obj, const std::string& key, const std::string& fallback)
{
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_string()) {
        throw ConfigError(key + ": expected a string");
    }
    return obj.at(key).get<std::string>();
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
        }
    }
}

} // namespace

PipelineConfig parse_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    check_keys(root, kTopKeys, "config");

    PipelineConfig cfg;
    cfg.n = number<int>(root, "n", 3);
    if (cfg.n < 3 || cfg.n > 6) {
        throw ConfigError("n: must lie in 3..6");
    }
    const std::string variant = text(root, "variant", "semisimple");
    if (variant == "semisimple") {
        cfg.variant = BasisVariant::semisimple;
    } else if (variant == "channel") {
        cfg.variant = BasisVariant::channel;
        cfg.p = number<int>(root, "p", 1);
        if (cfg.p < 1 || cfg.p > cfg.n - 2) {
            throw ConfigError("p: channel rank must satisfy 1 <= p <= n-2");
        }
    } else {
        throw ConfigError("variant: expected \"semisimple\" or \"channel\"");
    }

    const int n = cfg.n;
    cfg.lo.assign(n, -1.0);
    cfg.hi.assign(n, 1.0);
    if (root.contains("box")) {
        const json& box = root["box"];
        const auto interval = [&](const json& j, int axis) {
            if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
                throw ConfigError("box: expected [lo, hi] or a list of n such pairs");
            }
            cfg.lo[axis] = j[0].get<double>();
            cfg.hi[axis] = j[1].get<double>();
        };
        if (box.is_array() && box.size() == 2 && box[0].is_number()) {
            for (int a = 0; a < n; ++a) {
                interval(box, a);
            }
        } else if (box.is_array() && static_cast<int>(box.size()) == n) {
            for (int a = 0; a < n; ++a) {
                interval(box[a], a);
            }
        } else {
            throw ConfigError("box: expected [lo, hi] or a list of n such pairs");
        }
    }
    for (int a = 0; a < n; ++a) {
        if (!(cfg.hi[a] > cfg.lo[a])) {
            throw ConfigError("box: empty interval on axis " + std::to_string(a + 1));
        }
        if (cfg.lo[a] > 0.0 || cfg.hi[a] < 0.0) {
            throw ConfigError("box: the origin (frame normalisation point) must lie in the box");
        }
    }
    cfg.steps.assign(n, 21);
    if (root.contains("steps")) {
        const json& st = root["steps"];
        if (st.is_number_integer()) {
            cfg.steps.assign(n, st.get<int>());
        } else if (st.is_array() && static_cast<int>(st.size()) == n) {
            for (int a = 0; a < n; ++a) {
                if (!st[a].is_number_integer()) {
                    throw ConfigError("steps: expected integers");
                }
                cfg.steps[a] = st[a].get<int>();
            }
        } else {
            throw ConfigError("steps: expected an integer or a list of n integers");
        }
    }
    for (int s : cfg.steps) {
        if (s < 5) {
            throw ConfigError("steps: need at least 5 points per axis");
        }
    }

    cfg.seed = number<std::uint64_t>(root, "seed", 1);

    if (root.contains("dressing")) {
        const json& chain = root["dressing"];
        if (!chain.is_array()) {
            throw ConfigError("dressing: expected a list of {alpha, seed | line}");
        }
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const json& e = chain[k];
            const std::string where = "dressing[" + std::to_string(k) + "]";
            if (!e.is_object() || !e.contains("alpha")) {
                throw ConfigError(where + ": expected an object with an alpha");
            }
            check_keys(e, {"alpha", "seed", "line"}, where);
            DressingSpec spec;
            spec.alpha = complex_value(e["alpha"], where + ".alpha");
            spec.alpha_text = complex_text(e["alpha"]);
            try {
                classify_alpha(spec.alpha);
            } catch (const ArgumentError& err) {
                throw ConfigError(where + ".alpha: " + err.what());
            }
            if (std::abs(spec.alpha - 1.0) < 1e-12 || std::abs(spec.alpha + 1.0) < 1e-12) {
                throw ConfigError(where + ".alpha: alpha = +-1 is excluded by the dressed-immersion formulas");
            }
            spec.seed = number<std::uint64_t>(e, "seed", k);
            if (e.contains("line")) {
                const json& line = e["line"];
                if (!line.is_array() || static_cast<int>(line.size()) != 2 * n) {
                    throw ConfigError(where + ".line: expected " + std::to_string(2 * n) + " entries");
                }
                CVec v(2 * n);
                for (int i = 0; i < 2 * n; ++i) {
                    v(i) = complex_value(line[i], where + ".line");
                }
                spec.line = v;
            }
            cfg.dressing.push_back(spec);
        }
    }

    const QuadraticForm form(n);
    cfg.c = root.contains("c") ? real_vector(root["c"], "c", n) : default_null_vector(n);
    try {
        require_null(cfg.c, form);
    } catch (const ArgumentError& err) {
        throw ConfigError(std::string("c: ") + err.what());
    }
    if (root.contains("b")) {
        cfg.b = real_vector(root["b"], "b", n);
        try {
            require_null(*cfg.b, form);
        } catch (const ArgumentError& err) {
            throw ConfigError(std::string("b: ") + err.what());
        }
    }

    if (root.contains("lambdas")) {
        const json& ls = root["lambdas"];
        if (!ls.is_array() || ls.empty()) {
            throw ConfigError("lambdas: expected a nonempty list");
        }
        for (const json& l : ls) {
            cfg.lambdas.push_back(complex_value(l, "lambdas"));
        }
    } else {
        cfg.lambdas = default_lambda_samples();
    }

    if (root.contains("tolerances")) {
        const json& t = root["tolerances"];
        if (!t.is_object()) {
            throw ConfigError("tolerances: expected an object");
        }
        check_keys(t, {"fd_constant", "pointwise", "frame", "ribaucour", "permutability", "bianchi"}, "tolerances");
        Tolerances& tol = cfg.tolerances;
        tol.fd_constant = number<double>(t, "fd_constant", tol.fd_constant);
        tol.pointwise = number<double>(t, "pointwise", tol.pointwise);
        tol.frame = number<double>(t, "frame", tol.frame);
        tol.ribaucour = number<double>(t, "ribaucour", tol.ribaucour);
        tol.permutability = number<double>(t, "permutability", tol.permutability);
        tol.bianchi = number<double>(t, "bianchi", tol.bianchi);
        for (double v : {tol.fd_constant, tol.pointwise, tol.frame, tol.ribaucour, tol.permutability, tol.bianchi}) {
            if (!(v > 0.0)) {
                throw ConfigError("tolerances: all values must be positive");
            }
        }
    }
    if (root.contains("screen")) {
        const json& s = root["screen"];
        if (!s.is_object()) {
            throw ConfigError("screen: expected an object");
        }
        check_keys(s, {"enabled", "min_q", "max_potential", "attempts", "steps"}, "screen");
        cfg.screen.enabled = number<bool>(s, "enabled", cfg.screen.enabled);
        cfg.screen.min_q = number<double>(s, "min_q", cfg.screen.min_q);
        cfg.screen.max_potential = number<double>(s, "max_potential", cfg.screen.max_potential);
        cfg.screen.attempts = number<int>(s, "attempts", cfg.screen.attempts);
        cfg.screen.steps = number<int>(s, "steps", cfg.screen.steps);
        if (cfg.screen.attempts < 1 || cfg.screen.steps < 5) {
            throw ConfigError("screen: attempts must be >= 1 and steps >= 5");
        }
    }
    cfg.mask_budget = number<double>(root, "mask_budget", cfg.mask_budget);
    if (!(cfg.mask_budget >= 0.0 && cfg.mask_budget <= 1.0)) {
        throw ConfigError("mask_budget: must lie in [0, 1]");
    }
    cfg.inject_noise = number<double>(root, "inject_noise", 0.0);
    if (!(cfg.inject_noise >= 0.0)) {
        throw ConfigError("inject_noise: must be nonnegative");
    }

    if (root.contains("outputs")) {
        const json& o = root["outputs"];
        if (!o.is_object()) {
            throw ConfigError("outputs: expected an object");
        }
        check_keys(o, {"csv", "report", "obj"}, "outputs");
        cfg.csv_file = text(o, "csv", cfg.csv_file);
        cfg.report_file = text(o, "report", cfg.report_file);
        if (o.contains("obj")) {
            const json& ob = o["obj"];
            if (ob.is_boolean()) {
                cfg.obj.enabled = ob.get<bool>();
            } else if (ob.is_object()) {
                check_keys(ob, {"enabled", "file", "slice_index", "coordinates"}, "outputs.obj");
                cfg.obj.enabled = number<bool>(ob, "enabled", true);
                cfg.obj.file = text(ob, "file", cfg.obj.file);
                cfg.obj.slice_index = number<int>(ob, "slice_index", -1);
                if (ob.contains("coordinates")) {
                    const json& cs = ob["coordinates"];
                    if (!cs.is_array() || cs.size() != 3) {
                        throw ConfigError("outputs.obj.coordinates: expected three indices");
                    }
                    cfg.obj.coordinates.clear();
                    for (const json& c : cs) {
                        if (!c.is_number_integer() || c.get<int>() < 1 || c.get<int>() > 2 * n - 2) {
                            throw ConfigError("outputs.obj.coordinates: indices must lie in 1.." +
                                              std::to_string(2 * n - 2));
                        }
                        cfg.obj.coordinates.push_back(c.get<int>() - 1);
                    }
                }
            } else {
                throw ConfigError("outputs.obj: expected true/false or an object");
            }
        }
    }
    if (cfg.obj.slice_index >= cfg.steps[n - 1]) {
        throw ConfigError("outputs.obj.slice_index: beyond the last grid index");
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace cflat
