// SPDX-License-Identifier: Apache-2.0
#include "enclosure/config.hpp"

#include "enclosure/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace enclosure {
namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view text, const std::string& key)
{
    text = trim(text);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(x))
        throw Error(ErrorCode::validation_error,
                    key + ": expected a finite number, got '" + std::string(text) + "'");
    return x;
}

int parse_int(std::string_view text, const std::string& key)
{
    text = trim(text);
    int x = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw Error(ErrorCode::validation_error,
                    key + ": expected an integer, got '" + std::string(text) + "'");
    return x;
}

std::vector<double> parse_list(std::string_view text, const std::string& key)
{
    std::vector<double> out;
    text = trim(text);
    if (text.empty())
        return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(parse_double(text.substr(start, comma - start), key));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

Vec3 parse_vec3(std::string_view text, const std::string& key)
{
    const auto v = parse_list(text, key);
    if (v.size() != 3)
        throw Error(ErrorCode::validation_error, key + ": expected three comma-separated numbers");
    return Vec3(v[0], v[1], v[2]);
}

std::string format_vec3(const Vec3& v)
{
    return format_number(v.x()) + ", " + format_number(v.y()) + ", " + format_number(v.z());
}

struct Field {
    const char* key;
    std::function<void(ExperimentConfig&, std::string_view, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

// Accessor pairs for each value type.
template <class Member>
Field number(const char* key, Member member)
{
    return {key,
            [member](ExperimentConfig& c, std::string_view v, const std::string& k) {
                member(c) = parse_double(v, k);
            },
            [member](const ExperimentConfig& c) {
                return format_number(member(c));
            }};
}

template <class Member>
Field integer(const char* key, Member member)
{
    return {key,
            [member](ExperimentConfig& c, std::string_view v, const std::string& k) {
                member(c) = parse_int(v, k);
            },
            [member](const ExperimentConfig& c) {
                return std::to_string(member(c));
            }};
}

template <class Member>
Field vector3(const char* key, Member member)
{
    return {key,
            [member](ExperimentConfig& c, std::string_view v, const std::string& k) {
                member(c) = parse_vec3(v, k);
            },
            [member](const ExperimentConfig& c) {
                return format_vec3(member(c));
            }};
}

const std::vector<Field>& fields()
{
    using C = ExperimentConfig;
    static const std::vector<Field> table = {
        vector3("scene.domain.center", [](auto& c) -> auto& { return c.scene.domain.center; }),
        number("scene.domain.radius", [](auto& c) -> auto& { return c.scene.domain.radius; }),
        vector3("scene.obstacle.center", [](auto& c) -> auto& { return c.scene.obstacle.center; }),
        number("scene.obstacle.radius", [](auto& c) -> auto& { return c.scene.obstacle.radius; }),
        number("scene.rho", [](auto& c) -> auto& { return c.scene.medium.rho; }),
        number("scene.mu", [](auto& c) -> auto& { return c.scene.medium.mu; }),
        number("scene.horizon", [](auto& c) -> auto& { return c.scene.horizon; }),
        {"probe.kind",
         [](C& c, std::string_view v, const std::string& k) {
             v = trim(v);
             if (v == "ext")
                 c.probe.kind = ProbeKind::exterior;
             else if (v == "int")
                 c.probe.kind = ProbeKind::interior;
             else
                 throw Error(ErrorCode::validation_error, k + ": expected 'ext' or 'int'");
         },
         [](const C& c) { return std::string(c.probe.kind == ProbeKind::exterior ? "ext" : "int"); }},
        vector3("probe.center", [](auto& c) -> auto& { return c.probe.center; }),
        number("probe.eta", [](auto& c) -> auto& { return c.probe.eta; }),
        number("probe.r1", [](auto& c) -> auto& { return c.probe.r1; }),
        number("probe.r2", [](auto& c) -> auto& { return c.probe.r2; }),
        integer("probe.m", [](auto& c) -> auto& { return c.probe.m; }),
        vector3("probe.direction", [](auto& c) -> auto& { return c.probe.direction; }),
        integer("solver.inner_sources", [](auto& c) -> auto& { return c.indicator.mfs.inner_sources; }),
        integer("solver.outer_sources", [](auto& c) -> auto& { return c.indicator.mfs.outer_sources; }),
        number("solver.alpha", [](auto& c) -> auto& { return c.indicator.mfs.alpha; }),
        number("solver.beta", [](auto& c) -> auto& { return c.indicator.mfs.beta; }),
        number("solver.truncation", [](auto& c) -> auto& { return c.indicator.mfs.truncation; }),
        number("solver.collocation_ratio",
               [](auto& c) -> auto& { return c.indicator.mfs.collocation_ratio; }),
        integer("solver.quadrature.radial", [](auto& c) -> auto& { return c.indicator.quadrature.radial; }),
        number("solver.quadrature.panel_ratio",
               [](auto& c) -> auto& { return c.indicator.quadrature.panel_ratio; }),
        number("solver.quadrature.layer_width",
               [](auto& c) -> auto& { return c.indicator.quadrature.layer_width; }),
        integer("solver.quadrature.polar", [](auto& c) -> auto& { return c.indicator.quadrature.polar; }),
        integer("solver.quadrature.azimuthal",
                [](auto& c) -> auto& { return c.indicator.quadrature.azimuthal; }),
        integer("solver.quadrature.surface_polar",
                [](auto& c) -> auto& { return c.indicator.quadrature.surface_polar; }),
        integer("solver.quadrature.surface_azimuthal",
                [](auto& c) -> auto& { return c.indicator.quadrature.surface_azimuthal; }),
        number("sweep.tau_min", [](auto& c) -> auto& { return c.grid.tau_min; }),
        number("sweep.tau_max", [](auto& c) -> auto& { return c.grid.tau_max; }),
        integer("sweep.count", [](auto& c) -> auto& { return c.grid.count; }),
        number("sweep.tail_fraction", [](auto& c) -> auto& { return c.extraction.tail_fraction; }),
        number("sweep.slope_tolerance",
               [](auto& c) -> auto& { return c.extraction.slope_tolerance; }),
        number("sweep.cancellation_cap",
               [](auto& c) -> auto& { return c.indicator.cancellation_cap; }),
        number("sweep.remainder_constant",
               [](auto& c) -> auto& { return c.indicator.remainder_constant; }),
        {"sweep.thresholds",
         [](C& c, std::string_view v, const std::string& k) { c.thresholds = parse_list(v, k); },
         [](const C& c) {
             std::string s;
             for (std::size_t i = 0; i < c.thresholds.size(); ++i)
                 s += (i ? ", " : "") + format_number(c.thresholds[i]);
             return s;
         }},
        {"output.dir",
         [](C& c, std::string_view v, const std::string& k) {
             c.output_dir = std::string(trim(v));
             if (c.output_dir.empty())
                 throw Error(ErrorCode::validation_error, k + ": must not be empty");
         },
         [](const C& c) { return c.output_dir; }},
        integer("output.verbosity", [](auto& c) -> auto& { return c.verbosity; }),
    };
    return table;
}

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok)
        throw Error(ErrorCode::validation_error, key + ": " + what);
}

} // namespace

std::string format_number(double x)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

ExperimentConfig parse_config(std::string_view text)
{
    std::map<std::string, const Field*, std::less<>> by_key;
    for (const Field& f : fields())
        by_key[f.key] = &f;
    ExperimentConfig config;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::parse_error,
                        "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": empty key");
        if (const auto it = seen.find(key); it != seen.end())
            throw Error(ErrorCode::parse_error, "duplicate key '" + key + "' on lines " +
                                                    std::to_string(it->second) + " and " +
                                                    std::to_string(line_no));
        seen[key] = line_no;
        const auto f = by_key.find(key);
        if (f == by_key.end())
            throw Error(ErrorCode::validation_error,
                        key + ": unknown key (line " + std::to_string(line_no) + ")");
        f->second->set(config, value, key);
    }
    validate_config(config);
    return config;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io_error, "cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& config)
{
    std::string out;
    for (const Field& f : fields())
        out += std::string(f.key) + " = " + f.get(config) + "\n";
    return out;
}

void validate_config(const ExperimentConfig& c)
{
    require(c.scene.domain.radius > 0.0, "scene.domain.radius", "must be positive");
    require(c.scene.obstacle.radius > 0.0, "scene.obstacle.radius", "must be positive");
    require(c.scene.medium.rho > 0.0, "scene.rho", "must be positive");
    require(c.scene.medium.mu > 0.0, "scene.mu", "must be positive");
    require(c.scene.horizon > 0.0, "scene.horizon", "must be positive");
    require((c.scene.obstacle.center - c.scene.domain.center).norm() + c.scene.obstacle.radius <
                c.scene.domain.radius,
            "scene.obstacle", "closure of the obstacle must lie inside the domain");
    require(c.probe.m >= 4, "probe.m", "must be >= 4");
    require(std::abs(c.probe.direction.norm() - 1.0) <= 1e-12, "probe.direction",
            "must be a unit vector");
    if (c.probe.kind == ProbeKind::exterior)
        require(c.probe.eta > 0.0, "probe.eta", "must be positive");
    else
        require(c.probe.r1 > 0.0 && c.probe.r2 > c.probe.r1, "probe.r1", "need 0 < r1 < r2");
    try {
        validate_probe(c.probe, c.scene);
        dist_D_K(c.scene, c.probe);
    } catch (const Error& e) {
        throw Error(ErrorCode::validation_error, std::string("probe: ") + e.what());
    }
    const MfsOptions& m = c.indicator.mfs;
    require(m.inner_sources >= 20, "solver.inner_sources", "must be >= 20");
    require(m.outer_sources >= 20, "solver.outer_sources", "must be >= 20");
    require(m.alpha > 0.0 && m.alpha < 1.0, "solver.alpha", "must lie in (0, 1)");
    require(m.beta > 1.0, "solver.beta", "must exceed 1");
    require(m.truncation > 0.0 && m.truncation < 1.0, "solver.truncation", "must lie in (0, 1)");
    require(m.collocation_ratio >= 1.0, "solver.collocation_ratio", "must be >= 1");
    const QuadratureOptions& q = c.indicator.quadrature;
    require(q.radial >= 1, "solver.quadrature.radial", "must be positive");
    require(q.panel_ratio >= 1.0, "solver.quadrature.panel_ratio", "must be >= 1");
    require(q.layer_width > 0.0, "solver.quadrature.layer_width", "must be positive");
    require(q.polar >= 1, "solver.quadrature.polar", "must be positive");
    require(q.azimuthal >= 1, "solver.quadrature.azimuthal", "must be positive");
    require(q.surface_polar * q.surface_azimuthal >= 50, "solver.quadrature.surface_polar",
            "surface rule needs at least 50 nodes");
    require(c.grid.tau_min > 0.0, "sweep.tau_min", "must be positive");
    require(c.grid.tau_max > c.grid.tau_min, "sweep.tau_max", "must exceed sweep.tau_min");
    require(c.grid.count >= 8, "sweep.count", "must be >= 8");
    require(c.extraction.tail_fraction > 0.0 && c.extraction.tail_fraction <= 1.0,
            "sweep.tail_fraction", "must lie in (0, 1]");
    require(std::ceil(c.extraction.tail_fraction * c.grid.count - 1e-9) >= 3, "sweep.tail_fraction",
            "tail must hold at least three points");
    require(c.extraction.slope_tolerance > 0.0, "sweep.slope_tolerance", "must be positive");
    require(c.indicator.cancellation_cap > 0.0, "sweep.cancellation_cap", "must be positive");
    require(c.indicator.remainder_constant > 0.0, "sweep.remainder_constant", "must be positive");
    for (double t : c.thresholds)
        require(t > 0.0, "sweep.thresholds", "must be positive");
    require(c.verbosity >= 0, "output.verbosity", "must be >= 0");
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b)
{
    // the dump is lossless, so equal dumps mean equal fields
    return dump_config(a) == dump_config(b);
}

} // namespace enclosure
