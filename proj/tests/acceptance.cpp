// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion. Criteria 6-8 share one
// tau sweep over four probes (two kinds, two directions).
#include "enclosure/error.hpp"
#include "enclosure/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace enclosure;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
const Medium unit{1.0, 1.0};

Scene reference_scene()
{
    return {{Vec3::Zero(), 1.0}, {Vec3(0.3, 0.0, 0.0), 0.2}, unit, 10.0};
}

const Vec3 a_main = Vec3::UnitZ();
const Vec3 a_rotated = Vec3(1.0, 1.0, 1.0).normalized();

ProbeSpec ext_probe(const Vec3& a = a_main)
{
    return ProbeSpec::exterior(Vec3(2.0, 0.0, 0.0), 0.5, 4, a);
}

ProbeSpec int_probe(const Vec3& a = a_main)
{
    return ProbeSpec::interior(Vec3::Zero(), 1.5, 2.0, 4, a);
}

class Clock {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int failures = 0;

void report(int id, bool pass, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

Vec3 random_unit(std::mt19937& rng)
{
    std::normal_distribution<double> n;
    return Vec3(n(rng), n(rng), n(rng)).normalized();
}

void criterion_1()
{
    Clock clock;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int points = 0;
    for (const ProbeSpec& p : {ext_probe(Vec3(0, 0.6, 0.8)), int_probe(Vec3(0, 0.6, 0.8))})
        for (double tt : {1.0, 5.0, 20.0}) {
            const SpectralParam s = SpectralParam::make(tt * tt, unit);
            for (int i = 0; i < 20; ++i) {
                const double r = p.kind == ProbeKind::exterior ? p.eta + 0.25 + 1.25 * u(rng)
                                                               : 0.05 + (p.r1 - 0.3) * u(rng);
                const Vec3 x = p.center + r * random_unit(rng);
                const Vec3 oracle = probe_field_oracle(p, s, x).potential;
                worst = std::max(worst, (probe_potential(p, s, x) - oracle).norm() / oracle.norm());
                ++points;
            }
        }
    const double t = clock.seconds();
    report(1, worst <= 1e-6 && t <= 120.0,
           "closed form vs quadrature oracle: max relative deviation " + fmt("%.2e", worst) +
               " over " + std::to_string(points) + " points (<= 1e-6), " + fmt("%.1f", t) + " s");
}

void criterion_2()
{
    // ladder x = tau_tilde * eta (ext) or tau_tilde * R1 (int), doubling from the threshold
    bool pass = true;
    std::string detail;
    for (const ProbeSpec& p : {ext_probe(), int_probe()}) {
        const bool ext = p.kind == ProbeKind::exterior;
        const double length = ext ? p.eta : p.r1;
        const double x0 = ext ? 50.0 : 75.0;
        std::vector<double> gap;
        double worst = 0.0;
        for (double x = x0; x <= 64.0 * x0; x *= 2.0) {
            const SpectralParam s = SpectralParam::make(std::pow(x / length, 2), unit);
            const double ratio = std::exp(radial_coefficient(p, s).log_abs -
                                          radial_coefficient_asymptotic(p, s).log_abs);
            gap.push_back(std::abs(ratio - 1.0));
            worst = std::max(worst, gap.back());
        }
        const std::size_t n = gap.size();
        const bool monotone = gap[n - 1] < gap[n - 2] && gap[n - 2] < gap[n - 3];
        pass = pass && worst <= 0.01 && monotone;
        detail += std::string(ext ? "ext" : "int") + ": |ratio-1| = " + fmt("%.3g", gap.front()) +
                  " at x=" + fmt("%g", x0) + ", " + fmt("%.3g", gap.back()) + " at x=" +
                  fmt("%g", 64 * x0) + ", monotone " + (monotone ? "yes" : "no") + "; ";
    }
    report(2, pass, "coefficient/asymptotic ratio within 1% for all ladder points: " + detail);
}

void criterion_3()
{
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.3, 1.5);
    const double h = 1e-4;
    double worst = 0.0, worst_div = 0.0, worst_stokes = 0.0;
    for (double lambda : {1.0, 5.0, 20.0}) {
        const Brinkmanlet b{Vec3(0.1, -0.2, 0.3), Vec3(0.3, -0.5, 0.8), lambda, 1.0};
        const auto vel = [&](const Vec3& x) -> Vec3 { return brinkmanlet_eval(b, x).velocity; };
        const auto pre = [&](const Vec3& x) { return brinkmanlet_eval(b, x).pressure; };
        for (int n = 0; n < 30; ++n) {
            const Vec3 x = b.source + u(rng) * random_unit(rng);
            Vec3 lap = Vec3::Zero(), gp;
            for (int k = 0; k < 3; ++k) {
                Vec3 e = Vec3::Zero();
                e[k] = h;
                lap += (-vel(x + 2 * e) + 16 * vel(x + e) - 30 * vel(x) + 16 * vel(x - e) -
                        vel(x - 2 * e)) /
                       (12 * h * h);
                gp[k] = (-pre(x + 2 * e) + 8 * pre(x + e) - 8 * pre(x - e) + pre(x - 2 * e)) /
                        (12 * h);
            }
            const FieldSample f = brinkmanlet_eval(b, x);
            const double tau_rho = lambda * lambda * b.mu;
            worst = std::max(worst, (b.mu * lap - gp - tau_rho * f.velocity).norm() /
                                        (tau_rho * f.velocity.norm()));
            worst_div = std::max(worst_div, std::abs(f.divergence()) / f.grad_velocity.norm());
        }
    }
    for (int n = 0; n < 30; ++n) {
        const Vec3 force = random_unit(rng);
        const Brinkmanlet b{Vec3::Zero(), force, 1e-6, 1.0};
        const Vec3 d = u(rng) * random_unit(rng);
        const double r = d.norm();
        const Vec3 xh = d / r;
        const Vec3 stokeslet = (force / r + xh * xh.dot(force) / r) / (8.0 * pi);
        worst_stokes = std::max(
            worst_stokes, (brinkmanlet_eval(b, d).velocity - stokeslet).norm() / stokeslet.norm());
    }
    report(3, worst <= 1e-5 && worst_div <= 1e-7 && worst_stokes <= 1e-4,
           "brinkmanlet PDE residual " + fmt("%.2e", worst) + " (<= 1e-5), divergence " +
               fmt("%.2e", worst_div) + " (<= 1e-7), Stokeslet limit " +
               fmt("%.2e", worst_stokes) + " (<= 1e-4)");
}

void criterion_4(const MfsOptions& defaults)
{
    const Scene scene = reference_scene();
    bool pass = true;
    std::string detail;
    double slowest = 0.0;
    for (double tau : {25.0, 100.0, 400.0}) {
        Clock clock;
        const SpectralParam s = SpectralParam::make(tau, unit);
        std::vector<double> ladder;
        for (int scale : {1, 2, 4}) {
            MfsOptions o = defaults;
            o.inner_sources = 150 * scale;
            o.outer_sources = 200 * scale;
            const MfsSystem system(scene, s, o);
            double r = 0.0;
            for (const ProbeSpec& p : {ext_probe(), int_probe()})
                r = std::max(r, system.solve(p).boundary_residual);
            ladder.push_back(r);
        }
        // halving is required until the residual reaches the truncation floor
        const double floor = 100.0 * defaults.truncation;
        bool halves = true;
        for (std::size_t k = 1; k < ladder.size(); ++k)
            halves = halves && (ladder[k - 1] <= floor || ladder[k] <= 0.5 * ladder[k - 1]);
        const bool ok = ladder[0] <= 1e-6 && halves;
        pass = pass && ok;
        slowest = std::max(slowest, clock.seconds());
        detail += "tau " + fmt("%g", tau) + ": " + fmt("%.2e", ladder[0]) + " -> " +
                  fmt("%.2e", ladder[1]) + " -> " + fmt("%.2e", ladder[2]) + (halves ? "" : " (no halving)") + "; ";
    }
    report(4, pass && slowest <= 60.0,
           "boundary residual with 150+200 sources (<= 1e-6), then 300+400, 600+800: " + detail +
               "slowest tau " + fmt("%.1f", slowest) + " s");
}

void criterion_5(const IndicatorOptions& options)
{
    Clock clock;
    const Scene scene = reference_scene();
    bool pass = true;
    std::string detail;
    for (const auto& [tau, tol] : {std::pair{25.0, 1e-3}, std::pair{100.0, 1e-2}}) {
        for (const IndicatorSample& s :
             sample_indicators(scene, {ext_probe(), int_probe()}, tau, options)) {
            const double rel =
                s.I_boundary ? std::abs(*s.I_boundary / s.I_interior.value() - 1.0) : INFINITY;
            pass = pass && rel <= tol;
            detail += fmt("%.2e", rel) + " ";
        }
        detail += "(tau " + fmt("%g", tau) + ", <= " + fmt("%g", tol) + "); ";
    }
    const double t = clock.seconds();
    report(5, pass && t <= 120.0,
           "|I_boundary - (J+E)|/(J+E) ext/int: " + detail + fmt("%.1f", t) + " s");
}

struct SharedSweep {
    std::vector<SweepResult> results; // ext a, int a, ext a', int a'
    double seconds = 0.0;
};

SharedSweep run_shared_sweep(const IndicatorOptions& options, bool verbose)
{
    SharedSweep out;
    Clock clock;
    SweepProgress progress;
    if (verbose)
        progress = [&](double tau, int i, int n) {
            std::fprintf(stderr, "  sweep tau %.4g (%d/%d) %.0f s\n", tau, i + 1, n,
                         clock.seconds());
        };
    out.results = sweep(reference_scene(),
                        {ext_probe(), int_probe(), ext_probe(a_rotated), int_probe(a_rotated)},
                        {50.0, 3200.0, 24}, options, progress);
    out.seconds = clock.seconds();
    return out;
}

void criterion_6(const SharedSweep& shared)
{
    bool pass = shared.seconds <= 1800.0;
    std::string detail;
    for (int k = 0; k < 2; ++k) {
        const SweepResult& r = shared.results[static_cast<std::size_t>(k)];
        const bool ext = k == 0;
        try {
            const ExtractionReport e = extract_distance(r, unit);
            const double target = ext ? 1.5 : 0.5;
            const double tol = ext ? 0.05 : 0.03;
            const bool ok = std::abs(e.dist_estimate - 1.0) <= 0.03 &&
                            std::abs(e.recovered - target) <= tol && r.failures.empty();
            pass = pass && ok;
            detail += std::string(ext ? "ext" : "int") + " dist " + fmt("%.4f", e.dist_estimate) +
                      " (two-point " + fmt("%.4f", e.two_point_estimate) + ", coefficient-normalized " +
                      fmt("%.4f", e.normalized_estimate) + ", kappa " +
                      fmt("%.2f", e.kappa_estimate) + "), " + (ext ? "d_D " : "R_D ") +
                      fmt("%.4f", e.recovered) + "; ";
        } catch (const Error& e) {
            pass = false;
            detail += std::string(ext ? "ext" : "int") + " failed: " + e.what() + "; ";
        }
    }
    report(6, pass, "distance recovery on tau in [50, 3200], 24 points: " + detail + "sweep " +
                        fmt("%.0f", shared.seconds) + " s (<= 1800 s)");
}

void criterion_7(const SharedSweep& shared)
{
    bool pass = true;
    std::string detail;
    for (int k = 0; k < 2; ++k) {
        const SweepResult& r = shared.results[static_cast<std::size_t>(k)];
        detail += k == 0 ? "ext:" : "int:";
        try {
            for (const auto& [T, expected] : {std::pair{2.2, Verdict::diverges},
                                              std::pair{1.8, Verdict::decays},
                                              std::pair{2.0, Verdict::critical}}) {
                const ClassifierResult c = classify_threshold(r, T, unit);
                bool ok = c.verdict == expected;
                if (expected == Verdict::critical)
                    ok = ok && c.envelope_bounded;
                pass = pass && ok;
                detail += " T*=" + fmt("%.1f", T) + " " + std::string(to_string(c.verdict)) +
                          " (slope " + fmt("%+.4f", c.limiting_slope) + ")";
                if (expected == Verdict::critical)
                    detail += c.envelope_bounded ? " envelope bounded" : " envelope unbounded";
            }
        } catch (const Error& e) {
            pass = false;
            detail += std::string(" failed: ") + e.what();
        }
        detail += "; ";
    }
    report(7, pass, "threshold classifier: " + detail);
}

std::string run_and_read(const ExperimentConfig& c, const fs::path& dir)
{
    fs::remove_all(dir);
    const RunOutcome r = run_experiment(c, dir.string());
    if (r.code != exit_success)
        throw Error(ErrorCode::solver_failed, "determinism run failed: " + r.message);
    std::string all;
    for (const char* name : {"sweep.csv", "report.txt"}) {
        std::ifstream in(dir / name, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        all += ss.str();
    }
    return all;
}

void criterion_8(const SharedSweep* shared, const IndicatorOptions& options)
{
    Clock clock;
    bool pass = true;
    std::string detail;

    if (shared) {
        for (int k = 0; k < 2; ++k) {
            try {
                const double d0 = extract_distance(shared->results[static_cast<std::size_t>(k)], unit)
                                      .dist_estimate;
                const double d1 =
                    extract_distance(shared->results[static_cast<std::size_t>(k + 2)], unit)
                        .dist_estimate;
                const double change = std::abs(d1 - d0) / d0;
                pass = pass && change < 5e-3;
                detail += std::string(k == 0 ? "ext" : "int") + " rotation change " +
                          fmt("%.2e", change) + "; ";
            } catch (const Error& e) {
                pass = false;
                detail += std::string("rotation failed: ") + e.what() + "; ";
            }
        }
    } else {
        pass = false;
        detail += "rotation not run; ";
    }

    const Scene scene = reference_scene();
    double worst_flux = 0.0;
    for (double tau : {25.0, 100.0, 400.0})
        for (const ProbeSpec& p : {ext_probe(), int_probe()}) {
            const SpectralParam s = SpectralParam::make(tau, unit);
            const SurfaceQuadrature q = boundary_quadrature(scene, p, options.quadrature);
            double scale = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i)
                scale += q.weights[i] * probe_field(p, s, q.nodes[i]).velocity.norm();
            worst_flux = std::max(worst_flux, std::abs(flux_compatibility(p, s, q)) / scale);
        }
    pass = pass && worst_flux <= 1e-8;
    detail += "flux " + fmt("%.2e", worst_flux) + " (<= 1e-8); ";

    // full pipeline twice on a reduced configuration, then two full-size samples twice
    ExperimentConfig c;
    c.indicator.mfs.inner_sources = 60;
    c.indicator.mfs.outer_sources = 80;
    c.grid = {10.0, 200.0, 8};
    c.thresholds = {1.8, 2.0, 2.2};
    c.verbosity = 0;
    const fs::path base = fs::temp_directory_path() / "enclosure_acceptance";
    bool identical = run_and_read(c, base / "a") == run_and_read(c, base / "b");
    for (double tau : {50.0, 3200.0}) {
        std::string csv[2];
        for (std::string& out : csv) {
            SweepResult r;
            r.samples = sample_indicators(scene, {ext_probe()}, tau, options);
            out = format_sweep_csv(r);
        }
        identical = identical && csv[0] == csv[1];
    }
    fs::remove_all(base);
    pass = pass && identical;
    const double t = clock.seconds();
    detail += std::string("determinism ") + (identical ? "byte-exact" : "DIFFERS") + "; " +
              fmt("%.0f", t) + " s (<= 300 s)";
    report(8, pass && t <= 300.0, "invariance: " + detail);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria 1-8"};
    std::vector<int> only;
    bool verbose = false;
    app.add_option("--only", only, "Run a subset of criteria")->check(CLI::Range(1, 8));
    app.add_flag("--verbose", verbose, "Print sweep progress to stderr");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8}
                                                : std::set<int>(only.begin(), only.end());
    const auto want = [&](int k) { return selected.count(k) > 0; };

    const IndicatorOptions options;
    try {
        if (want(1))
            criterion_1();
        if (want(2))
            criterion_2();
        if (want(3))
            criterion_3();
        if (want(4))
            criterion_4(options.mfs);
        if (want(5))
            criterion_5(options);
        std::optional<SharedSweep> shared;
        if (want(6) || want(7) || want(8))
            shared = run_shared_sweep(options, verbose);
        if (want(6))
            criterion_6(*shared);
        if (want(7))
            criterion_7(*shared);
        if (want(8))
            criterion_8(shared ? &*shared : nullptr, options);
    } catch (const Error& e) {
        std::printf("aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
