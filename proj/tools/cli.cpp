#include "cli.hpp"

#include "drainage/common.hpp"
#include "drainage/embedding.hpp"
#include "drainage/lattice.hpp"
#include "drainage/net_mc.hpp"
#include "drainage/pendulum.hpp"
#include "drainage/robin.hpp"
#include "drainage/svm_pde.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace drainage::cli {

namespace {

using nlohmann::ordered_json;

constexpr const char* kToolVersion = "1.0.0";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// String-valued options remembered in declaration order for the manifest.
struct Params {
    std::deque<std::string> text_store;
    std::deque<bool> flag_store;
    std::vector<std::pair<std::string, std::string*>> values;
    std::vector<std::pair<std::string, bool*>> flags;

    std::string& text(std::string initial = {}) { return text_store.emplace_back(std::move(initial)); }
    bool& toggle() { return flag_store.emplace_back(false); }

    void add(CLI::App* app, const std::string& name, std::string& target, const std::string& help,
             bool required = false) {
        auto* opt = app->add_option("--" + name, target, help);
        if (required) opt->required();
        else opt->capture_default_str();
        values.emplace_back(name, &target);
    }
    void flag(CLI::App* app, const std::string& name, bool& target, const std::string& help) {
        app->add_flag("--" + name, target, help);
        flags.emplace_back(name, &target);
    }
    ordered_json json() const {
        ordered_json j = ordered_json::object();
        for (const auto& [k, v] : values) j[k] = *v;
        for (const auto& [k, v] : flags) j[k] = *v;
        return j;
    }
};

double number(const std::string& name, const std::string& text) {
    try {
        return parse_double(text);
    } catch (const std::exception&) {
        throw UsageError("--" + name + ": '" + text + "' is not a number");
    }
}

std::size_t count(const std::string& name, const std::string& text) {
    const double v = number(name, text);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw UsageError("--" + name + ": expected a count, got " + text);
    return static_cast<std::size_t>(v);
}

std::vector<double> numbers(const std::string& name, const std::string& text) {
    try {
        return parse_range(text);
    } catch (const std::exception& e) {
        throw UsageError("--" + name + ": " + e.what());
    }
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

// Destination chosen by --out: "-" is the caller's stream, anything else a file
// that gets a sidecar manifest unless the manifest is embedded.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path) {
        if (to_stdout()) {
            stream_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
            stream_ = &file_;
        }
    }
    bool to_stdout() const { return path_ == "-"; }
    std::ostream& stream() { return *stream_; }
    const std::string& path() const { return path_; }

    void finish(const ordered_json& manifest, bool embedded) {
        stream_->flush();
        if (!*stream_) throw std::runtime_error("write failed for " + path_);
        if (to_stdout() || embedded) return;
        std::ofstream side(path_ + ".manifest.json", std::ios::binary);
        side << manifest.dump(2) << '\n';
        if (!side) throw std::runtime_error("cannot write manifest for " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

ordered_json manifest(const std::string& command, const Params& params, const std::vector<std::string>& outputs) {
    ordered_json m;
    m["tool"] = "drainage";
    m["version"] = kToolVersion;
    m["subcommand"] = command;
    m["parameters"] = params.json();
    m["outputs"] = outputs;
    return m;
}

ordered_json net_json(const NetResult& r) {
    ordered_json j;
    j["mean"] = r.mean;
    j["stderr"] = r.stderr_;
    j["walkers"] = r.walkers;
    j["censored"] = r.censored;
    j["theory"] = std::isnan(r.theory) ? ordered_json(nullptr) : ordered_json(r.theory);
    j["z_score"] = std::isnan(r.z_score) ? ordered_json(nullptr) : ordered_json(r.z_score);
    j["absorbed_fraction"] = r.absorbed_fraction;
    j["dt"] = r.dt;
    return j;
}

struct Command {
    CLI::App* app = nullptr;
    Params params;
    std::function<void(Command&)> action;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::string threads = "0";
};

// ---------------------------------------------------------------------------

void add_period(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("period", "Period T(E), action I(E) and turning points of the pendulum orbit");
    std::string& energies = c.params.text();
    std::string& out = c.params.text("-");
    bool& limit = c.params.toggle();
    c.params.add(c.app, "E", energies, "Energies: value, list a,b,c or range start:stop:step");
    c.params.flag(c.app, "limit", limit, "Also print the extrapolated E -> 0 limit of T");
    c.params.add(c.app, "out", out, "CSV output path or - for stdout");
    c.action = [&](Command& self) {
        if (energies.empty() && !limit) throw UsageError("period needs --E or --limit");
        const auto grid = energies.empty() ? std::vector<double>{} : numbers("E", energies);
        for (double e : grid)
            if (!(e > 0.0)) throw std::domain_error("period needs E > 0, got " + format_double(e));
        Output o(out, ctx.out);
        auto& s = o.stream();
        if (limit) {
            s << "limit,sqrt_pi_over_2\n" << format_double(period_limit()) << ',' << format_double(kBifurcationPeriod) << '\n';
        }
        if (!energies.empty()) {
            s << "E,T,I,f_min,f_max\n";
            for (double e : grid) {
                const auto tp = turning_points(e);
                s << format_double(e) << ',' << format_double(period(e)) << ',' << format_double(action(e)) << ','
                  << format_double(tp.f_min) << ',' << format_double(tp.f_max) << '\n';
            }
        }
        o.finish(manifest("period", self.params, {out}), false);
    };
}

void add_orbit(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("orbit", "Sample one cell of the periodic orbit with minimal period a/k");
    std::string& a = c.params.text();
    std::string& n = c.params.text("2048");
    std::string& k = c.params.text("1");
    std::string& out = c.params.text("-");
    c.params.add(c.app, "a", a, "Torus parameter (cell length)", true);
    c.params.add(c.app, "n", n, "Samples per cell");
    c.params.add(c.app, "k", k, "Oscillations per cell");
    c.params.add(c.app, "out", out, "CSV output path or - for stdout");
    c.action = [&](Command& self) {
        OrbitOptions opts;
        opts.oscillations = static_cast<int>(count("k", k));
        const Orbit orbit = solve_orbit(number("a", a), count("n", n), opts);
        Output o(out, ctx.out);
        write_orbit_csv(o.stream(), orbit);
        o.finish(manifest("orbit", self.params, {out}), false);
        ctx.err << "orbit: E=" << format_double(orbit.energy) << " drift=" << format_double(orbit.energy_drift)
                << " closure=" << format_double(orbit.closure_error) << '\n';
    };
}

void add_robin(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("robin", "Robin constants: flat torus, round sphere or Okikiolu torus");
    std::string& a = c.params.text();
    std::string& n = c.params.text("2048");
    std::string& k = c.params.text("1");
    std::string& out = c.params.text("-");
    bool& flat = c.params.toggle();
    bool& sphere = c.params.toggle();
    bool& curvature = c.params.toggle();
    c.params.add(c.app, "a", a, "Torus parameter");
    c.params.flag(c.app, "flat", flat, "Flat torus R^2/(aZ x a^-1 Z) by the Dedekind eta closed form");
    c.params.flag(c.app, "sphere", sphere, "Round sphere of unit area");
    c.params.add(c.app, "n", n, "Orbit samples (Okikiolu torus)");
    c.params.add(c.app, "k", k, "Oscillations per cell (Okikiolu torus)");
    c.params.flag(c.app, "curvature", curvature, "Include the sampled curvature profile");
    c.params.add(c.app, "out", out, "JSON output path or - for stdout");
    c.action = [&](Command& self) {
        if (flat && sphere) throw UsageError("--flat and --sphere are exclusive");
        ordered_json j;
        if (sphere) {
            j["surface"] = "sphere";
            j["method"] = "closed form -(1 + log pi)/(4 pi)";
            j["robin"] = robin_sphere();
        } else {
            if (a.empty()) throw UsageError("robin needs --a (or --sphere)");
            const double av = number("a", a);
            if (flat) {
                j["surface"] = "flat torus";
                j["a"] = av;
                j["method"] = "Dedekind eta closed form";
                j["robin"] = robin_flat(av);
            } else {
                RobinOptions opts;
                opts.n_samples = count("n", n);
                opts.oscillations = static_cast<int>(count("k", k));
                opts.with_curvature = curvature;
                const RobinReport r = robin_report(av, opts);
                j["surface"] = "okikiolu torus";
                j["a"] = r.a;
                j["k"] = opts.oscillations;
                j["method"] = "R0 by Dedekind eta; R1 - R0 by the action formula";
                j["E"] = r.energy;
                j["T"] = r.period;
                j["I"] = r.action;
                j["R0"] = r.r0;
                j["diff"] = {{"quadrature", r.diff.quadrature}, {"energy", r.diff.energy}, {"action", r.diff.action}};
                j["max_disagreement"] = r.diff.max_disagreement();
                j["R1"] = r.r1;
                j["R_sphere"] = robin_sphere();
                if (r.curvature) j["curvature"] = *r.curvature;
            }
        }
        j["manifest"] = manifest("robin", self.params, {out});
        Output o(out, ctx.out);
        o.stream() << j.dump(2) << '\n';
        o.finish(j["manifest"], true);
    };
}

void add_figure2(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("figure2", "Table of R0, R1 - R0 (three ways) and R1 over a grid of a");
    std::string& a = c.params.text();
    std::string& n = c.params.text("2048");
    std::string& k = c.params.text("1");
    std::string& out = c.params.text("-");
    c.params.add(c.app, "a", a, "Grid of a: list or start:stop:step", true);
    c.params.add(c.app, "n", n, "Orbit samples");
    c.params.add(c.app, "k", k, "Oscillations per cell");
    c.params.add(c.app, "out", out, "CSV output path or - for stdout");
    c.action = [&](Command& self) {
        RobinOptions opts;
        opts.n_samples = count("n", n);
        opts.oscillations = static_cast<int>(count("k", k));
        const auto grid = numbers("a", a);
        const auto reports = figure2_table(grid, opts, count("threads", ctx.threads));
        Output o(out, ctx.out);
        write_figure2_csv(o.stream(), reports);
        o.finish(manifest("figure2", self.params, {out}), false);
    };
}

void add_embed(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("embed", "Isometric embedding of the Okikiolu torus cell as a surface of revolution");
    std::string& a = c.params.text();
    std::string& k = c.params.text("1");
    std::string& n = c.params.text("256");
    std::string& angular = c.params.text("64");
    std::string& tiles = c.params.text("1");
    std::string& out = c.params.text();
    std::string& generator = c.params.text();
    c.params.add(c.app, "a", a, "Torus parameter", true);
    c.params.add(c.app, "k", k, "Oscillations per cell");
    c.params.add(c.app, "n", n, "Samples along the generator");
    c.params.add(c.app, "angular", angular, "Vertices per ring");
    c.params.add(c.app, "tiles", tiles, "Copies of the cell along the axis");
    c.params.add(c.app, "out", out, "OBJ output path or - for stdout", true);
    c.params.add(c.app, "generator", generator, "Optional CSV path for the generator curve x,X,F");
    c.action = [&](Command& self) {
        OrbitOptions opts;
        opts.oscillations = static_cast<int>(count("k", k));
        const double av = number("a", a);
        const std::size_t samples = count("n", n);
        const Orbit orbit = solve_orbit(av, samples, opts);
        const GeneratorCurve curve = generator_curve(orbit);
        const RevolutionMesh m = mesh(curve, count("angular", angular), count("tiles", tiles));
        std::vector<std::string> outputs = {out};
        if (!generator.empty()) outputs.push_back(generator);
        const auto man = manifest("embed", self.params, outputs);
        Output o(out, ctx.out);
        write_obj(o.stream(), m);
        o.finish(man, false);
        if (!generator.empty()) {
            Output g(generator, ctx.out);
            write_generator_csv(g.stream(), curve);
            g.finish(man, false);
        }
        // the isometry check needs a well-resolved orbit
        const Orbit fine = solve_orbit(av, std::max<std::size_t>(samples, 2048), opts);
        ctx.err << "embed: vertices=" << m.vertices.size() << " triangles=" << m.triangles.size()
                << " pullback=" << format_double(pullback_check(generator_curve(fine), fine))
                << " min_radicand=" << format_double(curve.min_radicand())
                << " radicand_bound=" << format_double(curve.radicand_bound) << '\n';
    };
}

void add_spectral(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("spectral", "Robin constant of a flat 2- or 3-torus by independent routes");
    std::string& a = c.params.text();
    std::string& sides = c.params.text();
    std::string& method = c.params.text("all");
    std::string& times = c.params.text("0.001,0.1,1,10");
    std::string& out = c.params.text("-");
    c.params.add(c.app, "a", a, "Rectangle R^2/(aZ x a^-1 Z)");
    c.params.add(c.app, "sides", sides, "Side lengths L1,L2[,L3]");
    c.params.add(c.app, "method", method, "all, green, time, zeta or eta");
    c.params.add(c.app, "t", times, "Times for the heat-kernel duality check");
    c.params.add(c.app, "out", out, "JSON output path or - for stdout");
    c.action = [&](Command& self) {
        if (a.empty() == sides.empty()) throw UsageError("spectral needs exactly one of --a and --sides");
        const FlatTorus torus = a.empty() ? FlatTorus(numbers("sides", sides)) : FlatTorus::rectangle(number("a", a));
        const bool rectangle = !a.empty() || (torus.dimension() == 2 &&
                                              std::abs(torus.sides()[0] * torus.sides()[1] - 1.0) < 1e-15);
        std::map<std::string, std::function<double()>> routes = {
            {"green", [&] { return robin_via_green_limit(torus); }},
            {"time", [&] { return robin_via_time_integral(torus); }},
            {"zeta", [&] { return robin_via_zeta(torus); }},
        };
        if (rectangle) routes["eta"] = [&] { return robin_flat(torus.sides()[0]); };
        if (method != "all" && !routes.count(method))
            throw UsageError("--method must be all, green, time, zeta" + std::string(rectangle ? " or eta" : ""));

        ordered_json j;
        j["n"] = torus.dimension();
        j["sides"] = std::vector<double>(torus.sides().begin(), torus.sides().end());
        j["method"] = method == "all" ? "zeta" : method;
        ordered_json checks;
        if (method == "all") {
            ordered_json values;
            double lo = INFINITY, hi = -INFINITY;
            for (const char* name : {"green", "time", "zeta", "eta"}) {
                if (!routes.count(name)) continue;
                const double v = routes[name]();
                values[name] = v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            j["robin"] = values["zeta"];
            checks["routes"] = values;
            checks["max_route_gap"] = hi - lo;
        } else {
            j["robin"] = routes[method]();
        }
        ordered_json heat = ordered_json::array();
        for (double t : numbers("t", times)) {
            const auto d = heat_diagnostics(torus, t);
            heat.push_back({{"t", t}, {"k_spectral", d.k_spectral}, {"k_images", d.k_images}, {"relative_gap", d.relative_gap()}});
        }
        checks["heat"] = heat;
        j["residual_checks"] = checks;
        j["manifest"] = manifest("spectral", self.params, {out});
        Output o(out, ctx.out);
        o.stream() << j.dump(2) << '\n';
        o.finish(j["manifest"], true);
    };
}

void add_pde(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("pde", "Solve Delta f = 8 pi - 8 pi e^f on the flat torus in 2D, or scan for the bifurcation");
    std::string& a = c.params.text();
    std::string& nx = c.params.text("64");
    std::string& ny = c.params.text("16");
    std::string& amplitude = c.params.text("0.3");
    std::string& tolerance = c.params.text("1e-10");
    std::string& scan = c.params.text();
    std::string& out = c.params.text("-");
    std::string& log = c.params.text();
    bool& no_deflate = c.params.toggle();
    bool& compare = c.params.toggle();
    c.params.add(c.app, "a", a, "Torus parameter");
    c.params.add(c.app, "nx", nx, "Grid points along x (even, >= 16)");
    c.params.add(c.app, "ny", ny, "Grid points along y (even, >= 16)");
    c.params.add(c.app, "amplitude", amplitude, "Amplitude of the cosine seed");
    c.params.add(c.app, "tolerance", tolerance, "Residual tolerance (max norm)");
    c.params.flag(c.app, "no-deflate", no_deflate, "Plain Newton: do not deflate the trivial solution");
    c.params.flag(c.app, "compare", compare, "Report the max deviation from the ODE orbit");
    c.params.add(c.app, "scan", scan, "Bifurcation scan over a grid of a (list or range)");
    c.params.add(c.app, "out", out, "CSV output path or - for stdout");
    c.params.add(c.app, "log", log, "Solver log path (default: standard error)");
    c.action = [&](Command& self) {
        if (a.empty() == scan.empty()) throw UsageError("pde needs exactly one of --a and --scan");
        if (!scan.empty()) {
            ScanOptions opts;
            opts.nx = count("nx", nx);
            opts.ny = count("ny", ny);
            opts.seed_amplitude = number("amplitude", amplitude);
            opts.threads = count("threads", ctx.threads);
            const auto grid = numbers("scan", scan);
            const auto result = bifurcation_scan(grid, opts);
            Output o(out, ctx.out);
            o.stream() << "a,nontrivial,amplitude,residual,y_variation,iterations\n";
            for (const auto& bp : result)
                o.stream() << format_double(bp.a) << ',' << (bp.nontrivial ? 1 : 0) << ',' << format_double(bp.amplitude)
                           << ',' << format_double(bp.residual) << ',' << format_double(bp.y_variation) << ','
                           << bp.iterations << '\n';
            o.finish(manifest("pde", self.params, {out}), false);
            ctx.err << "pde: first nontrivial a=" << format_double(first_nontrivial(result))
                    << " threshold sqrt(pi/2)=" << format_double(kBifurcationPeriod) << '\n';
            return;
        }
        const double av = number("a", a);
        SolveOptions opts;
        opts.tolerance = number("tolerance", tolerance);
        opts.deflate_trivial = !no_deflate;
        const auto seed = cosine_seed(av, count("nx", nx), count("ny", ny), number("amplitude", amplitude));
        const SolveResult result = solve(seed, opts);
        std::vector<std::string> outputs = {out};
        if (!log.empty()) outputs.push_back(log);
        const auto man = manifest("pde", self.params, outputs);
        Output o(out, ctx.out);
        write_field_csv(o.stream(), result.field);
        o.finish(man, false);
        if (log.empty()) {
            write_solver_log(ctx.err, result);
        } else {
            Output l(log, ctx.out);
            write_solver_log(l.stream(), result);
            l.finish(man, false);
        }
        ctx.err << "pde: " << (result.trivial() ? "trivial" : "nontrivial") << " solution, residual "
                << format_double(result.residual) << ", volume " << format_double(result.field.volume()) << '\n';
        if (compare && av > kBifurcationPeriod) {
            const Orbit orbit = solve_orbit(av, 2048);
            const auto lifted = lift_orbit(orbit, result.field.nx, result.field.ny);
            double err = 0.0;
            for (std::size_t i = 0; i < lifted.values.size(); ++i)
                err = std::max(err, std::abs(lifted.values[i] - result.field.values[i]));
            ctx.err << "pde: max |f_pde - f_ode| = " << format_double(err) << '\n';
        }
    };
}

void add_net(CLI::App& root, Command& c, Context& ctx) {
    c.app = root.add_subcommand("net", "Monte Carlo narrow escape time");
    std::string& manifold = c.params.text();
    std::string& eps = c.params.text("0.01");
    std::string& walkers = c.params.text("20000");
    std::string& dt = c.params.text("auto");
    std::string& seed = c.params.text("42");
    std::string& q = c.params.text();
    std::string& nu = c.params.text("1");
    std::string& start = c.params.text();
    std::string& max_steps = c.params.text("50000000");
    std::string& p1 = c.params.text();
    std::string& p2 = c.params.text();
    std::string& out = c.params.text("json");
    bool& drainage_test = c.params.toggle();
    c.params.add(c.app, "manifold", manifold, "flat2:a=A, flat3:L=L1,L2,L3 or okikiolu:a=A[,k=K][,scale=S]", true);
    c.params.add(c.app, "eps", eps, "Geodesic window radius");
    c.params.add(c.app, "walkers", walkers, "Number of walkers");
    c.params.add(c.app, "dt", dt, "Time step or auto (eps^2/(200 n nu))");
    c.params.add(c.app, "seed", seed, "64-bit seed");
    c.params.add(c.app, "q", q, "Window center, comma separated");
    c.params.add(c.app, "nu", nu, "Diffusion coefficient");
    c.params.add(c.app, "start", start, "Fixed start point (default: uniform)");
    c.params.add(c.app, "max-steps", max_steps, "Steps after which a walker is censored");
    c.params.flag(c.app, "drainage", drainage_test, "Uniform drainage test with windows at the max and min of f");
    c.params.add(c.app, "p1", p1, "Pointwise Green check: first start point");
    c.params.add(c.app, "p2", p2, "Pointwise Green check: second start point");
    c.params.add(c.app, "out", out, "json or - for standard output, or a JSON file path");
    c.action = [&](Command& self) {
        NetConfig config;
        try {
            config.manifold = parse_manifold(manifold);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--manifold: ") + e.what());
        }
        config.eps = number("eps", eps);
        config.walkers = count("walkers", walkers);
        config.dt = dt == "auto" ? 0.0 : number("dt", dt);
        if (dt != "auto" && !(config.dt > 0.0)) throw UsageError("--dt must be positive or auto");
        {
            std::size_t used = 0;
            config.seed = std::stoull(seed, &used);
            if (used != seed.size()) throw UsageError("--seed must be a non-negative integer");
        }
        config.nu = number("nu", nu);
        config.max_steps = count("max-steps", max_steps);
        config.threads = count("threads", ctx.threads);
        if (!start.empty()) config.start = numbers("start", start);
        const std::string target = out == "json" ? "-" : out;

        ordered_json j;
        if (drainage_test) {
            const auto windows = q.empty() ? extremal_windows(config.manifold) : std::vector<std::vector<double>>{};
            if (!q.empty()) throw UsageError("--drainage places the windows itself; drop --q");
            config.q = windows.front();
            const DrainageReport report = uniform_drainage_test(config, windows);
            j["windows"] = ordered_json::array();
            for (const auto& w : report.windows) {
                ordered_json wj = net_json(w.result);
                wj["q"] = w.q;
                wj["h"] = w.f;
                j["windows"].push_back(wj);
                ctx.err << "net: window h=" << format_double(w.f) << " wall " << format_double(w.result.wall_seconds) << " s\n";
            }
            j["comparisons"] = ordered_json::array();
            for (const auto& cmp : report.comparisons)
                j["comparisons"].push_back({{"i", cmp.i}, {"j", cmp.j}, {"difference", cmp.difference},
                                            {"bound", cmp.bound}, {"agrees", cmp.agrees}});
            j["all_agree"] = report.all_agree();
        } else {
            if (q.empty()) throw UsageError("net needs --q (or --drainage)");
            config.q = numbers("q", q);
            if (p1.empty() != p2.empty()) throw UsageError("--p1 and --p2 go together");
            if (!p1.empty()) {
                const GreenCheck g = pointwise_green_check(config, numbers("p1", p1), numbers("p2", p2));
                j["p1"] = g.p1;
                j["p2"] = g.p2;
                j["v1"] = net_json(g.v1);
                j["v2"] = net_json(g.v2);
                j["difference"] = g.difference;
                j["combined_stderr"] = g.combined_stderr;
                j["predicted"] = g.predicted;
                j["z_score"] = g.z_score;
                j["agrees"] = g.agrees;
            } else {
                const NetResult r = average_net(config);
                j = net_json(r);
                if (r.censored > 0)
                    ctx.err << "net: warning: " << r.censored << " censored walkers excluded from the mean\n";
                ctx.err << "net: wall " << format_double(r.wall_seconds) << " s\n";
            }
        }
        j["manifest"] = manifest("net", self.params, {target});
        Output o(target, ctx.out);
        o.stream() << j.dump(2) << '\n';
        o.finish(j["manifest"], true);
    };
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Steady vortex tori, Robin constants and narrow escape times", "drainage");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kToolVersion);
    Context ctx{out, err};
    app.add_option("--threads", ctx.threads, "Worker threads (0: DRAINAGE_THREADS or all cores)")->capture_default_str();

    std::vector<Command> commands(8);
    add_period(app, commands[0], ctx);
    add_orbit(app, commands[1], ctx);
    add_robin(app, commands[2], ctx);
    add_figure2(app, commands[3], ctx);
    add_embed(app, commands[4], ctx);
    add_spectral(app, commands[5], ctx);
    add_pde(app, commands[6], ctx);
    add_net(app, commands[7], ctx);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "drainage: error [usage]: " << one_line(e.what()) << '\n';
        return kExitUsage;
    }

    try {
        for (auto& c : commands)
            if (c.app->parsed()) {
                c.params.values.emplace_back("threads", &ctx.threads);
                c.action(c);
            }
    } catch (const UsageError& e) {
        err << "drainage: error [usage]: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "drainage: error [domain]: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "drainage: error [usage]: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "drainage: error [numerical]: " << one_line(e.what()) << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "drainage: error [runtime]: " << one_line(e.what()) << '\n';
        return 1;
    }
    return kExitOk;
}

}  // namespace drainage::cli
