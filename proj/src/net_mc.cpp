#include "drainage/net_mc.hpp"

#include "drainage/common.hpp"
#include "drainage/lattice.hpp"
#include "drainage/pendulum.hpp"
#include "drainage/philox.hpp"
#include "drainage/robin.hpp"
#include "drainage/spectral.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace drainage {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kTableSize = 8192;

using Point = std::array<double, 3>;

std::string trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return std::string(s);
}

// The conformal exponent h(x) of an Okikiolu torus, tabulated for linear interpolation.
struct ConformalTable {
    double a = 1.0;
    std::vector<double> h, g;  // g = e^h
    double g_max = 1.0;

    double value(const std::vector<double>& table, double x) const {
        const double s = x / a * static_cast<double>(kTableSize);
        const double fl = std::floor(s);
        const double w = s - fl;
        auto i = static_cast<long>(fl) % static_cast<long>(kTableSize);
        if (i < 0) i += static_cast<long>(kTableSize);
        const auto j = (static_cast<std::size_t>(i) + 1) % kTableSize;
        return (1.0 - w) * table[static_cast<std::size_t>(i)] + w * table[j];
    }
};

std::shared_ptr<const ConformalTable> conformal_table(const Manifold& m) {
    OrbitOptions opts;
    opts.oscillations = m.oscillations;
    const Orbit orbit = solve_orbit(m.a, 2048, opts);
    std::vector<double> e(orbit.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(m.scale * orbit.f[i]);
    const double shift = std::log(pairwise_sum(e) / static_cast<double>(e.size()));
    std::vector<double> h(orbit.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = m.scale * orbit.f[i] - shift;

    auto t = std::make_shared<ConformalTable>();
    t->a = m.a;
    t->h = spectral::resample(h, kTableSize);
    t->g.resize(kTableSize);
    for (std::size_t i = 0; i < kTableSize; ++i) t->g[i] = std::exp(t->h[i]);
    t->g_max = *std::max_element(t->g.begin(), t->g.end());
    return t;
}

// Read-only state shared by all walkers of one run.
struct Context {
    int n = 2;
    std::array<double, 3> sides{1.0, 1.0, 1.0};
    Point q{};
    double eps_euclid = 0.0;
    double nu = 1.0;
    double dt = 0.0;
    double shell = 0.0;
    double ball_cap = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;
    bool fixed_start = false;
    Point start{};
    std::shared_ptr<const ConformalTable> conformal;

    double h(const Point& x) const { return conformal ? conformal->value(conformal->h, x[0]) : 0.0; }

    void wrap(Point& x) const {
        for (int i = 0; i < n; ++i) x[i] -= sides[i] * std::floor(x[i] / sides[i]);
    }

    // Euclidean distance from x to the nearest lift of the window center.
    double distance(const Point& x) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = x[i] - q[i];
            d -= sides[i] * std::round(d / sides[i]);
            s += d * d;
        }
        return std::sqrt(s);
    }

    // Expected exit time from the ball of radius r about c.
    double ball_time(const Point& c, double r) const {
        if (!conformal) return r * r / (2.0 * n * nu);
        auto integrand = [&](double phi) {
            const double s = std::sin(phi);
            const double co = std::cos(phi);
            return (s - phi * co) * s *
                   (conformal->value(conformal->g, c[0] + r * co) + conformal->value(conformal->g, c[0] - r * co));
        };
        const double integral = boost::math::quadrature::gauss<double, 30>::integrate(integrand, 0.0, kPi / 2);
        return r * r / (kPi * nu) * integral;
    }
};

Context make_context(const NetConfig& config) {
    validate(config);
    const Manifold& m = config.manifold;
    Context c;
    c.n = m.dimension();
    for (int i = 0; i < c.n; ++i) {
        c.sides[i] = m.sides[i];
        c.q[i] = config.q[i];
    }
    c.nu = config.nu;
    c.dt = time_step(config);
    c.seed = config.seed;
    c.max_steps = config.max_steps;
    if (m.kind == Manifold::Kind::okikiolu) {
        c.conformal = conformal_table(m);
        c.ball_cap = 0.25 * m.shortest_side();
    }
    c.wrap(c.q);
    c.eps_euclid = config.eps * std::exp(-0.5 * c.h(c.q));
    c.shell = config.shell_width * c.eps_euclid;
    if (!config.start.empty()) {
        if (config.start.size() != static_cast<std::size_t>(c.n))
            throw std::domain_error("start point has the wrong dimension");
        c.fixed_start = true;
        for (int i = 0; i < c.n; ++i) c.start[i] = config.start[i];
        c.wrap(c.start);
    }
    return c;
}

Point uniform_start(const Context& c, RandomStream& rng) {
    for (;;) {
        Point x{};
        if (c.conformal) {
            // density proportional to e^h in x, uniform in y
            for (;;) {
                x[0] = c.sides[0] * rng.uniform();
                if (rng.uniform() * c.conformal->g_max <= c.conformal->value(c.conformal->g, x[0])) break;
            }
            x[1] = c.sides[1] * rng.uniform();
        } else {
            for (int i = 0; i < c.n; ++i) x[i] = c.sides[i] * rng.uniform();
        }
        if (c.distance(x) > c.eps_euclid) return x;
    }
}

void move_on_sphere(const Context& c, RandomStream& rng, Point& x, double r) {
    if (c.n == 2) {
        const double angle = 2.0 * kPi * rng.uniform();
        x[0] += r * std::cos(angle);
        x[1] += r * std::sin(angle);
    } else {
        const double z = 2.0 * rng.uniform() - 1.0;
        const double angle = 2.0 * kPi * rng.uniform();
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        x[0] += r * rho * std::cos(angle);
        x[1] += r * rho * std::sin(angle);
        x[2] += r * z;
    }
    c.wrap(x);
}

double walk(const Context& c, std::uint64_t walker_id) {
    RandomStream rng(c.seed, walker_id);
    Point x = c.fixed_start ? c.start : uniform_start(c, rng);
    double d = c.distance(x) - c.eps_euclid;
    if (d <= 0.0) return 0.0;

    double time = 0.0;
    bool stepping = d < c.shell;
    for (std::uint64_t step = 0; step < c.max_steps; ++step) {
        if (!stepping) {
            const double r = std::min(d, c.ball_cap);
            time += c.ball_time(x, r);
            move_on_sphere(c, rng, x, r);
            d = c.distance(x) - c.eps_euclid;
            stepping = d < c.shell;
            continue;
        }
        const double diffusivity = c.nu * std::exp(-c.h(x));
        const double sigma = std::sqrt(2.0 * diffusivity * c.dt);
        for (int i = 0; i < c.n; ++i) x[i] += sigma * rng.normal();
        c.wrap(x);
        time += c.dt;
        const double d_new = c.distance(x) - c.eps_euclid;
        if (d_new <= 0.0) return time;
        // probability that the Brownian bridge touched the window during the step
        if (rng.uniform() < std::exp(-d * d_new / (diffusivity * c.dt))) return time;
        d = d_new;
        if (d > 2.0 * c.shell) stepping = false;
    }
    return kNaN;
}

NetResult summarize(const NetConfig& config, const std::vector<double>& times, double dt) {
    std::vector<double> done;
    done.reserve(times.size());
    for (double t : times)
        if (!std::isnan(t)) done.push_back(t);
    NetResult r;
    r.walkers = times.size();
    r.censored = times.size() - done.size();
    r.absorbed_fraction = times.empty() ? 0.0 : static_cast<double>(done.size()) / static_cast<double>(times.size());
    r.dt = dt;
    if (done.empty()) throw NumericalError("every walker was censored");
    r.mean = pairwise_sum(done) / static_cast<double>(done.size());
    std::vector<double> sq(done.size());
    for (std::size_t i = 0; i < done.size(); ++i) sq[i] = (done[i] - r.mean) * (done[i] - r.mean);
    const double var = done.size() > 1 ? pairwise_sum(sq) / static_cast<double>(done.size() - 1) : 0.0;
    r.stderr_ = std::sqrt(var / static_cast<double>(done.size()));
    r.theory = kNaN;
    r.z_score = kNaN;
    if (config.start.empty()) {
        try {
            r.theory = theory_average(config);
            r.z_score = (r.mean - r.theory) / r.stderr_;
        } catch (const std::domain_error&) {
        }
    }
    return r;
}

}  // namespace

double Manifold::volume() const {
    double v = 1.0;
    for (double s : sides) v *= s;
    return v;
}

double Manifold::shortest_side() const { return *std::min_element(sides.begin(), sides.end()); }

Manifold parse_manifold(std::string_view text) {
    const auto colon = text.find(':');
    const std::string kind = trim(text.substr(0, colon));
    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    // split "key=v1,v2,key2=v3" into keys with value lists
    std::vector<std::pair<std::string, std::vector<double>>> params;
    std::size_t pos = 0;
    while (pos < rest.size()) {
        auto comma = rest.find(',', pos);
        if (comma == std::string_view::npos) comma = rest.size();
        const std::string_view item = rest.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq != std::string_view::npos) {
            params.push_back({trim(item.substr(0, eq)), {parse_double(item.substr(eq + 1))}});
        } else {
            if (params.empty()) throw std::invalid_argument("manifold parameter without a name: " + std::string(item));
            params.back().second.push_back(parse_double(item));
        }
        pos = comma + 1;
    }
    auto single = [&](const std::string& key, double fallback, bool required) {
        for (const auto& [k, v] : params)
            if (k == key) {
                if (v.size() != 1) throw std::invalid_argument("manifold parameter " + key + " takes one value");
                return v[0];
            }
        if (required) throw std::invalid_argument("manifold " + kind + " needs " + key + "=...");
        return fallback;
    };
    auto check_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : params)
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* s) { return k == s; }) == allowed.end())
                throw std::invalid_argument("unknown manifold parameter '" + k + "' for " + kind);
    };

    Manifold m;
    if (kind == "flat2") {
        check_keys({"a"});
        m.kind = Manifold::Kind::flat2;
        m.a = single("a", 1.0, false);
        if (!(m.a > 0.0)) throw std::invalid_argument("flat2 needs a > 0");
        m.sides = {m.a, 1.0 / m.a};
    } else if (kind == "flat3") {
        check_keys({"L"});
        m.kind = Manifold::Kind::flat3;
        m.sides = {1.0, 1.0, 1.0};
        for (const auto& [k, v] : params) {
            if (v.size() == 1) m.sides = {v[0], v[0], v[0]};
            else if (v.size() == 3) m.sides = v;
            else throw std::invalid_argument("flat3 needs L=s or L=s1,s2,s3");
        }
        for (double s : m.sides)
            if (!(s > 0.0)) throw std::invalid_argument("flat3 sides must be positive");
    } else if (kind == "okikiolu") {
        check_keys({"a", "k", "scale"});
        m.kind = Manifold::Kind::okikiolu;
        m.a = single("a", 0.0, true);
        const double k = single("k", 1.0, false);
        if (k < 1.0 || k != std::floor(k)) throw std::invalid_argument("okikiolu k must be a positive integer");
        m.oscillations = static_cast<int>(k);
        m.scale = single("scale", 1.0, false);
        if (!(m.a / m.oscillations > kBifurcationPeriod))
            throw std::invalid_argument("okikiolu needs a/k > sqrt(pi/2) = " + format_double(kBifurcationPeriod));
        m.sides = {m.a, 1.0 / m.a};
    } else {
        throw std::invalid_argument("unknown manifold '" + kind + "' (expected flat2, flat3 or okikiolu)");
    }
    return m;
}

std::string describe(const Manifold& m) {
    switch (m.kind) {
        case Manifold::Kind::flat2: return "flat2:a=" + format_double(m.a);
        case Manifold::Kind::flat3:
            return "flat3:L=" + format_double(m.sides[0]) + "," + format_double(m.sides[1]) + "," +
                   format_double(m.sides[2]);
        case Manifold::Kind::okikiolu:
            return "okikiolu:a=" + format_double(m.a) + ",k=" + std::to_string(m.oscillations) +
                   ",scale=" + format_double(m.scale);
    }
    return {};
}

double time_step(const NetConfig& config) {
    if (config.dt > 0.0) return config.dt;
    return config.eps * config.eps / (200.0 * config.manifold.dimension() * config.nu);
}

void validate(const NetConfig& config) {
    const Manifold& m = config.manifold;
    const int n = m.dimension();
    if (m.sides.size() != static_cast<std::size_t>(n)) throw std::domain_error("manifold sides do not match its dimension");
    if (config.q.size() != static_cast<std::size_t>(n))
        throw std::domain_error("window center needs " + std::to_string(n) + " coordinates");
    if (!(config.nu > 0.0) || !std::isfinite(config.nu)) throw std::domain_error("nu must be positive");
    if (!(config.eps > 0.0) || !(config.eps < m.shortest_side() / 10.0))
        throw std::domain_error("eps must lie in (0, shortest side / 10 = " + format_double(m.shortest_side() / 10.0) + ")");
    if (config.dt < 0.0) throw std::domain_error("dt must be positive (or 0 for automatic)");
    if (std::sqrt(2.0 * n * config.nu * time_step(config)) > config.eps / 10.0 * (1.0 + 1e-12))
        throw std::domain_error("time step too large: need sqrt(2 n nu dt) <= eps/10, i.e. dt <= " +
                                format_double(config.eps * config.eps / (200.0 * n * config.nu)));
    if (!(config.shell_width > 0.0)) throw std::domain_error("shell width must be positive");
    if (config.walkers == 0) throw std::domain_error("walkers must be positive");
}

double theory_average(const NetConfig& config) {
    validate(config);
    const Manifold& m = config.manifold;
    const double prefactor = m.volume() / config.nu;
    switch (m.kind) {
        case Manifold::Kind::flat2: return prefactor * (-std::log(config.eps) / (2.0 * kPi) + robin_flat(m.a));
        case Manifold::Kind::flat3:
            return prefactor * (1.0 / (4.0 * kPi * config.eps) + robin_via_zeta(FlatTorus(m.sides)));
        case Manifold::Kind::okikiolu: {
            if (m.scale != 1.0)
                throw std::domain_error("no Robin constant for a conformal factor that is not a steady vortex metric");
            RobinOptions opts;
            opts.oscillations = m.oscillations;
            return prefactor * (-std::log(config.eps) / (2.0 * kPi) + robin_report(m.a, opts).r1);
        }
    }
    throw std::domain_error("unsupported manifold");
}

double sample_sojourn(const NetConfig& config, std::uint64_t walker_id) {
    const Context c = make_context(config);
    return walk(c, walker_id);
}

std::vector<double> sojourn_times(const NetConfig& config) {
    const Context c = make_context(config);
    std::vector<double> times(config.walkers);
    parallel_for(config.walkers, thread_count(config.threads), [&](std::size_t i) { times[i] = walk(c, i); });
    return times;
}

NetResult average_net(const NetConfig& config) {
    if (config.walkers < 100) throw std::domain_error("average_net needs at least 100 walkers");
    const auto begin = std::chrono::steady_clock::now();
    const auto times = sojourn_times(config);
    NetResult r = summarize(config, times, time_step(config));
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    return r;
}

GreenCheck pointwise_green_check(const NetConfig& config, const std::vector<double>& p1,
                                 const std::vector<double>& p2) {
    if (config.manifold.kind == Manifold::Kind::okikiolu)
        throw std::domain_error("pointwise Green check needs a flat manifold");
    if (config.walkers < 100) throw std::domain_error("pointwise Green check needs at least 100 walkers");
    GreenCheck g;
    g.p1 = p1;
    g.p2 = p2;
    NetConfig c = config;
    c.start = p1;
    g.v1 = average_net(c);
    c.start = p2;
    g.v2 = average_net(c);
    g.difference = g.v1.mean - g.v2.mean;
    g.combined_stderr = std::hypot(g.v1.stderr_, g.v2.stderr_);

    const FlatTorus torus(config.manifold.sides);
    auto green_at = [&](const std::vector<double>& p) {
        std::vector<double> x(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) x[i] = p[i] - config.q[i];
        return green(torus, x);
    };
    g.predicted = -config.manifold.volume() / config.nu * (green_at(p1) - green_at(p2));
    const double gap = g.difference - g.predicted;
    g.z_score = g.combined_stderr > 0.0 ? gap / g.combined_stderr : (gap == 0.0 ? 0.0 : kNaN);
    g.agrees = std::abs(gap) <= 3.0 * g.combined_stderr;
    return g;
}

bool DrainageReport::all_agree() const {
    return std::all_of(comparisons.begin(), comparisons.end(), [](const auto& c) { return c.agrees; });
}

std::vector<std::vector<double>> extremal_windows(const Manifold& m) {
    if (m.kind != Manifold::Kind::okikiolu) throw std::domain_error("extremal windows need an Okikiolu torus");
    // orbits start at the minimum of f; the maximum is half a period later
    return {{0.5 * m.a / m.oscillations, 0.0}, {0.0, 0.0}};
}

DrainageReport uniform_drainage_test(const NetConfig& base, const std::vector<std::vector<double>>& q_list,
                                     double relative_allowance) {
    if (base.manifold.kind != Manifold::Kind::okikiolu)
        throw std::domain_error("uniform drainage test needs an Okikiolu torus");
    if (q_list.size() < 2) throw std::domain_error("uniform drainage test needs at least two windows");
    DrainageReport report;
    for (const auto& q : q_list) {
        NetConfig c = base;
        c.q = q;
        DrainageWindow w;
        w.q = q;
        const Context ctx = make_context(c);
        Point p{};
        for (std::size_t i = 0; i < q.size(); ++i) p[i] = q[i];
        ctx.wrap(p);
        w.f = ctx.h(p);
        w.result = average_net(c);
        report.windows.push_back(std::move(w));
    }
    for (std::size_t i = 0; i < report.windows.size(); ++i)
        for (std::size_t j = i + 1; j < report.windows.size(); ++j) {
            const auto& a = report.windows[i].result;
            const auto& b = report.windows[j].result;
            DrainageComparison cmp;
            cmp.i = i;
            cmp.j = j;
            cmp.difference = a.mean - b.mean;
            cmp.bound = 3.0 * std::hypot(a.stderr_, b.stderr_) +
                        relative_allowance * 0.5 * (std::abs(a.mean) + std::abs(b.mean));
            cmp.agrees = std::abs(cmp.difference) <= cmp.bound;
            report.comparisons.push_back(cmp);
        }
    return report;
}

}  // namespace drainage
