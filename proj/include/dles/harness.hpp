#pragma once

// Experiment configuration, DNS-aided ensemble runs and their CSV outputs.
//
// Config files are flat "key = value" text; '#' starts a comment. Keys:
//
//   experiment      burgers | ns3d | spectral1d
//   nu              viscosity
//   n_dns           DNS points per axis (spectral1d: 2 K_h + 1)
//   n_les           LES points per axis, comma separated
//   filter          va, pva, sa (ns3d only), comma separated
//   closures        no_model, classic, swap_sym, swap, comma separated
//   seeds           e.g. "1-20" or "1,4,9"
//   t_warmup        RK3 warm-up end time (ns3d only)
//   t_end           final time
//   cfl             Courant number C
//   length          domain length
//   peak            peak wavenumber of the initial spectrum
//   output_dir      directory for CSV files and snapshots
//   snapshot_every  write field snapshots every n steps (0: never)
//   threads         worker threads (0: one per hardware thread)

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dles/diagnostics.hpp"
#include "dles/simulate.hpp"
#include "dles/snapshot.hpp"
#include "dles/spectral1d.hpp"

namespace dles {

enum class Experiment { burgers, ns3d, spectral1d };

inline std::string to_string(Experiment e) {
    switch (e) {
    case Experiment::burgers:
        return "burgers";
    case Experiment::ns3d:
        return "ns3d";
    case Experiment::spectral1d:
        return "spectral1d";
    }
    return {};
}

/// Invalid configuration; key() names the offending entry.
class ConfigError : public Error {
  public:
    ConfigError(const std::string& key, const std::string& why)
        : Error("config key '" + key + "': " + why), key_(key) {}
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Splits on commas and whitespace, dropping empty items.
inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) {
                out.push_back(cur);
            }
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(x)) {
            throw std::invalid_argument(v);
        }
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a real number, got '" + v + "'");
    }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError(key, "integer out of range: '" + v + "'");
    }
}

/// Shortest text that reads back to the same double.
inline std::string format_real(double x) {
    if (std::isnan(x)) {
        return {};
    }
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001b3ull;
    }
    return h;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& f) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? "," : "") + f(xs[i]);
    }
    return out;
}

} // namespace detail

inline Experiment parse_experiment(const std::string& s) {
    for (Experiment e : {Experiment::burgers, Experiment::ns3d, Experiment::spectral1d}) {
        if (s == to_string(e)) {
            return e;
        }
    }
    throw ConfigError("experiment", "unknown experiment '" + s + "' (expected burgers, ns3d or spectral1d)");
}

/// "1-20", "3,5,7" or a mix such as "1-4,10".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& s, const std::string& key = "seeds") {
    std::vector<std::uint64_t> out;
    for (const auto& item : detail::split_list(s)) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(detail::parse_uint(key, item));
            continue;
        }
        const auto a = detail::parse_uint(key, item.substr(0, dash));
        const auto b = detail::parse_uint(key, item.substr(dash + 1));
        if (b < a) {
            throw ConfigError(key, "empty seed range '" + item + "'");
        }
        if (b - a >= 1000000) {
            throw ConfigError(key, "seed range '" + item + "' is too long");
        }
        for (auto x = a; x <= b; ++x) {
            out.push_back(x);
        }
    }
    if (out.empty()) {
        throw ConfigError(key, "no seeds given");
    }
    return out;
}

struct ExperimentConfig {
    Experiment experiment = Experiment::burgers;
    double nu = 5e-4;
    std::size_t n_dns = 6561;
    std::vector<std::size_t> n_les{243, 729, 2187};
    std::vector<VectorFilter> filters{};
    std::vector<ClosureKind> closures{ClosureKind::no_model, ClosureKind::classic, ClosureKind::swap};
    std::vector<std::uint64_t> seeds = parse_seed_list("1-20");
    double t_warmup = 0.0;
    double t_end = 0.1;
    double cfl = 0.4;
    double length = 2.0 * std::numbers::pi;
    double peak = 10.0;
    std::string output_dir = "out";
    std::size_t snapshot_every = 0;
    unsigned threads = 0;

    static ExperimentConfig defaults(Experiment e) {
        ExperimentConfig c;
        c.experiment = e;
        switch (e) {
        case Experiment::burgers:
            break;
        case Experiment::ns3d:
            c.nu = 5e-4;
            c.n_dns = 90;
            c.n_les = {18, 30};
            c.filters = {VectorFilter::va, VectorFilter::pva, VectorFilter::sa};
            c.closures = {ClosureKind::no_model, ClosureKind::classic, ClosureKind::swap_sym, ClosureKind::swap};
            c.seeds = {1};
            c.t_warmup = 0.5;
            c.t_end = 0.6;
            c.cfl = 0.15;
            c.length = 1.0;
            c.peak = 5.0;
            break;
        case Experiment::spectral1d:
            c.closures = {ClosureKind::no_model, ClosureKind::swap};
            c.cfl = 0.4;
            break;
        }
        return c;
    }

    static const std::vector<std::string>& keys() {
        static const std::vector<std::string> k{"experiment", "nu",      "n_dns",      "n_les",  "filter",
                                                "closures",   "seeds",   "t_warmup",   "t_end",  "cfl",
                                                "length",     "peak",    "output_dir", "snapshot_every",
                                                "threads"};
        return k;
    }

    void set(const std::string& key, const std::string& raw) {
        const std::string v = detail::trim(raw);
        if (key == "experiment") {
            experiment = parse_experiment(v);
        } else if (key == "nu") {
            nu = detail::parse_real(key, v);
        } else if (key == "n_dns") {
            n_dns = detail::parse_uint(key, v);
        } else if (key == "n_les") {
            n_les.clear();
            for (const auto& s : detail::split_list(v)) {
                n_les.push_back(detail::parse_uint(key, s));
            }
        } else if (key == "filter") {
            filters.clear();
            for (const auto& s : detail::split_list(v)) {
                try {
                    filters.push_back(parse_vector_filter(s));
                } catch (const Error& e) {
                    throw ConfigError(key, e.what());
                }
            }
        } else if (key == "closures") {
            closures.clear();
            for (const auto& s : detail::split_list(v)) {
                try {
                    closures.push_back(parse_closure_kind(s));
                } catch (const Error& e) {
                    throw ConfigError(key, e.what());
                }
            }
        } else if (key == "seeds") {
            seeds = parse_seed_list(v, key);
        } else if (key == "t_warmup") {
            t_warmup = detail::parse_real(key, v);
        } else if (key == "t_end") {
            t_end = detail::parse_real(key, v);
        } else if (key == "cfl") {
            cfl = detail::parse_real(key, v);
        } else if (key == "length") {
            length = detail::parse_real(key, v);
        } else if (key == "peak") {
            peak = detail::parse_real(key, v);
        } else if (key == "output_dir") {
            if (v.empty()) {
                throw ConfigError(key, "empty path");
            }
            output_dir = v;
        } else if (key == "snapshot_every") {
            snapshot_every = detail::parse_uint(key, v);
        } else if (key == "threads") {
            threads = static_cast<unsigned>(detail::parse_uint(key, v));
        } else {
            throw ConfigError(key, "unknown key");
        }
    }

    void validate() const {
        if (!(nu > 0.0)) {
            throw ConfigError("nu", "viscosity must be positive");
        }
        if (!(length > 0.0)) {
            throw ConfigError("length", "domain length must be positive");
        }
        if (!(peak > 0.0)) {
            throw ConfigError("peak", "peak wavenumber must be positive");
        }
        if (!(cfl > 0.0) || cfl > 1.0) {
            throw ConfigError("cfl", "Courant number must lie in (0, 1]");
        }
        if (!(t_warmup >= 0.0)) {
            throw ConfigError("t_warmup", "must be non-negative");
        }
        if (experiment != Experiment::ns3d && t_warmup != 0.0) {
            throw ConfigError("t_warmup", "only the ns3d experiment has a warm-up phase");
        }
        if (!(t_end > t_warmup)) {
            throw ConfigError("t_end", "must exceed t_warmup");
        }
        if (n_dns < 3) {
            throw ConfigError("n_dns", "need at least 3 points");
        }
        if (n_les.empty()) {
            throw ConfigError("n_les", "no LES sizes given");
        }
        if (std::set<std::size_t>(n_les.begin(), n_les.end()).size() != n_les.size()) {
            throw ConfigError("n_les", "duplicate LES size");
        }
        if (experiment == Experiment::spectral1d) {
            if (std::abs(length - 2.0 * std::numbers::pi) > 1e-12) {
                throw ConfigError("length", "spectral1d is defined on [0, 2 pi)");
            }
            if (n_dns % 2 == 0) {
                throw ConfigError("n_dns", "spectral grids have an odd number 2K + 1 of points");
            }
        }
        for (auto n : n_les) {
            try {
                make_grid_pair(n_dns, n, length);
            } catch (const Error& e) {
                throw ConfigError("n_les", e.what());
            }
        }
        if (experiment == Experiment::ns3d) {
            if (filters.empty()) {
                throw ConfigError("filter", "ns3d needs at least one of va, pva, sa");
            }
            if (std::set<VectorFilter>(filters.begin(), filters.end()).size() != filters.size()) {
                throw ConfigError("filter", "duplicate filter");
            }
        } else if (!filters.empty()) {
            throw ConfigError("filter", "only the ns3d experiment takes a vector filter");
        }
        if (closures.empty()) {
            throw ConfigError("closures", "no closures given");
        }
        if (std::set<ClosureKind>(closures.begin(), closures.end()).size() != closures.size()) {
            throw ConfigError("closures", "duplicate closure");
        }
        if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
            throw ConfigError("seeds", "duplicate seed");
        }
        if (seeds.empty()) {
            throw ConfigError("seeds", "no seeds given");
        }
    }

    /// Every key that affects results, one "key = value" line each.
    std::string canonical() const {
        std::ostringstream os;
        os << "experiment = " << to_string(experiment) << "\n";
        os << "nu = " << detail::format_real(nu) << "\n";
        os << "n_dns = " << n_dns << "\n";
        os << "n_les = " << detail::join(n_les, [](std::size_t n) { return std::to_string(n); }) << "\n";
        if (!filters.empty()) {
            os << "filter = " << detail::join(filters, [](VectorFilter f) { return to_string(f); }) << "\n";
        }
        os << "closures = " << detail::join(closures, [](ClosureKind k) { return to_string(k); }) << "\n";
        os << "seeds = " << detail::join(seeds, [](std::uint64_t s) { return std::to_string(s); }) << "\n";
        os << "t_warmup = " << detail::format_real(t_warmup) << "\n";
        os << "t_end = " << detail::format_real(t_end) << "\n";
        os << "cfl = " << detail::format_real(cfl) << "\n";
        os << "length = " << detail::format_real(length) << "\n";
        os << "peak = " << detail::format_real(peak) << "\n";
        os << "snapshot_every = " << snapshot_every << "\n";
        return os.str();
    }

    std::uint64_t hash() const { return detail::fnv1a(canonical()); }
};

struct ConfigEntry {
    std::string key;
    std::string value;
};

/// Parses "key = value" lines. `source` names the text in error messages.
inline std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& source = "config") {
    std::vector<ConfigEntry> out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, source + " line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        ConfigEntry e{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1))};
        const auto& keys = ExperimentConfig::keys();
        if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
            throw ConfigError(e.key, source + " line " + std::to_string(lineno) + ": unknown key");
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<ConfigEntry> load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("config", "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

/// Experiment defaults, then file entries, then overrides; validated.
inline ExperimentConfig resolve_config(const std::vector<ConfigEntry>& file, const std::vector<ConfigEntry>& overrides) {
    Experiment e = Experiment::burgers;
    for (const auto* src : {&file, &overrides}) {
        for (const auto& entry : *src) {
            if (entry.key == "experiment") {
                e = parse_experiment(detail::trim(entry.value));
            }
        }
    }
    ExperimentConfig cfg = ExperimentConfig::defaults(e);
    for (const auto* src : {&file, &overrides}) {
        for (const auto& entry : *src) {
            cfg.set(entry.key, entry.value);
        }
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Run records

/// Column order of every per-closure table.
inline constexpr std::array<ClosureKind, 4> closure_columns{ClosureKind::no_model, ClosureKind::classic,
                                                            ClosureKind::swap_sym, ClosureKind::swap};

inline std::size_t closure_column(ClosureKind k) {
    return static_cast<std::size_t>(std::find(closure_columns.begin(), closure_columns.end(), k) -
                                    closure_columns.begin());
}

struct GroupKey {
    int rank = 0;       ///< filter order: va, pva, sa; 1D filters use 0
    std::string filter; ///< va, pva, sa, tophat or cutoff
    std::size_t n_les = 0;
    auto operator<=>(const GroupKey& o) const { return std::tie(rank, n_les) <=> std::tie(o.rank, o.n_les); }
    bool operator==(const GroupKey& o) const { return rank == o.rank && n_les == o.n_les; }
};

struct ErrorRow {
    long step = 0;
    double t = 0.0;
    /// Relative error per closure column; NaN for closures not run.
    std::array<double, 4> err{};
};

/// One (filter, LES size) combination within one seed.
struct GroupRecord {
    GroupKey key;
    std::vector<ErrorRow> rows;
    Spectrum filtered;
    std::array<Spectrum, 4> les;
    std::array<std::vector<double>, 4> dissipation;
};

struct RunRecord {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    Spectrum dns;
    std::vector<GroupRecord> groups;
    std::optional<TurbStats> warmup_stats;
    double wall_seconds = 0.0;
};

struct RunOptions {
    /// Progress messages; called from worker threads under a lock.
    std::function<void(const std::string&)> log;
    /// Write field snapshots under output_dir when snapshot_every > 0.
    bool snapshots = true;
};

namespace detail {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

inline bool snapshot_due(const ExperimentConfig& cfg, const RunOptions& opt, long step, bool last) {
    return opt.snapshots && cfg.snapshot_every > 0 &&
           (last || step % static_cast<long>(cfg.snapshot_every) == 0);
}

inline std::filesystem::path seed_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
    auto d = std::filesystem::path(cfg.output_dir) / "snapshots" / ("seed" + std::to_string(seed));
    std::filesystem::create_directories(d);
    return d;
}

inline std::string step_tag(long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "step%06ld", step);
    return buf;
}

/// Time step clipped to land exactly on t_stop; `last` reports the clip.
inline double clipped_dt(double dt, double t, double t_stop, bool& last) {
    last = t + dt >= t_stop || t_stop - (t + dt) <= 1e-12 * t_stop;
    return last ? t_stop - t : dt;
}

inline std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

// Burgers ------------------------------------------------------------------

inline RunRecord run_burgers_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    RunRecord rec;
    rec.seed = seed;
    RngStream rng(seed);
    const Grid1D g(cfg.n_dns, cfg.length);
    const BurgersParams p(cfg.nu);
    TimeState<Field1D> dns{0.0, 0, burgers_init(g, rng, {cfg.peak, false})};

    const auto sizes = sorted(cfg.n_les);
    std::vector<GridPair> pairs;
    std::vector<BurgersLes> les;
    std::vector<std::size_t> group_of;
    for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
        pairs.push_back(make_grid_pair(cfg.n_dns, sizes[gi], cfg.length));
        rec.groups.push_back({GroupKey{0, "tophat", sizes[gi]}, {}, {}, {}, {}});
        for (ClosureKind k : cfg.closures) {
            les.push_back(make_burgers_les(pairs.back(), k, dns));
            group_of.push_back(gi);
        }
    }

    auto record = [&](bool last) {
        std::vector<Field1D> vbar;
        for (std::size_t gi = 0; gi < pairs.size(); ++gi) {
            vbar.push_back(twogrid_filter_1d(pairs[gi], dns.state));
            ErrorRow row{dns.step, dns.t, {}};
            row.err.fill(nan);
            rec.groups[gi].rows.push_back(row);
        }
        for (std::size_t li = 0; li < les.size(); ++li) {
            rec.groups[group_of[li]].rows.back().err[closure_column(les[li].kind)] =
                relative_error(les[li].state.state, vbar[group_of[li]]);
        }
        if (snapshot_due(cfg, opt, dns.step, last)) {
            const auto d = seed_dir(cfg, seed);
            write_field(d / ("dns_" + step_tag(dns.step) + ".dles"), dns.state);
            for (const auto& l : les) {
                write_field(d / ("les_n" + std::to_string(l.pair.n_coarse) + "_" + to_string(l.kind) + "_" +
                                 step_tag(dns.step) + ".dles"),
                            l.state.state);
            }
        }
    };

    record(false);
    bool last = false;
    while (!last) {
        const double dt = clipped_dt(cfl_dt_burgers(dns.state, cfg.nu, g.spacing(), cfg.cfl), dns.t, cfg.t_end, last);
        euler_step_burgers(dns, les, p, dt);
        record(last);
    }

    rec.dns = energy_spectrum(dns.state);
    for (std::size_t gi = 0; gi < pairs.size(); ++gi) {
        const Field1D vbar = twogrid_filter_1d(pairs[gi], dns.state);
        rec.groups[gi].filtered = energy_spectrum(vbar);
        for (ClosureKind k : cfg.closures) {
            const Field1D m = burgers_sfs(pairs[gi], dns.state, p, k);
            const Field1D d = dissipation_coefficient(m, vbar, true);
            rec.groups[gi].dissipation[closure_column(k)].assign(d.values().begin(), d.values().end());
        }
    }
    for (std::size_t li = 0; li < les.size(); ++li) {
        rec.groups[group_of[li]].les[closure_column(les[li].kind)] = energy_spectrum(les[li].state.state);
    }
    return rec;
}

// Navier-Stokes -------------------------------------------------------------

inline RunRecord run_ns3d_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    RunRecord rec;
    rec.seed = seed;
    RngStream rng(seed);
    const Grid3D g(cfg.n_dns, cfg.length);
    const NSParams p(cfg.nu);
    NSLockstep lock(g, p);
    const PoissonSolver3D& fs = lock.fine_solver();
    TimeState<VectorField> dns{0.0, 0, ns_init(fs, rng, cfg.peak)};

    auto say = [&](const std::string& s) {
        if (opt.log) {
            opt.log("seed " + std::to_string(seed) + ": " + s);
        }
    };

    bool last = cfg.t_warmup <= 0.0;
    while (!last) {
        const double dt = clipped_dt(cfl_dt_ns(dns.state, cfg.nu, g.spacing(), cfg.cfl), dns.t, cfg.t_warmup, last);
        dns.state = ns_rk3_step(fs, dns.state, p, dt);
        dns.t = last ? cfg.t_warmup : dns.t + dt;
        ++dns.step;
        if (!dns.state.all_finite()) {
            throw NumericalError("DNS warm-up velocity", dns.step);
        }
    }
    rec.warmup_stats = turbulence_stats(dns.state, cfg.nu);
    say("warm-up done after " + std::to_string(dns.step) + " RK3 steps");
    dns.step = 0;

    std::vector<VectorFilter> filters = cfg.filters;
    std::sort(filters.begin(), filters.end());
    const auto sizes = sorted(cfg.n_les);

    struct Group {
        GridPair pair;
        VectorFilter filter;
    };
    std::vector<Group> groups;
    std::vector<NSLes> les;
    std::vector<std::size_t> group_of;
    for (VectorFilter f : filters) {
        for (std::size_t n : sizes) {
            groups.push_back({make_grid_pair(cfg.n_dns, n, cfg.length), f});
            rec.groups.push_back({GroupKey{static_cast<int>(f), to_string(f), n}, {}, {}, {}, {}});
            for (ClosureKind k : cfg.closures) {
                les.push_back(lock.make_les(groups.back().pair, f, k, dns));
                group_of.push_back(groups.size() - 1);
            }
        }
    }

    auto filtered = [&](std::size_t gi) {
        return filter_vector(groups[gi].pair, lock.coarse_solver(groups[gi].pair), dns.state, groups[gi].filter);
    };

    auto record = [&](bool last_step) {
        std::vector<VectorField> vbar;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            vbar.push_back(filtered(gi));
            ErrorRow row{dns.step, dns.t, {}};
            row.err.fill(nan);
            rec.groups[gi].rows.push_back(row);
        }
        for (std::size_t li = 0; li < les.size(); ++li) {
            rec.groups[group_of[li]].rows.back().err[closure_column(les[li].kind)] =
                relative_error(les[li].state.state, vbar[group_of[li]]);
        }
        if (snapshot_due(cfg, opt, dns.step, last_step)) {
            const auto d = seed_dir(cfg, seed);
            write_vector_field(d / ("dns_" + step_tag(dns.step)), dns.state);
            for (const auto& l : les) {
                write_vector_field(d / ("les_" + to_string(l.filter) + "_n" + std::to_string(l.pair.n_coarse) + "_" +
                                        to_string(l.kind) + "_" + step_tag(dns.step)),
                                   l.state.state);
            }
        }
    };

    record(false);
    last = false;
    while (!last) {
        const double dt = clipped_dt(cfl_dt_ns(dns.state, cfg.nu, g.spacing(), cfg.cfl), dns.t, cfg.t_end, last);
        lock.step(dns, les, dt);
        if (last) {
            dns.t = cfg.t_end;
            for (auto& l : les) {
                l.state.t = cfg.t_end;
            }
        }
        record(last);
    }
    say("DNS-aided LES done after " + std::to_string(dns.step) + " Euler steps");

    rec.dns = energy_spectrum(dns.state);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const VectorField vbar = filtered(gi);
        rec.groups[gi].filtered = energy_spectrum(vbar);
        const PoissonSolver3D& cs = lock.coarse_solver(groups[gi].pair);
        for (ClosureKind k : cfg.closures) {
            const TensorField m = ns_sfs(groups[gi].pair, fs, cs, dns.state, p, groups[gi].filter, k);
            const Field3D d = dissipation_coefficient(m, vbar);
            rec.groups[gi].dissipation[closure_column(k)].assign(d.values().begin(), d.values().end());
        }
    }
    for (std::size_t li = 0; li < les.size(); ++li) {
        rec.groups[group_of[li]].les[closure_column(les[li].kind)] = energy_spectrum(les[li].state.state);
    }
    return rec;
}

// Spectral Burgers ------------------------------------------------------------

/// Physical samples at x_j = 2 pi j / (2K + 1) stored as a face field, so
/// that face i (at (i + 1) h) holds sample i + 1.
inline Field1D spectral_to_face_field(const SpectralField& u) {
    const auto p = u.to_physical();
    Field1D f(Grid1D(p.size(), 2.0 * std::numbers::pi), Stagger::face(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
        f[i] = p[(i + 1) % p.size()];
    }
    return f;
}

inline RunRecord run_spectral_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opt) {
    RunRecord rec;
    rec.seed = seed;
    RngStream rng(seed);
    const std::size_t kh = (cfg.n_dns - 1) / 2;
    TimeState<SpectralField> dns{0.0, 0, spectral_burgers_init(kh, rng, {cfg.peak, false})};

    const auto sizes = sorted(cfg.n_les);
    std::vector<SpectralLes> les;
    std::vector<std::size_t> group_of;
    std::vector<ClosureKind> kind_of;
    for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
        rec.groups.push_back({GroupKey{0, "cutoff", sizes[gi]}, {}, {}, {}, {}});
        for (ClosureKind k : cfg.closures) {
            les.push_back(make_spectral_les((sizes[gi] - 1) / 2, k != ClosureKind::no_model, dns));
            group_of.push_back(gi);
            kind_of.push_back(k);
        }
    }

    auto record = [&](bool last_step) {
        std::vector<SpectralField> ref;
        for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
            ref.push_back(cutoff_filter(dns.state, (sizes[gi] - 1) / 2));
            ErrorRow row{dns.step, dns.t, {}};
            row.err.fill(nan);
            rec.groups[gi].rows.push_back(row);
        }
        for (std::size_t li = 0; li < les.size(); ++li) {
            rec.groups[group_of[li]].rows.back().err[closure_column(kind_of[li])] =
                relative_error(les[li].state.state, ref[group_of[li]]);
        }
        if (snapshot_due(cfg, opt, dns.step, last_step)) {
            const auto d = seed_dir(cfg, seed);
            write_field(d / ("dns_" + step_tag(dns.step) + ".dles"), spectral_to_face_field(dns.state));
            for (std::size_t li = 0; li < les.size(); ++li) {
                write_field(d / ("les_n" + std::to_string(les[li].state.state.points()) + "_" + to_string(kind_of[li]) +
                                 "_" + step_tag(dns.step) + ".dles"),
                            spectral_to_face_field(les[li].state.state));
            }
        }
    };

    record(false);
    bool last = false;
    while (!last) {
        const double dt = clipped_dt(cfl_dt_spectral(dns.state, cfg.nu, cfg.cfl), dns.t, cfg.t_end, last);
        euler_step_spectral(dns, les, cfg.nu, dt);
        record(last);
    }

    rec.dns = energy_spectrum(dns.state);
    for (std::size_t gi = 0; gi < sizes.size(); ++gi) {
        const std::size_t k = (sizes[gi] - 1) / 2;
        const SpectralField ubar = cutoff_filter(dns.state, k);
        rec.groups[gi].filtered = energy_spectrum(ubar);
        const auto grad = spectral_derivative(ubar).to_physical();
        const double h = 2.0 * std::numbers::pi / static_cast<double>(sizes[gi]);
        for (ClosureKind c : cfg.closures) {
            std::vector<double> d(grad.size(), 0.0);
            if (c != ClosureKind::no_model) {
                const auto m = spectral_sfs(dns.state, k, cfg.nu).to_physical();
                for (std::size_t i = 0; i < d.size(); ++i) {
                    d[i] = m[i] * grad[i] / (h * h);
                }
            }
            rec.groups[gi].dissipation[closure_column(c)] = std::move(d);
        }
    }
    for (std::size_t li = 0; li < les.size(); ++li) {
        rec.groups[group_of[li]].les[closure_column(kind_of[li])] = energy_spectrum(les[li].state.state);
    }
    return rec;
}

} // namespace detail

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The exception of the
/// lowest failing index is rethrown after all workers have joined.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// One record per seed, in the order of cfg.seeds.
inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
    cfg.validate();
    std::mutex log_mutex;
    RunOptions locked = opt;
    if (opt.log) {
        locked.log = [&](const std::string& s) {
            std::lock_guard lock(log_mutex);
            opt.log(s);
        };
    }
    std::vector<RunRecord> records(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.threads, [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            switch (cfg.experiment) {
            case Experiment::burgers:
                records[i] = detail::run_burgers_seed(cfg, seed, locked);
                break;
            case Experiment::ns3d:
                records[i] = detail::run_ns3d_seed(cfg, seed, locked);
                break;
            case Experiment::spectral1d:
                records[i] = detail::run_spectral_seed(cfg, seed, locked);
                break;
            }
        } catch (const NumericalError& e) {
            throw NumericalError(to_string(cfg.experiment) + " seed " + std::to_string(seed), e);
        }
        records[i].config_hash = cfg.hash();
        records[i].wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (locked.log) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f s", records[i].wall_seconds);
            locked.log("seed " + std::to_string(seed) + " finished in " + buf);
        }
    });
    return records;
}

// ---------------------------------------------------------------------------
// Ensemble aggregation and output

struct GroupSummary {
    GroupKey key;
    std::array<bool, 4> present{};
    /// Ensemble mean and maximum of the final relative error.
    std::array<double, 4> mean_error{};
    std::array<double, 4> max_error{};
    Spectrum filtered;
    std::array<Spectrum, 4> les;
    std::array<std::vector<double>, 4> dissipation;
};

struct EnsembleSummary {
    std::vector<std::uint64_t> seeds;
    Spectrum dns;
    std::vector<GroupSummary> groups;

    const GroupSummary* find(const std::string& filter, std::size_t n_les) const {
        for (const auto& g : groups) {
            if (g.key.filter == filter && g.key.n_les == n_les) {
                return &g;
            }
        }
        return nullptr;
    }
};

namespace detail {

inline void accumulate(Spectrum& acc, const Spectrum& x) {
    if (acc.size() < x.size()) {
        acc.resize(x.size(), 0.0);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc[i] += x[i];
    }
}

inline void scale(Spectrum& s, double f) {
    for (auto& x : s) {
        x *= f;
    }
}

} // namespace detail

/// Averages final errors and spectra (on E(kappa)) over seeds and pools the
/// dissipation samples.
inline EnsembleSummary summarize(const std::vector<RunRecord>& records) {
    EnsembleSummary s;
    std::vector<GroupKey> keys;
    for (const auto& r : records) {
        s.seeds.push_back(r.seed);
        for (const auto& g : r.groups) {
            if (std::find(keys.begin(), keys.end(), g.key) == keys.end()) {
                keys.push_back(g.key);
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) {
        GroupSummary gs;
        gs.key = k;
        std::array<std::size_t, 4> count{};
        std::size_t nspec = 0;
        for (const auto& r : records) {
            for (const auto& g : r.groups) {
                if (!(g.key == k) || g.rows.empty()) {
                    continue;
                }
                ++nspec;
                detail::accumulate(gs.filtered, g.filtered);
                for (std::size_t c = 0; c < 4; ++c) {
                    const double e = g.rows.back().err[c];
                    if (std::isnan(e)) {
                        continue;
                    }
                    gs.present[c] = true;
                    gs.mean_error[c] += e;
                    gs.max_error[c] = std::max(gs.max_error[c], e);
                    ++count[c];
                    detail::accumulate(gs.les[c], g.les[c]);
                    gs.dissipation[c].insert(gs.dissipation[c].end(), g.dissipation[c].begin(),
                                             g.dissipation[c].end());
                }
            }
        }
        if (nspec > 0) {
            detail::scale(gs.filtered, 1.0 / static_cast<double>(nspec));
        }
        for (std::size_t c = 0; c < 4; ++c) {
            if (count[c] > 0) {
                gs.mean_error[c] /= static_cast<double>(count[c]);
                detail::scale(gs.les[c], 1.0 / static_cast<double>(count[c]));
            } else {
                gs.mean_error[c] = detail::nan;
                gs.max_error[c] = detail::nan;
            }
        }
        s.groups.push_back(std::move(gs));
    }
    for (const auto& r : records) {
        detail::accumulate(s.dns, r.dns);
    }
    if (!records.empty()) {
        detail::scale(s.dns, 1.0 / static_cast<double>(records.size()));
    }
    return s;
}

struct Table {
    std::string text;
    std::string csv;
};

/// Mean final relative errors, one row per (filter, N_les).
inline Table emit_table(const std::vector<RunRecord>& records) {
    const EnsembleSummary s = summarize(records);
    Table t;
    t.csv = "filter,N,no_model,classic,swap_sym,swap\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %6s %12s %12s %12s %12s\n", "filter", "N", "no-model", "classic", "swap-sym",
                  "swap");
    t.text = buf;
    for (const auto& g : s.groups) {
        t.csv += g.key.filter + "," + std::to_string(g.key.n_les);
        std::snprintf(buf, sizeof buf, "%-8s %6zu", g.key.filter.c_str(), g.key.n_les);
        t.text += buf;
        for (std::size_t c = 0; c < 4; ++c) {
            t.csv += "," + detail::format_real(g.mean_error[c]);
            if (g.present[c]) {
                std::snprintf(buf, sizeof buf, " %12.3e", g.mean_error[c]);
            } else {
                std::snprintf(buf, sizeof buf, " %12s", "-");
            }
            t.text += buf;
        }
        t.csv += "\n";
        t.text += "\n";
    }
    return t;
}

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("cannot write " + p.string());
    }
    os << s;
}

inline std::string spectrum_value(const Spectrum& s, std::size_t k) {
    return k < s.size() ? format_real(s[k]) : std::string();
}

} // namespace detail

inline std::string errors_csv(const std::vector<RunRecord>& records) {
    std::string out = "filter,n_les,seed,step,t,err_no_model,err_classic,err_swap_sym,err_swap\n";
    for (const auto& r : records) {
        for (const auto& g : r.groups) {
            for (const auto& row : g.rows) {
                out += g.key.filter + "," + std::to_string(g.key.n_les) + "," + std::to_string(r.seed) + "," +
                       std::to_string(row.step) + "," + detail::format_real(row.t);
                for (double e : row.err) {
                    out += "," + detail::format_real(e);
                }
                out += "\n";
            }
        }
    }
    return out;
}

inline std::string spectrum_csv(const std::vector<RunRecord>& records) {
    const EnsembleSummary s = summarize(records);
    std::string out;
    out += "# E(kappa) = 1/2 sum |u_hat(k)|^2 over integer mode vectors with kappa <= |k| < kappa + 1\n";
    out += "# u_hat: discrete Fourier coefficients divided by the number of points, so sum_kappa E = 1/2 <u.u>\n";
    out += "# final time, mean of E(kappa) over " + std::to_string(records.size()) + " seeds\n";
    out += "filter,n_les,kappa,E_ref,E_filtered,E_no_model,E_classic,E_swap_sym,E_swap\n";
    for (const auto& g : s.groups) {
        for (std::size_t k = 0; k < s.dns.size(); ++k) {
            out += g.key.filter + "," + std::to_string(g.key.n_les) + "," + std::to_string(k) + "," +
                   detail::spectrum_value(s.dns, k) + "," + detail::spectrum_value(g.filtered, k);
            for (const auto& les : g.les) {
                out += "," + detail::spectrum_value(les, k);
            }
            out += "\n";
        }
    }
    return out;
}

/// KDE of the final-time dissipation coefficients pooled over seeds.
inline std::string dissipation_csv(const std::vector<RunRecord>& records) {
    const EnsembleSummary s = summarize(records);
    std::string out = "filter,n_les,model,value,density,above_floor\n";
    for (const auto& g : s.groups) {
        for (std::size_t c = 0; c < 4; ++c) {
            if (!g.present[c] || g.dissipation[c].empty()) {
                continue;
            }
            const Kde d = kde(g.dissipation[c]);
            for (std::size_t i = 0; i < d.x.size(); ++i) {
                out += g.key.filter + "," + std::to_string(g.key.n_les) + "," + to_string(closure_columns[c]) + "," +
                       detail::format_real(d.x[i]) + "," + detail::format_real(d.density[i]) + "," +
                       (d.above_floor(i) ? "1" : "0") + "\n";
            }
        }
    }
    return out;
}

inline std::string turbulence_csv(const std::vector<RunRecord>& records) {
    std::string out = "seed,v_rms,eps,l_int,l_tay,t_int,t_tay,re_int,re_tay\n";
    for (const auto& r : records) {
        if (!r.warmup_stats) {
            continue;
        }
        const TurbStats& s = *r.warmup_stats;
        out += std::to_string(r.seed);
        for (double x : {s.v_rms, s.eps, s.l_int, s.l_tay, s.t_int, s.t_tay, s.re_int, s.re_tay}) {
            out += "," + detail::format_real(x);
        }
        out += "\n";
    }
    return out;
}

/// Writes config.txt, errors.csv, spectrum.csv, dissipation.csv, table.csv
/// and (ns3d) turbulence.csv into cfg.output_dir. Returns the written paths.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& cfg,
                                                        const std::vector<RunRecord>& records) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::vector<fs::path> out;
    auto put = [&](const std::string& name, const std::string& text) {
        out.push_back(dir / name);
        detail::write_text(out.back(), text);
    };
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
    put("config.txt", "# config hash " + std::string(hash) + "\n" + cfg.canonical());
    put("errors.csv", errors_csv(records));
    put("spectrum.csv", spectrum_csv(records));
    put("dissipation.csv", dissipation_csv(records));
    put("table.csv", emit_table(records).csv);
    if (cfg.experiment == Experiment::ns3d) {
        put("turbulence.csv", turbulence_csv(records));
    }
    return out;
}

} // namespace dles
