#include "hyp1d/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "hyp1d/dg.hpp"
#include "hyp1d/fv.hpp"
#include "hyp1d/grid.hpp"
#include "hyp1d/util.hpp"

namespace hyp1d {

using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Small file and text helpers.

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------
// Configuration JSON. The canonical form spells out every field in a fixed
// order; the experiment hash covers everything except the output block, so
// rerunning into a different directory reproduces identical artifacts.

ordered_json params_json(const ParamMap& p) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

ParamMap params_from(const ordered_json& j, const std::string& where) {
    ParamMap p;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number())
            throw std::invalid_argument("config: " + where + "." + k + " must be a number");
        p[k] = v.get<double>();
    }
    return p;
}

ordered_json config_json_core(const ExperimentConfig& cfg, bool with_output) {
    ordered_json j;
    j["schema_version"] = 1;
    j["name"] = cfg.name;
    j["system"] = {{"kind", cfg.system_kind}, {"params", params_json(cfg.system_params)}};
    j["flux"] = {{"kind", cfg.flux_kind}, {"params", params_json(cfg.flux_params)}};
    j["scheme"] = {{"kind", cfg.scheme},
                   {"degree", cfg.degree},
                   {"limiter", cfg.limiter},
                   {"limiter_m", cfg.limiter_m}};
    j["fixture"] = cfg.fixture;
    j["domain"] = {{"xmin", cfg.xmin}, {"xmax", cfg.xmax}, {"t_end", cfg.t_end}};
    j["resolution"] = {{"h", cfg.h_list},
                       {"safety", cfg.safety},
                       {"hull_inflation", cfg.hull_inflation}};
    j["sweep"] = {{"grid", cfg.sweep.grid},
                  {"shock_bump", cfg.sweep.shock_bump},
                  {"amplitude", cfg.sweep.amplitude}};
    j["thresholds"] = {{"k_osc", cfg.thresholds.k_osc},
                       {"m_tube", cfg.thresholds.m_tube},
                       {"c_wes", cfg.thresholds.c_wes},
                       {"tv_budget", cfg.thresholds.tv_budget},
                       {"jump_factor", cfg.thresholds.jump_factor},
                       {"min_lifetime", cfg.thresholds.min_lifetime},
                       {"rate_min", cfg.thresholds.rate_min}};
    if (with_output) j["output"] = {{"dir", cfg.output_dir}, {"snapshots", cfg.snapshots}};
    return j;
}

void expect_keys(const ordered_json& o, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : o.items()) {
        (void)v;
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown key '" + k + "' in " + where);
    }
}

template <class T>
T get_or(const ordered_json& o, const char* key, T fallback) {
    if (!o.contains(key)) return fallback;
    return o.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    expect_keys(j, "the top level",
                {"schema_version", "name", "system", "flux", "scheme", "fixture", "domain",
                 "resolution", "sweep", "thresholds", "output"});
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
        throw std::invalid_argument("config: unsupported schema_version");

    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(j, "name", cfg.name);

    if (!j.contains("system") || !j.at("system").contains("kind"))
        throw std::invalid_argument("config: system.kind is required");
    expect_keys(j.at("system"), "system", {"kind", "params"});
    cfg.system_kind = j.at("system").at("kind").get<std::string>();
    if (j.at("system").contains("params"))
        cfg.system_params = params_from(j.at("system").at("params"), "system.params");

    if (j.contains("flux")) {
        expect_keys(j.at("flux"), "flux", {"kind", "params"});
        cfg.flux_kind = get_or<std::string>(j.at("flux"), "kind", cfg.flux_kind);
        if (j.at("flux").contains("params"))
            cfg.flux_params = params_from(j.at("flux").at("params"), "flux.params");
    }

    if (j.contains("scheme")) {
        const ordered_json& s = j.at("scheme");
        expect_keys(s, "scheme", {"kind", "degree", "limiter", "limiter_m"});
        cfg.scheme = get_or<std::string>(s, "kind", cfg.scheme);
        cfg.degree = get_or<int>(s, "degree", cfg.degree);
        cfg.limiter = get_or<std::string>(s, "limiter", cfg.limiter);
        cfg.limiter_m = get_or<double>(s, "limiter_m", cfg.limiter_m);
    }

    if (!j.contains("fixture")) throw std::invalid_argument("config: fixture is required");
    cfg.fixture = j.at("fixture").get<std::string>();

    if (!j.contains("domain")) throw std::invalid_argument("config: domain is required");
    const ordered_json& d = j.at("domain");
    expect_keys(d, "domain", {"xmin", "xmax", "t_end"});
    cfg.xmin = get_or<double>(d, "xmin", cfg.xmin);
    cfg.xmax = get_or<double>(d, "xmax", cfg.xmax);
    cfg.t_end = get_or<double>(d, "t_end", cfg.t_end);

    if (!j.contains("resolution") || !j.at("resolution").contains("h"))
        throw std::invalid_argument("config: resolution.h is required");
    const ordered_json& r = j.at("resolution");
    expect_keys(r, "resolution", {"h", "safety", "hull_inflation"});
    cfg.h_list = r.at("h").get<std::vector<double>>();
    cfg.safety = get_or<double>(r, "safety", cfg.safety);
    cfg.hull_inflation = get_or<double>(r, "hull_inflation", cfg.hull_inflation);

    if (j.contains("sweep")) {
        const ordered_json& s = j.at("sweep");
        expect_keys(s, "sweep", {"grid", "shock_bump", "amplitude"});
        cfg.sweep.grid = get_or<int>(s, "grid", cfg.sweep.grid);
        cfg.sweep.shock_bump = get_or<bool>(s, "shock_bump", cfg.sweep.shock_bump);
        cfg.sweep.amplitude = get_or<double>(s, "amplitude", cfg.sweep.amplitude);
    }

    if (!j.contains("thresholds"))
        throw std::invalid_argument("config: thresholds block is required");
    const ordered_json& t = j.at("thresholds");
    expect_keys(t, "thresholds",
                {"k_osc", "m_tube", "c_wes", "tv_budget", "jump_factor", "min_lifetime",
                 "rate_min"});
    if (!t.contains("k_osc")) throw std::invalid_argument("config: thresholds.k_osc is required");
    if (!t.contains("tv_budget"))
        throw std::invalid_argument("config: thresholds.tv_budget is required");
    cfg.thresholds.k_osc = t.at("k_osc").get<double>();
    cfg.thresholds.tv_budget = t.at("tv_budget").get<double>();
    cfg.thresholds.m_tube = get_or<double>(t, "m_tube", cfg.thresholds.m_tube);
    cfg.thresholds.c_wes = get_or<double>(t, "c_wes", cfg.thresholds.c_wes);
    cfg.thresholds.jump_factor = get_or<double>(t, "jump_factor", cfg.thresholds.jump_factor);
    cfg.thresholds.min_lifetime = get_or<int>(t, "min_lifetime", cfg.thresholds.min_lifetime);
    cfg.thresholds.rate_min = get_or<double>(t, "rate_min", cfg.thresholds.rate_min);

    if (j.contains("output")) {
        const ordered_json& o = j.at("output");
        expect_keys(o, "output", {"dir", "snapshots"});
        cfg.output_dir = get_or<std::string>(o, "dir", cfg.output_dir);
        cfg.snapshots = get_or<int>(o, "snapshots", cfg.snapshots);
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return config_from_json(read_file(path));
}

std::string config_to_json(const ExperimentConfig& cfg) {
    return config_json_core(cfg, true).dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
    return hex16(fnv1a64(config_json_core(cfg, false).dump()));
}

void validate_config(const ExperimentConfig& cfg) {
    SystemPtr sys;
    try {
        sys = make_system(cfg.system_kind, cfg.system_params);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: system: ") + e.what());
    }
    try {
        make_flux(cfg.flux_kind, sys, cfg.flux_params);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: flux: ") + e.what());
    }
    if (cfg.scheme != "fv" && cfg.scheme != "rkdg2")
        throw std::invalid_argument("config: scheme.kind must be 'fv' or 'rkdg2'");
    if (cfg.scheme == "rkdg2") {
        if (cfg.degree < 1 || cfg.degree > 4)
            throw std::invalid_argument("config: scheme.degree must be in [1, 4]");
        ParamMap lp;
        if (cfg.limiter == "minmod_tvb") lp["m"] = cfg.limiter_m;
        try {
            make_limiter(cfg.limiter, lp);
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("config: limiter: ") + e.what());
        }
    }

    ExactSolution exact;
    try {
        exact = make_fixture(cfg.fixture, sys);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: fixture: ") + e.what());
    }

    if (!(cfg.xmax > cfg.xmin)) throw std::invalid_argument("config: domain.xmax must exceed xmin");
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("config: domain.t_end must be >= 0");
    if (cfg.t_end >= exact.t_max)
        throw std::invalid_argument(
            "config: domain.t_end reaches " + format_double(exact.t_max) +
            ", where the fixture '" + cfg.fixture + "' stops being the entropy solution");

    if (cfg.h_list.empty()) throw std::invalid_argument("config: resolution.h must be nonempty");
    const double width = cfg.xmax - cfg.xmin;
    double prev = std::numeric_limits<double>::infinity();
    for (double h : cfg.h_list) {
        if (!(h > 0.0)) throw std::invalid_argument("config: resolution.h entries must be > 0");
        if (!(h < prev))
            throw std::invalid_argument("config: resolution.h must be strictly decreasing");
        prev = h;
        const double cells = width / h;
        if (std::abs(cells - std::llround(cells)) > 1e-6)
            throw std::invalid_argument("config: h = " + format_double(h) +
                                        " does not divide the domain width");
        if (std::llround(cells) < 4)
            throw std::invalid_argument("config: h = " + format_double(h) +
                                        " leaves fewer than 4 cells");
    }
    if (!(cfg.safety > 0.0 && cfg.safety <= 1.0))
        throw std::invalid_argument("config: resolution.safety must be in (0, 1]");
    if (!(cfg.hull_inflation >= 1.0))
        throw std::invalid_argument("config: resolution.hull_inflation must be >= 1");

    if (cfg.sweep.grid < 0) throw std::invalid_argument("config: sweep.grid must be >= 0");
    if (!(cfg.sweep.amplitude > 0.0))
        throw std::invalid_argument("config: sweep.amplitude must be > 0");

    const ThresholdSpec& th = cfg.thresholds;
    if (!(th.k_osc > 0.0)) throw std::invalid_argument("config: thresholds.k_osc must be > 0");
    if (!(th.m_tube > 0.0)) throw std::invalid_argument("config: thresholds.m_tube must be > 0");
    if (!(th.c_wes > 0.0)) throw std::invalid_argument("config: thresholds.c_wes must be > 0");
    if (!(th.tv_budget > 0.0))
        throw std::invalid_argument("config: thresholds.tv_budget must be > 0");
    if (!(th.jump_factor > 0.0))
        throw std::invalid_argument("config: thresholds.jump_factor must be > 0");
    if (th.min_lifetime < 1)
        throw std::invalid_argument("config: thresholds.min_lifetime must be >= 1");
    if (!(th.rate_min > 0.0)) throw std::invalid_argument("config: thresholds.rate_min must be > 0");
    if (cfg.snapshots < 0) throw std::invalid_argument("config: output.snapshots must be >= 0");
}

// ---------------------------------------------------------------------------
// Fixtures.

namespace {

double bump_profile(double x, double c, double r) {
    const double s = (x - c) / r;
    if (!(std::abs(s) < 1.0)) return 0.0;
    const double w = 1.0 - s * s;
    return w * w;
}

}  // namespace

const std::vector<FixtureInfo>& fixture_registry() {
    static const std::vector<FixtureInfo> reg = {
        {"burgers_step", "burgers", "single_shock", "unit step 1 -> 0 at x = 0, speed 1/2"},
        {"burgers_merging_pair", "burgers", "two_shock",
         "steps 1 -> 1/2 -> 0 at -1/2 and 1/2; fronts meet at t = 2"},
        {"sw_dam_shock", "shallow_water", "single_shock",
         "slow-family shock from still depth 2 into depth 3, moving left"},
        {"sw_bore", "shallow_water", "single_shock",
         "fast-family bore from depth 1.2 into still depth 1, moving right"},
        {"ie_compression", "isothermal_euler", "single_shock",
         "slow-family compression from rest density 1 to density 2"},
        {"linear2_contact", "linear2", "contact",
         "jump along the speed-+1 characteristic of the symmetric coupling"},
        {"linear2_smooth", "linear2", "smooth",
         "two offset quartic bumps transported along both characteristics"},
    };
    return reg;
}

ExactSolution make_fixture(const std::string& id, const SystemPtr& sys) {
    const FixtureInfo* info = nullptr;
    for (const FixtureInfo& f : fixture_registry())
        if (f.id == id) info = &f;
    if (info == nullptr) throw std::invalid_argument("unknown fixture '" + id + "'");
    if (sys == nullptr) throw std::invalid_argument("make_fixture: null system");
    if (sys->name() != info->system)
        throw std::invalid_argument("fixture '" + id + "' needs system '" + info->system +
                                    "', got '" + sys->name() + "'");

    if (id == "burgers_step") return make_single_shock(sys, Vec{1.0}, Vec{0.0});
    if (id == "burgers_merging_pair")
        return make_two_shock(sys, Vec{1.0}, Vec{0.5}, Vec{0.0}, -0.5, 0.5);
    if (id == "sw_dam_shock") {
        const Vec ul{2.0, 0.0};
        return make_single_shock(sys, ul, hugoniot_state(*sys, ul, 3.0, 1));
    }
    if (id == "sw_bore") {
        const Vec dn{1.0, 0.0};
        return make_single_shock(sys, hugoniot_state(*sys, dn, 1.2, 2), dn);
    }
    if (id == "ie_compression") {
        const Vec ul{1.0, 0.0};
        return make_single_shock(sys, ul, hugoniot_state(*sys, ul, 2.0, 1));
    }
    if (id == "linear2_contact") return make_contact(sys, Vec{0.0, 0.0}, Vec{0.5, 0.5});
    // linear2_smooth
    return make_smooth_linear(sys, [](double x) {
        return Vec{bump_profile(x, -0.3, 0.35), 0.5 * bump_profile(x, 0.3, 0.35)};
    });
}

// ---------------------------------------------------------------------------
// Test function sweep: a grid x grid lattice of bumps over (0, T) x (xmin,
// xmax) plus one riding on the first discontinuity. Radii are a shade under
// the lattice spacing so supports stay strictly inside the window.

namespace {

std::vector<TestFunction> build_sweep(const ExperimentConfig& cfg, const ExactSolution& exact) {
    std::vector<TestFunction> phis;
    const double T = cfg.t_end;
    if (!(T > 0.0)) return phis;
    const double W = cfg.xmax - cfg.xmin;
    const int g = cfg.sweep.grid;
    const double shrink = 0.9375;  // 15/16
    if (g > 0) {
        const double rt = shrink * T / (g + 3);
        const double rx = shrink * W / (g + 3);
        for (int i = 0; i < g; ++i) {
            const double tc = T * (i + 1) / (g + 1);
            for (int j = 0; j < g; ++j) {
                const double xc = cfg.xmin + W * (j + 1) / (g + 1);
                phis.push_back(make_bump(tc, xc, rt, rx, cfg.sweep.amplitude));
            }
        }
    }
    if (cfg.sweep.shock_bump && !exact.discontinuities.empty()) {
        const double tc = T / 2;
        const double xc = exact.discontinuities.front().position(tc);
        const double margin = std::min(xc - cfg.xmin, cfg.xmax - xc);
        if (margin > W / 64) {
            const double rt = shrink * T / (g + 3);
            const double rx = shrink * std::min(W / (g + 3), margin);
            phis.push_back(make_bump(tc, xc, rt, rx, cfg.sweep.amplitude));
        }
    }
    return phis;
}

// ---------------------------------------------------------------------------
// Streaming certification. Levels arrive one at a time from the run
// callback; prefix sums of the residual step terms plus stored boundary
// terms reproduce the residual of any level window via the telescoping
// identity in cert.hpp. Windows follow the binary hierarchy over [0, N]:
// every adjacent pair, every dyadic pair, and the full range. BV candidates
// near detected fronts are deferred until the curves are final, so the
// violation set matches bv_certificate bit for bit; everything else mirrors
// the stored-trajectory readers term by term.

struct Snapshots {
    std::string dir;          // empty: disabled
    std::vector<int> levels;  // sorted, unique
    std::string hash_line;

    bool wants(int k) const {
        return !dir.empty() && std::binary_search(levels.begin(), levels.end(), k);
    }
};

template <class Field>
class StreamCert {
public:
    StreamCert(const System& sys, const NumericalFlux& flux, std::vector<TestFunction> phis,
               const Grid1D& grid, int n_steps, double tau, Vec pad_left, Vec pad_right,
               const ThresholdSpec& th, Snapshots snaps)
        : sys_(sys),
          flux_(flux),
          phis_(std::move(phis)),
          grid_(grid),
          n_(n_steps),
          tau_(tau),
          pl_(std::move(pad_left)),
          pr_(std::move(pad_right)),
          th_(th),
          snaps_(std::move(snaps)),
          tracker_(grid, th.jump_factor, th.min_lifetime) {
        const std::size_t k = phis_.size();
        const std::size_t levels = static_cast<std::size_t>(n_) + 1;
        wc_prefix_.assign(k, std::vector<Vec>(levels, Vec(sys.dim())));
        wc_bound_.assign(k, std::vector<Vec>(levels, Vec(sys.dim())));
        wes_prefix_.assign(k, std::vector<double>(levels, 0.0));
        wes_bound_.assign(k, std::vector<double>(levels, 0.0));
    }

    void on_level(int k, const Field& u) {
        const double t0 = k * tau_;
        const double t1 = (k + 1) * tau_;

        const std::vector<double> osc = oscillation_profile(u, pl_, pr_);
        tracker_.feed(t0, osc);
        if (n_ > 0) scan_bv(k, osc);

        for (std::size_t i = 0; i < phis_.size(); ++i) {
            const TestFunction& phi = phis_[i];
            if (k < n_) {
                // a step tile strictly outside the support integrates to an
                // exact zero, so carrying the prefix forward loses nothing
                if (phi.box.t_hi < t0 || phi.box.t_lo > t1) {
                    wc_prefix_[i][static_cast<std::size_t>(k) + 1] =
                        wc_prefix_[i][static_cast<std::size_t>(k)];
                    wes_prefix_[i][static_cast<std::size_t>(k) + 1] =
                        wes_prefix_[i][static_cast<std::size_t>(k)];
                } else {
                    wc_prefix_[i][static_cast<std::size_t>(k) + 1] =
                        wc_prefix_[i][static_cast<std::size_t>(k)] +
                        wc_step_term(sys_, u, phi, t0, t1);
                    wes_prefix_[i][static_cast<std::size_t>(k) + 1] =
                        wes_prefix_[i][static_cast<std::size_t>(k)] +
                        wes_step_term(sys_, u, phi, t0, t1);
                }
            }
            if (!(t0 < phi.box.t_lo || t0 > phi.box.t_hi)) {
                wc_bound_[i][static_cast<std::size_t>(k)] = wc_boundary_term(u, phi, t0);
                wes_bound_[i][static_cast<std::size_t>(k)] = wes_boundary_term(sys_, u, phi, t0);
            }
        }

        if (k == 0) {
            first_ = std::make_unique<Field>(u);
            q_identity_ = face_identity_gap(u);
        } else {
            lc_l1_.push_back(l1_distance(u, *prev_));
        }
        prev_ = std::make_unique<Field>(u);
        if (k == n_) last_ = std::make_unique<Field>(u);

        if (snaps_.wants(k)) {
            char name[32];
            std::snprintf(name, sizeof name, "level_%06d.csv", k);
            write_file(snaps_.dir + "/" + name, snaps_.hash_line + snapshot_csv(u));
        }
    }

    // ---- post-run assembly -------------------------------------------------

    void finalize(const std::vector<double>& tv, double max_speed, double flux_lip,
                  RunResult& out) {
        out.sweep_size = static_cast<int>(phis_.size());

        // Lipschitz certificate: worst quotient over adjacent level pairs,
        // each computed exactly as lc_constant(k, k + 1) would.
        out.lc = 0.0;
        for (int k = 0; k < n_; ++k) {
            const double num = lc_l1_[static_cast<std::size_t>(k)];
            const double sup =
                std::max(tv[static_cast<std::size_t>(k)], tv[static_cast<std::size_t>(k) + 1]);
            if (sup == 0.0) {
                if (num > 0.0)
                    throw std::logic_error(
                        "certification: levels moved while both have zero variation; a "
                        "conservative scheme cannot do this (L1 change = " +
                        format_double(num) + ")");
                continue;
            }
            const double q = num / (((k + 1) * tau_ - k * tau_) * sup);
            if (q > out.lc) out.lc = q;
        }
        out.lc_bound = 2.0 * flux_lip;
        out.lc_pass = out.lc <= out.lc_bound;

        // Shock curves, then the deferred BV candidates.
        out.curves = tracker_.finish(max_speed * tau_ + grid_.h);
        finish_bv(tv, out);

        // Consistency and entropy residuals over the window hierarchy.
        out.wc_residual = 0.0;
        out.wc_normalized = 0.0;
        out.wes_signed = 0.0;
        out.wes_normalized = 0.0;
        out.wes_pass = true;
        out.wes_worst = WindowStat{};
        double worst_margin = std::numeric_limits<double>::infinity();
        if (n_ > 0)
            for (std::size_t i = 0; i < phis_.size(); ++i)
                walk_windows(static_cast<int>(i), 0, n_, tv, worst_margin, out);
        out.entropy_flux_identity = q_identity_;
    }

    const Field& first() const { return *first_; }
    const Field& last() const { return *last_; }

private:
    void scan_bv(int level, const std::vector<double>& osc) {
        const double tube = th_.m_tube * tracker_.tube_radius();
        const double budget = th_.k_osc * grid_.h;
        const std::vector<double>& fronts = tracker_.last_fronts();
        for (int j = 0; j < grid_.cells; ++j) {
            const double xj = grid_.center(j);
            double dist = std::numeric_limits<double>::infinity();
            for (double p : fronts) dist = std::min(dist, std::abs(xj - p));
            const double o = osc[static_cast<std::size_t>(j)];
            if (dist <= tube) {
                // near a front: whether the final curves cover this cell is
                // known only after linking, so park the value
                if (deferred_.size() >= kDeferredCap)
                    throw std::runtime_error(
                        "bv candidate storage exceeded at level " + std::to_string(level) +
                        "; the run oscillates too much to certify");
                deferred_.push_back({level, j, o});
            } else {
                // farther from every front than from any curve the fronts
                // could form: certainly outside the final tubes
                if (o > omax_) omax_ = o;
                if (o > budget) direct_.push_back({level, j, o, budget});
            }
        }
    }

    void finish_bv(const std::vector<double>& tv, RunResult& out) {
        BvReport& rep = out.bv;
        rep.sup_tv = 0.0;
        for (double v : tv) rep.sup_tv = std::max(rep.sup_tv, v);
        rep.tv_ok = rep.sup_tv <= th_.tv_budget;
        rep.max_outside_osc = omax_;
        rep.violations = std::move(direct_);
        if (n_ == 0) {  // nothing evolved; only the variation is checked
            rep.max_outside_osc = 0.0;
            rep.violations.clear();
            return;
        }
        const double tube = th_.m_tube * out.curves.tube_radius;
        const double budget = th_.k_osc * grid_.h;
        for (const DeferredCell& c : deferred_) {
            const double tn = c.level * tau_;
            const double xj = grid_.center(c.cell);
            double dist = std::numeric_limits<double>::infinity();
            for (const ShockCurve& curve : out.curves.curves)
                if (!curve.t.empty() && curve.alive(tn))
                    dist = std::min(dist, std::abs(xj - curve.position(tn)));
            if (dist <= tube) continue;
            rep.max_outside_osc = std::max(rep.max_outside_osc, c.value);
            if (c.value > budget) rep.violations.push_back({c.level, c.cell, c.value, budget});
        }
        std::sort(rep.violations.begin(), rep.violations.end(),
                  [](const BvViolation& a, const BvViolation& b) {
                      if (a.level != b.level) return a.level < b.level;
                      return a.cell < b.cell;
                  });
    }

    Vec window_wc(int i, int n, int m) const {
        const auto& P = wc_prefix_[static_cast<std::size_t>(i)];
        const auto& B = wc_bound_[static_cast<std::size_t>(i)];
        return (P[static_cast<std::size_t>(m)] - P[static_cast<std::size_t>(n)]) +
               (B[static_cast<std::size_t>(n)] - B[static_cast<std::size_t>(m)]);
    }

    double window_wes(int i, int n, int m) const {
        const auto& P = wes_prefix_[static_cast<std::size_t>(i)];
        const auto& B = wes_bound_[static_cast<std::size_t>(i)];
        return (P[static_cast<std::size_t>(m)] - P[static_cast<std::size_t>(n)]) +
               (B[static_cast<std::size_t>(n)] - B[static_cast<std::size_t>(m)]);
    }

    // Visits every window of the binary hierarchy over [n, m], accumulating
    // the residual extremes into out, and returns sup TV over the window's
    // levels so parents reuse the children's scans.
    double walk_windows(int i, int n, int m, const std::vector<double>& tv, double& worst_margin,
                        RunResult& out) {
        double sup;
        if (m - n <= 1) {
            sup = std::max(tv[static_cast<std::size_t>(n)], tv[static_cast<std::size_t>(m)]);
        } else {
            const int mid = n + (m - n) / 2;
            sup = std::max(walk_windows(i, n, mid, tv, worst_margin, out),
                           walk_windows(i, mid, m, tv, worst_margin, out));
        }
        const double dt = m * tau_ - n * tau_;
        const double denom = phis_[static_cast<std::size_t>(i)].w1inf_norm * dt * sup;

        const double raw = window_wc(i, n, m).norm_inf();
        const double rn = denom > 0.0 ? raw / denom : raw;
        if (raw > out.wc_residual) out.wc_residual = raw;
        if (rn > out.wc_normalized) out.wc_normalized = rn;

        const double s = window_wes(i, n, m);
        const double sn = denom > 0.0 ? s / denom : s;
        if (s < out.wes_signed) {
            out.wes_signed = s;
            out.wes_normalized = sn;
        }
        bool ok;
        double margin;
        if (denom > 0.0) {
            const double slack = th_.c_wes * grid_.h * denom;
            margin = s + slack;
            ok = s >= -slack;
        } else {
            margin = s;
            ok = s >= -1e-10;
        }
        if (!ok) out.wes_pass = false;
        if (margin < worst_margin) {
            worst_margin = margin;
            out.wes_worst = WindowStat{n, m, i, s, denom, sn};
        }
        return sup;
    }

    double face_identity_gap(const PCField& u) const {
        // pads equal the end cells at level 0, so interior faces cover every
        // distinct pair
        double gap = 0.0;
        for (int j = 0; j + 1 < grid_.cells; ++j)
            gap = std::max(gap, identity_gap_pair(u.value(j), u.value(j + 1)));
        return gap;
    }

    double face_identity_gap(const DGField& u) const {
        double gap = 0.0;
        for (int j = 0; j + 1 < grid_.cells; ++j)
            gap = std::max(gap, identity_gap_pair(u.trace_right(j), u.trace_left(j + 1)));
        return gap;
    }

    double identity_gap_pair(const Vec& a, const Vec& b) const {
        bool same = true;
        for (int c = 0; c < a.size(); ++c)
            if (a[c] != b[c]) same = false;
        if (same) return 0.0;
        const Vec va = sys_.entropy_gradient(a);
        const Vec vb = sys_.entropy_gradient(b);
        const double qr = numerical_entropy_flux(flux_, va, vb, EntropyFluxSide::right);
        const double ql = numerical_entropy_flux(flux_, va, vb, EntropyFluxSide::left);
        return std::abs(qr - ql);
    }

    static constexpr std::size_t kDeferredCap = 8u << 20;

    struct DeferredCell {
        int level = 0;
        int cell = 0;
        double value = 0.0;
    };

    const System& sys_;
    const NumericalFlux& flux_;
    std::vector<TestFunction> phis_;
    Grid1D grid_;
    int n_ = 0;
    double tau_ = 0.0;
    Vec pl_, pr_;
    ThresholdSpec th_;
    Snapshots snaps_;

    ShockTracker tracker_;
    std::vector<std::vector<Vec>> wc_prefix_;
    std::vector<std::vector<Vec>> wc_bound_;
    std::vector<std::vector<double>> wes_prefix_;
    std::vector<std::vector<double>> wes_bound_;
    std::vector<BvViolation> direct_;
    std::vector<DeferredCell> deferred_;
    double omax_ = 0.0;
    std::vector<double> lc_l1_;
    std::unique_ptr<Field> first_, prev_, last_;
    double q_identity_ = 0.0;
};

// ---------------------------------------------------------------------------
// Experiment pipeline pieces shared by run, study, and flux check.

struct Problem {
    SystemPtr sys;
    FluxPtr flux;
    ExactSolution exact;
    Box hull;
    CFLParams cfl;
};

Problem setup_problem(const ExperimentConfig& cfg) {
    Problem p;
    p.sys = make_system(cfg.system_kind, cfg.system_params);
    p.flux = make_flux(cfg.flux_kind, p.sys, cfg.flux_params);
    p.exact = make_fixture(cfg.fixture, p.sys);

    // State hull from the initial datum, sampled finely enough to catch the
    // extremes of smooth profiles; runs stay inside after inflation.
    std::vector<Vec> states;
    const int n_samples = 2048;
    states.reserve(static_cast<std::size_t>(n_samples) + 1);
    for (int i = 0; i <= n_samples; ++i) {
        const double x = cfg.xmin + (cfg.xmax - cfg.xmin) * i / n_samples;
        states.push_back(p.exact.eval(0.0, x));
    }
    p.hull = Box::covering(states).inflated(cfg.hull_inflation);
    p.cfl = estimate_cfl_params(*p.flux, p.hull, 1000, 20240501, cfg.safety);
    return p;
}

std::vector<int> snapshot_levels(int n_steps, int count) {
    std::vector<int> idx;
    if (count <= 0) return idx;
    if (count == 1 || n_steps == 0) return {n_steps};
    for (int i = 0; i < count; ++i)
        idx.push_back(
            static_cast<int>(std::llround(static_cast<double>(i) * n_steps / (count - 1))));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

// Trace states of a modal field laid out as a twice-as-fine piecewise
// constant field, so the flux Lipschitz scan sees both the face jumps and
// the in-cell spread.
PCField trace_field(const DGField& u) {
    const Grid1D& g = u.grid();
    PCField tf(Grid1D(g.xmin, g.xmax, 2 * g.cells), u.dim());
    for (int j = 0; j < g.cells; ++j) {
        tf.set(2 * j, u.trace_left(j));
        tf.set(2 * j + 1, u.trace_right(j));
    }
    return tf;
}

RunResult run_single(const ExperimentConfig& cfg, double h, const std::string& out_dir,
                     bool with_snapshots) {
    const Problem p = setup_problem(cfg);
    const int dim = p.sys->dim();
    const double width = cfg.xmax - cfg.xmin;
    const int cells = static_cast<int>(std::llround(width / h));
    const Grid1D grid(cfg.xmin, cfg.xmax, cells);

    const TimestepBound bound = cfg.scheme == "fv" ? cfl_timestep(p.cfl, grid.h)
                                                   : dg_timestep(p.cfl, grid.h, cfg.degree);
    double tau = bound.tau;
    int n_steps = 0;
    if (cfg.t_end > 0.0) {
        const RunLength rl = steps_for_time(bound.tau, cfg.t_end);
        tau = rl.tau;
        n_steps = rl.n_steps;
    }

    RunResult out;
    out.h = grid.h;
    out.cells = cells;
    out.tau = tau;
    out.steps = n_steps;
    out.cfl_margin = tau / bound.tau;

    Snapshots snaps;
    if (with_snapshots && !out_dir.empty() && cfg.snapshots > 0) {
        snaps.dir = out_dir + "/snapshots";
        std::filesystem::create_directories(snaps.dir);
        snaps.levels = snapshot_levels(n_steps, cfg.snapshots);
        snaps.hash_line = "# config " + config_hash(cfg) + "\n";
    }

    std::vector<TestFunction> phis = build_sweep(cfg, p.exact);
    auto eval0 = [&](double x) { return p.exact.eval(0.0, x); };
    const double T = n_steps * tau;

    if (cfg.scheme == "fv") {
        const PCField u0 = project_means(grid, dim, eval0);
        const Vec pl = u0.value(0), pr = u0.value(cells - 1);
        StreamCert<PCField> cert(*p.sys, *p.flux, std::move(phis), grid, n_steps, tau, pl, pr,
                                 cfg.thresholds, std::move(snaps));
        FvRunOptions opt;
        opt.store_levels = false;
        opt.tv_bound = cfg.thresholds.tv_budget;
        opt.on_level = [&](int level, const PCField& u) { cert.on_level(level, u); };
        const Trajectory traj = fv_run(*p.flux, u0, tau, n_steps, opt);

        const double lip = std::max(flux_lipschitz_bound(*p.flux, cert.first(), pl, pr),
                                    flux_lipschitz_bound(*p.flux, cert.last(), pl, pr));
        cert.finalize(traj.tv, traj.max_speed(), lip, out);
        out.l1_error = l1_distance(
            cert.last(), [&](double x) { return p.exact.eval(T, x); }, p.exact.breakpoints(T));
    } else {
        const DGField u0 = l2_project(grid, dim, cfg.degree, eval0);
        const Vec pl = u0.mean(0), pr = u0.mean(cells - 1);
        ParamMap lp;
        if (cfg.limiter == "minmod_tvb") lp["m"] = cfg.limiter_m;
        const LimiterPtr lim = make_limiter(cfg.limiter, lp);
        StreamCert<DGField> cert(*p.sys, *p.flux, std::move(phis), grid, n_steps, tau, pl, pr,
                                 cfg.thresholds, std::move(snaps));
        DgRunOptions opt;
        opt.store_levels = false;
        opt.tv_bound = cfg.thresholds.tv_budget;
        opt.on_level = [&](int level, const DGField& u) { cert.on_level(level, u); };
        const DgTrajectory traj = dg_run(*p.flux, *lim, u0, tau, n_steps, opt);

        const PCField tf0 = trace_field(cert.first());
        const PCField tf1 = trace_field(cert.last());
        const double lip = std::max(flux_lipschitz_bound(*p.flux, tf0, pl, pr),
                                    flux_lipschitz_bound(*p.flux, tf1, pl, pr));
        cert.finalize(traj.tv, traj.max_speed(), lip, out);
        out.l1_error = l1_distance(
            cert.last(), [&](double x) { return p.exact.eval(T, x); }, p.exact.breakpoints(T));
    }
    return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, double h) {
    validate_config(cfg);
    const std::string dir = cfg.output_dir;
    if (!dir.empty()) std::filesystem::create_directories(dir);
    RunResult r = run_single(cfg, h, dir, true);
    if (!dir.empty()) {
        write_file(dir + "/meta.json", meta_json(cfg));
        write_file(dir + "/report.json", run_report_json(cfg, r));
        write_file(dir + "/violations.csv",
                   "# config " + config_hash(cfg) + "\n" +
                       violations_csv(r.bv.violations, Grid1D(cfg.xmin, cfg.xmax, r.cells),
                                      r.tau));
    }
    return r;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.h_list.empty()) throw std::invalid_argument("config: resolution.h must be nonempty");
    return run_experiment(cfg, cfg.h_list.front());
}

RunResult certify_directory(const std::string& dir) {
    const ordered_json meta = ordered_json::parse(read_file(dir + "/meta.json"));
    if (!meta.contains("config"))
        throw std::invalid_argument(dir + "/meta.json has no embedded config");
    const ExperimentConfig cfg = config_from_json(meta.at("config").dump());
    RunResult r = run_single(cfg, cfg.h_list.front(), dir, false);
    write_file(dir + "/report.json", run_report_json(cfg, r));
    write_file(dir + "/violations.csv",
               "# config " + config_hash(cfg) + "\n" +
                   violations_csv(r.bv.violations, Grid1D(cfg.xmin, cfg.xmax, r.cells), r.tau));
    return r;
}

// ---------------------------------------------------------------------------
// Convergence study.

RateTable convergence_study(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.h_list.size() < 4)
        throw std::invalid_argument("config: a convergence study needs at least 4 mesh sizes");
    RateTable table;
    for (double h : cfg.h_list) {
        try {
            const RunResult r = run_single(cfg, h, "", false);
            RateRow row;
            row.h = r.h;
            row.tau = r.tau;
            row.l1_error = r.l1_error;
            row.wc_normalized = r.wc_normalized;
            row.wes_normalized = r.wes_normalized;
            row.sup_tv = r.bv.sup_tv;
            row.bv_pass = r.bv.pass();
            row.cert_pass = r.pass();
            table.rows.push_back(row);
        } catch (const std::exception& e) {
            table.error = "h = " + format_double(h) + ": " + e.what();
            break;
        }
    }
    table.complete = table.rows.size() == cfg.h_list.size();

    // least-squares slope of log error against log h
    int n = 0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const RateRow& row : table.rows) {
        if (!(row.l1_error > 0.0)) continue;
        const double x = std::log(row.h), y = std::log(row.l1_error);
        ++n;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    if (n >= 2) {
        const double det = n * sxx - sx * sx;
        if (det > 0.0) table.rate = (n * sxy - sx * sy) / det;
    }

    bool all_cert = true;
    for (const RateRow& row : table.rows) all_cert = all_cert && row.cert_pass;
    table.pass = table.complete && all_cert && !table.rows.empty() &&
                 table.rate >= cfg.thresholds.rate_min;

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        write_file(cfg.output_dir + "/meta.json", meta_json(cfg));
        write_file(cfg.output_dir + "/rates.csv", rates_csv(cfg, table));
        write_file(cfg.output_dir + "/report.json", study_report_json(cfg, table));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Flux audit.

FluxCheckReport flux_check(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const Problem p = setup_problem(cfg);
    const int dim = p.sys->dim();

    Rng rng(914237);
    auto sample = [&] {
        Vec u(dim);
        for (int c = 0; c < dim; ++c) u[c] = rng.uniform(p.hull.lo[c], p.hull.hi[c]);
        return u;
    };

    std::vector<Vec> states;
    for (int mask = 0; mask < p.hull.corner_count(); ++mask)
        states.push_back(p.hull.corner(mask));
    for (int i = 0; i < 64; ++i) states.push_back(sample());

    std::vector<std::pair<Vec, Vec>> pairs;
    for (int i = 0; i < 100; ++i) {
        Vec a = sample();
        Vec b = sample();
        pairs.emplace_back(std::move(a), std::move(b));
    }

    std::vector<std::array<Vec, 4>> tuples;
    for (int i = 0; i < 32; ++i) {
        std::array<Vec, 4> t;
        for (Vec& u : t) u = sample();
        tuples.push_back(std::move(t));
    }

    FluxCheckReport rep;
    rep.consistency = check_consistency(*p.flux, states);
    rep.jacobian_error = check_flux_jacobians(*p.flux, tuples);
    rep.second_order = check_second_order_consistency(*p.flux, pairs);
    rep.monotonicity = check_monotonicity(*p.flux, pairs);

    for (const auto& [a, b] : pairs) {
        const Vec va = p.sys->entropy_gradient(a);
        const Vec vb = p.sys->entropy_gradient(b);
        const double qr = numerical_entropy_flux(*p.flux, va, vb, EntropyFluxSide::right);
        const double ql = numerical_entropy_flux(*p.flux, va, vb, EntropyFluxSide::left);
        rep.entropy_flux_identity = std::max(rep.entropy_flux_identity, std::abs(qr - ql));
    }

    // Definiteness of the splitting over the hull: the sharp timestep bound
    // needs the frozen Jacobian spectra bounded away from zero on both sides.
    rep.dissipation_min = std::min(p.cfl.flux_min_left, p.cfl.flux_min_right);
    rep.dissipation_max = std::max(p.cfl.flux_max_left, p.cfl.flux_max_right);
    const double tol_semi = 1e-8 * std::max(1.0, rep.dissipation_max);
    const bool monotone = rep.monotonicity.min_left_eig >= -tol_semi &&
                          rep.monotonicity.max_right_eig <= tol_semi;
    if (!monotone)
        rep.classification = "indefinite";
    else if (rep.dissipation_min > 1e-6 * std::max(1.0, rep.dissipation_max))
        rep.classification = "definite";
    else
        rep.classification = "semidefinite";

    rep.pass = rep.consistency <= 1e-10 && rep.jacobian_error <= 1e-5 &&
               rep.second_order <= 1e-8 && rep.monotonicity.asymmetry <= 1e-8 &&
               rep.entropy_flux_identity <= 1e-8 && rep.classification == "definite";
    return rep;
}

// ---------------------------------------------------------------------------
// Artifact text.

std::string meta_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "meta";
    j["config_hash"] = config_hash(cfg);
    j["config"] = config_json_core(cfg, true);
    return j.dump(2) + "\n";
}

std::string run_report_json(const ExperimentConfig& cfg, const RunResult& r) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "run";
    j["name"] = cfg.name;
    j["config_hash"] = config_hash(cfg);
    j["system"] = cfg.system_kind;
    j["flux"] = cfg.flux_kind;
    j["scheme"] = cfg.scheme == "fv" ? cfg.scheme : cfg.scheme + "/p" + std::to_string(cfg.degree);
    j["fixture"] = cfg.fixture;
    j["grid"] = {{"h", r.h}, {"cells", r.cells}, {"tau", r.tau}, {"steps", r.steps}};
    j["l1_error"] = r.l1_error;
    j["sweep_size"] = r.sweep_size;

    ordered_json c;
    c["lc"] = {{"constant", r.lc}, {"bound", r.lc_bound}, {"pass", r.lc_pass}};
    c["wc"] = {{"residual", r.wc_residual}, {"normalized", r.wc_normalized}};
    c["wes"] = {{"signed", r.wes_signed},
                {"normalized", r.wes_normalized},
                {"worst_window",
                 {{"from", r.wes_worst.n},
                  {"to", r.wes_worst.m},
                  {"bump", r.wes_worst.phi},
                  {"signed", r.wes_worst.signed_value},
                  {"denominator", r.wes_worst.denominator},
                  {"normalized", r.wes_worst.normalized}}},
                {"pass", r.wes_pass}};
    c["entropy_flux"] = {{"identity_gap", r.entropy_flux_identity}};
    c["bv"] = {{"sup_tv", r.bv.sup_tv},
               {"tv_budget", cfg.thresholds.tv_budget},
               {"tv_ok", r.bv.tv_ok},
               {"max_outside_oscillation", r.bv.max_outside_osc},
               {"flagged_cells", r.bv.violations.size()},
               {"pass", r.bv.pass()}};
    c["cfl"] = {{"margin", r.cfl_margin}};
    j["certificates"] = c;

    ordered_json curves = ordered_json::array();
    for (const ShockCurve& curve : r.curves.curves)
        curves.push_back({{"t_begin", curve.t_begin()},
                          {"t_end", curve.t_end()},
                          {"slope", curve.slope()},
                          {"lipschitz", curve.lipschitz},
                          {"nodes", curve.t.size()}});
    j["curves"] = curves;
    j["tube_radius"] = r.curves.tube_radius;
    j["pass"] = r.pass();
    return j.dump(2) + "\n";
}

std::string study_report_json(const ExperimentConfig& cfg, const RateTable& t) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "study";
    j["name"] = cfg.name;
    j["config_hash"] = config_hash(cfg);
    ordered_json rows = ordered_json::array();
    for (const RateRow& row : t.rows)
        rows.push_back({{"h", row.h},
                        {"tau", row.tau},
                        {"l1_error", row.l1_error},
                        {"wc_normalized", row.wc_normalized},
                        {"wes_normalized", row.wes_normalized},
                        {"sup_tv", row.sup_tv},
                        {"bv_pass", row.bv_pass},
                        {"cert_pass", row.cert_pass}});
    j["rows"] = rows;
    j["rate"] = t.rate;
    j["rate_min"] = cfg.thresholds.rate_min;
    j["complete"] = t.complete;
    j["pass"] = t.pass;
    if (!t.error.empty()) j["error"] = t.error;
    return j.dump(2) + "\n";
}

std::string rates_csv(const ExperimentConfig& cfg, const RateTable& t) {
    std::string out = "# config " + config_hash(cfg) + "\n";
    out += "h,tau,l1_error,wc_normalized,wes_normalized,sup_tv,bv_pass,cert_pass\n";
    for (const RateRow& row : t.rows) {
        out += format_double(row.h);
        out += ',';
        out += format_double(row.tau);
        out += ',';
        out += format_double(row.l1_error);
        out += ',';
        out += format_double(row.wc_normalized);
        out += ',';
        out += format_double(row.wes_normalized);
        out += ',';
        out += format_double(row.sup_tv);
        out += ',';
        out += bool_str(row.bv_pass);
        out += ',';
        out += bool_str(row.cert_pass);
        out += '\n';
    }
    return out;
}

std::string flux_check_json(const ExperimentConfig& cfg, const FluxCheckReport& rep) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "flux_check";
    j["name"] = cfg.name;
    j["config_hash"] = config_hash(cfg);
    j["flux"] = cfg.flux_kind;
    j["system"] = cfg.system_kind;
    j["consistency"] = rep.consistency;
    j["jacobian_error"] = rep.jacobian_error;
    j["second_order"] = rep.second_order;
    j["monotonicity"] = {{"min_left_eig", rep.monotonicity.min_left_eig},
                         {"max_right_eig", rep.monotonicity.max_right_eig},
                         {"asymmetry", rep.monotonicity.asymmetry}};
    j["dissipation"] = {{"min", rep.dissipation_min}, {"max", rep.dissipation_max}};
    j["classification"] = rep.classification;
    j["entropy_flux_identity"] = rep.entropy_flux_identity;
    j["pass"] = rep.pass;
    return j.dump(2) + "\n";
}

std::string snapshot_csv(const PCField& u) {
    std::string out = "x";
    for (int c = 0; c < u.dim(); ++c) out += ",u" + std::to_string(c);
    out += '\n';
    for (int j = 0; j < u.grid().cells; ++j) {
        out += format_double(u.grid().center(j));
        const Vec v = u.value(j);
        for (int c = 0; c < u.dim(); ++c) {
            out += ',';
            out += format_double(v[c]);
        }
        out += '\n';
    }
    return out;
}

std::string snapshot_csv(const DGField& u) {
    std::string out = "x";
    for (int c = 0; c < u.dim(); ++c)
        for (int m = 0; m <= u.degree(); ++m)
            out += ",c" + std::to_string(c) + "_" + std::to_string(m);
    out += '\n';
    for (int j = 0; j < u.grid().cells; ++j) {
        out += format_double(u.grid().center(j));
        for (int c = 0; c < u.dim(); ++c)
            for (int m = 0; m <= u.degree(); ++m) {
                out += ',';
                out += format_double(u.coeff(j, m)[c]);
            }
        out += '\n';
    }
    return out;
}

}  // namespace hyp1d
