#pragma once

// Experiment harness: reproducible solver runs with certification, rate
// studies over mesh ladders, and numerical-flux audits, driven by a JSON
// configuration. Artifacts (report.json, rates.csv, violations.csv,
// snapshots/*.csv) are deterministic functions of the configuration alone:
// no timestamps, no machine identifiers, and a worker-count-independent
// numeric path, so reruns are byte-for-byte identical.

#include <string>
#include <vector>

#include "hyp1d/cert.hpp"
#include "hyp1d/exact.hpp"
#include "hyp1d/flux.hpp"

namespace hyp1d {

// ---------------------------------------------------------------------------
// Configuration. config_from_json accepts the nested layout written by
// config_to_json; missing optional fields take the defaults below, unknown
// keys are rejected. validate_config throws std::invalid_argument with the
// offending field named.

struct SweepSpec {
    int grid = 3;            // grid x grid lattice of space-time bumps
    bool shock_bump = true;  // extra bump centered on the first discontinuity
    double amplitude = 1.0;
};

struct ThresholdSpec {
    double k_osc = 0.0;        // cell oscillation budget factor (required, > 0)
    double m_tube = 2.0;       // shock tube radius in units of h^{2/3}
    double c_wes = 1.0;        // entropy window slack factor
    double tv_budget = 0.0;    // sup-TV budget (required, > 0)
    double jump_factor = 1.0;  // front detection threshold factor
    int min_lifetime = 3;      // levels a front must persist
    double rate_min = 1.0 / 3.0;  // convergence pass bar
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::string system_kind;
    ParamMap system_params;
    std::string flux_kind = "rusanov";
    ParamMap flux_params;
    std::string scheme = "fv";  // "fv" | "rkdg2"
    int degree = 1;             // rkdg2 only
    std::string limiter = "minmod_tvb";
    double limiter_m = 0.0;
    std::string fixture;
    double xmin = -1.0, xmax = 1.0;
    double t_end = 0.0;
    std::vector<double> h_list;  // strictly decreasing target cell widths
    double safety = 0.9;
    double hull_inflation = 1.5;
    SweepSpec sweep;
    ThresholdSpec thresholds;
    std::string output_dir;  // empty: compute only, write nothing
    int snapshots = 3;       // field snapshots per run (0 disables)
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

// Canonical form: every field spelled out, fixed key order, shortest
// round-trip numbers. The hash (16 hex digits, FNV-1a over the canonical
// text) stamps every artifact.
std::string config_to_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Fixtures: named initial-value problems with exact reference solutions,
// rederived from the locus solver at construction time.

struct FixtureInfo {
    std::string id;
    std::string system;  // required system kind
    std::string kind;    // single_shock | two_shock | contact | smooth
    std::string note;
};

const std::vector<FixtureInfo>& fixture_registry();
ExactSolution make_fixture(const std::string& id, const SystemPtr& sys);

// ---------------------------------------------------------------------------
// Single experiment: run the scheme at one resolution and certify the
// trajectory in streaming fashion (levels are consumed as they are
// produced; memory stays bounded on long runs). The certificates match the
// stored-trajectory functions in cert.hpp exactly.

struct WindowStat {  // entropy window realizing the worst slack margin
    int n = 0, m = 0;
    int phi = -1;
    double signed_value = 0.0;
    double denominator = 0.0;
    double normalized = 0.0;
};

struct RunResult {
    double h = 0.0, tau = 0.0;
    int cells = 0, steps = 0;
    double l1_error = 0.0;  // against the fixture solution at t_end
    int sweep_size = 0;     // test functions certified

    double lc = 0.0;        // worst per-step Lipschitz quotient
    double lc_bound = 0.0;  // twice the measured flux Lipschitz constant
    bool lc_pass = false;

    double wc_residual = 0.0;    // worst window |residual|_inf over the sweep
    double wc_normalized = 0.0;  // worst normalized window residual

    double wes_signed = 0.0;      // most negative signed window residual
    double wes_normalized = 0.0;  // normalized value of that window
    WindowStat wes_worst;
    bool wes_pass = false;  // every window of every bump within the slack

    double entropy_flux_identity = 0.0;  // max |Q^r - Q^l| over initial faces
    double cfl_margin = 0.0;             // tau used / tau allowed

    ShockCurveSet curves;
    BvReport bv;

    bool pass() const { return lc_pass && wes_pass && bv.pass(); }
};

// Runs at h_list.front(). With output_dir set, writes meta.json,
// report.json, violations.csv, and snapshots/*.csv under it.
RunResult run_experiment(const ExperimentConfig& cfg);
RunResult run_experiment(const ExperimentConfig& cfg, double h);

// Re-runs the experiment recorded in dir/meta.json and rewrites report.json
// and violations.csv in place.
RunResult certify_directory(const std::string& dir);

// ---------------------------------------------------------------------------
// Convergence study over the whole mesh ladder.

struct RateRow {
    double h = 0.0, tau = 0.0;
    double l1_error = 0.0;
    double wc_normalized = 0.0;
    double wes_normalized = 0.0;
    double sup_tv = 0.0;
    bool bv_pass = false;
    bool cert_pass = false;  // lc, wes and bv together
};

struct RateTable {
    std::vector<RateRow> rows;  // h descending, one per completed resolution
    double rate = 0.0;          // least-squares slope of log l1_error vs log h
    bool complete = false;      // every requested resolution produced a row
    bool pass = false;          // complete, rate >= rate_min, every row certified
    std::string error;          // first failure when incomplete
};

// With output_dir set, writes rates.csv and report.json under it.
RateTable convergence_study(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
/// Numerical flux audit on the hull of the configured fixture: consistency,
// derivative checks, monotone splitting with a definiteness classification,
// and the two-sided entropy flux identity.

struct FluxCheckReport {
    double consistency = 0.0;      // |F(u,u;u,u) - f(u)|_inf, worst sample
    double jacobian_error = 0.0;   // relative defect of D^l/D^r vs differences
    double second_order = 0.0;     // |D^l + D^r - Df|_max along paths
    MonotonicityReport monotonicity;
    double dissipation_min = 0.0;  // smallest frozen-Jacobian eigenvalue bound
    double dissipation_max = 0.0;  // largest, for scale
    std::string classification;    // definite | semidefinite | indefinite
    double entropy_flux_identity = 0.0;  // max |Q^r - Q^l| over sampled pairs
    bool pass = false;             // everything within tolerance, not indefinite
};

FluxCheckReport flux_check(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Artifact text builders (exposed for tests; the run/study entry points use
// them). Reports embed the config hash; snapshot tables are plain CSV.

std::string meta_json(const ExperimentConfig& cfg);
std::string run_report_json(const ExperimentConfig& cfg, const RunResult& r);
std::string study_report_json(const ExperimentConfig& cfg, const RateTable& t);
std::string rates_csv(const ExperimentConfig& cfg, const RateTable& t);
std::string flux_check_json(const ExperimentConfig& cfg, const FluxCheckReport& rep);
std::string snapshot_csv(const PCField& u);
std::string snapshot_csv(const DGField& u);

}  // namespace hyp1d
