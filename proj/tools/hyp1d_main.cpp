// Command line for certified runs: run / certify / converge / flux-check /
// fixtures list. Exit code 0 means every requested certificate passed, 1 a
// completed run whose certificates fail, 2 a config or usage problem.
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "hyp1d/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int list_fixtures() {
    for (const hyp1d::FixtureInfo& f : hyp1d::fixture_registry())
        std::cout << std::left << std::setw(22) << f.id << std::setw(18) << f.system
                  << std::setw(14) << f.kind << f.note << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified finite volume and RKDG experiments for 1D conservation laws"};
    app.require_subcommand(1);

    std::string config_path;
    std::string dir;

    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment and write its artifacts");
    run_cmd->add_option("config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* cert_cmd =
        app.add_subcommand("certify", "recompute certificates for an experiment directory");
    cert_cmd->add_option("dir", dir, "directory holding meta.json")
        ->required()
        ->check(CLI::ExistingDirectory);

    CLI::App* conv_cmd =
        app.add_subcommand("converge", "convergence study over the config's mesh ladder");
    conv_cmd->add_option("config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* flux_cmd =
        app.add_subcommand("flux-check", "audit the configured numerical flux on the state hull");
    flux_cmd->add_option("config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* fixtures_cmd = app.add_subcommand("fixtures", "builtin exact-solution fixtures");
    fixtures_cmd->require_subcommand(1);
    fixtures_cmd->add_subcommand("list", "print the fixture registry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fixtures_cmd) return list_fixtures();

        if (*run_cmd) {
            const hyp1d::ExperimentConfig cfg = hyp1d::load_config(config_path);
            const hyp1d::RunResult r = hyp1d::run_experiment(cfg);
            std::cout << hyp1d::run_report_json(cfg, r);
            return r.pass() ? 0 : 1;
        }
        if (*cert_cmd) {
            const hyp1d::RunResult r = hyp1d::certify_directory(dir);
            std::cout << slurp(dir + "/report.json");
            return r.pass() ? 0 : 1;
        }
        if (*conv_cmd) {
            const hyp1d::ExperimentConfig cfg = hyp1d::load_config(config_path);
            const hyp1d::RateTable t = hyp1d::convergence_study(cfg);
            std::cout << hyp1d::study_report_json(cfg, t);
            return t.pass ? 0 : 1;
        }
        if (*flux_cmd) {
            const hyp1d::ExperimentConfig cfg = hyp1d::load_config(config_path);
            const hyp1d::FluxCheckReport rep = hyp1d::flux_check(cfg);
            const std::string text = hyp1d::flux_check_json(cfg, rep);
            std::cout << text;
            if (!cfg.output_dir.empty()) {
                std::filesystem::create_directories(cfg.output_dir);
                spill(cfg.output_dir + "/flux_check.json", text);
                spill(cfg.output_dir + "/meta.json", hyp1d::meta_json(cfg));
            }
            return rep.pass ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
