// Command-line front end: run ensembles, validate the effective Hamiltonian,
// list presets and emit plot scripts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chimera.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw chimera::IoError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct RunOptions {
    std::string config_path;
    std::string preset;
    std::string out;
    std::uint64_t realizations = 0;
    std::uint64_t periods = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned jobs = chimera::default_jobs();
    bool store_realizations = false;
};

void apply_overrides(chimera::ExperimentConfig& c, const RunOptions& o, const std::string& out_dir) {
    if (o.realizations) c.ensemble.realizations = o.realizations;
    if (o.periods) c.schedule.n_periods = o.periods;
    if (o.seed_set) c.ensemble.master_seed = o.seed;
    if (o.store_realizations) c.ensemble.store_realizations = true;
    if (!out_dir.empty()) c.output_path = out_dir;
    chimera::validate(c);
}

void run_one(chimera::ExperimentConfig config, const std::string& label, const RunOptions& o) {
    const auto result = [&] {
        auto r = chimera::run_ensemble(config, o.jobs);
        r.label = label;
        return r;
    }();
    const auto files = chimera::emit_outputs(result, config.output_path);
    std::cout << (label.empty() ? std::string("config") : label) << ": " << result.mean.size() << " records, "
              << config.ensemble.realizations << " realizations, " << result.wall_seconds << " s -> "
              << config.output_path << "\n";
    (void)files;
}

int run(const RunOptions& o) {
    if (o.config_path.empty() == o.preset.empty())
        throw chimera::ConfigError("run", "give exactly one of --config or --preset");
    if (!o.config_path.empty()) {
        auto config = chimera::parse_config(read_file(o.config_path));
        apply_overrides(config, o, o.out);
        run_one(config, "", o);
        return kOk;
    }
    std::vector<chimera::PresetInfo> selected;
    for (const auto& p : chimera::presets())
        if (p.name == o.preset) selected.push_back(p);
    const bool family = selected.empty();
    if (family) selected = chimera::preset_family(o.preset);
    if (selected.empty()) (void)chimera::preset(o.preset);  // throws with the list of names
    for (auto& p : selected) {
        std::string out_dir = o.out;
        if (!out_dir.empty() && family) out_dir = (std::filesystem::path(out_dir) / p.name).string();
        apply_overrides(p.config, o, out_dir);
        run_one(p.config, p.name, o);
    }
    return kOk;
}

int validate_eff(const std::string& preset_name, std::uint64_t realization, std::uint64_t horizon, std::size_t max_sites,
                 const std::string& out) {
    auto config = chimera::preset(preset_name);
    config.protocol.eps_b = 1.0;  // the full effective form assumes an undriven region B
    auto in = chimera::realization_inputs(config, realization);
    const chimera::DenseGuard guard{max_sites};
    auto report = chimera::validate_effective(in.network, in.disorder, in.protocol, in.partition, in.initial, horizon, guard);
    report.params["preset"] = preset_name;
    report.params["realization"] = realization;
    report.params["note"] = "eps_B forced to 1";
    const auto text = chimera::to_json(report).dump(2) + "\n";
    if (out.empty()) std::cout << text;
    else chimera::write_file_atomic(out, text);
    return kOk;
}

int plot(const std::string& dir) {
    const auto csv = std::filesystem::path(dir) / "trace.csv";
    std::ifstream in(csv);
    if (!in) throw chimera::IoError("cannot read " + csv.string());
    std::string header;
    std::getline(in, header);
    chimera::StroboscopicTrace shape;
    std::stringstream columns(header);
    for (std::string col; std::getline(columns, col, ',');) {
        if (col.rfind("site_", 0) == 0) ++shape.n_sites;
        if (col == "M_A") shape.m_a.push_back(0.0);
        if (col == "S_B") shape.entropy_b.push_back(0.0);
    }
    const auto script = std::filesystem::path(dir) / "plot.gp";
    chimera::write_file_atomic(script, chimera::plot_script(shape, std::filesystem::path(dir).filename().string()));
    std::cout << script.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Floquet simulator for regionally driven spin networks"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "run a disorder ensemble and write trace.csv + manifest.json");
    run_cmd->add_option("--config", run_opts.config_path, "experiment JSON file");
    run_cmd->add_option("--preset", run_opts.preset, "preset or preset family name");
    run_cmd->add_option("--out", run_opts.out, "output directory");
    run_cmd->add_option("--realizations", run_opts.realizations, "number of disorder realizations");
    run_cmd->add_option("--periods", run_opts.periods, "number of drive periods");
    auto* seed_opt = run_cmd->add_option("--seed", run_opts.seed, "master seed");
    run_cmd->add_option("--jobs", run_opts.jobs, "worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--store-realizations", run_opts.store_realizations, "also write realizations/r####.csv");

    std::string eff_preset, eff_out;
    std::uint64_t eff_realization = 0, eff_horizon = 200;
    std::size_t eff_max_sites = 12;
    auto* eff_cmd = app.add_subcommand("validate-eff", "compare exact F^2 with the 2T effective Hamiltonian (eps_B = 1)");
    eff_cmd->add_option("--preset", eff_preset, "preset supplying network and disorder")->required();
    eff_cmd->add_option("--realization", eff_realization, "disorder realization index");
    eff_cmd->add_option("--horizon", eff_horizon, "trajectory horizon in periods");
    eff_cmd->add_option("--max-sites", eff_max_sites, "dense-path site limit");
    eff_cmd->add_option("--out", eff_out, "write the JSON report here instead of stdout");

    auto* presets_cmd = app.add_subcommand("presets", "list available presets");

    std::string plot_dir;
    auto* plot_cmd = app.add_subcommand("plot", "write a gnuplot script next to trace.csv");
    plot_cmd->add_option("dir", plot_dir, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (run_cmd->parsed()) {
            run_opts.seed_set = seed_opt->count() > 0;
            return run(run_opts);
        }
        if (eff_cmd->parsed()) return validate_eff(eff_preset, eff_realization, eff_horizon, eff_max_sites, eff_out);
        if (presets_cmd->parsed()) {
            for (const auto& p : chimera::presets()) std::cout << p.name << "\t" << p.description << "\n";
            return kOk;
        }
        if (plot_cmd->parsed()) return plot(plot_dir);
    } catch (const chimera::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const chimera::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const chimera::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
