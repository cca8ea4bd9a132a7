// netdyn: simulate noisy voter dynamics on random graphs and compare them
// with their mean-field limits.
//
// Exit codes: 0 success, 1 validation or usage error, 2 verification
// failure, 3 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netdyn/analysis.hpp"
#include "netdyn/experiment.hpp"
#include "netdyn/io.hpp"
#include "netdyn/verify.hpp"

namespace {

using namespace netdyn;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerify = 2;
constexpr int kExitRuntime = 3;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("NETDYN_SEED");
    if (!raw || !*raw) return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("NETDYN_SEED is not an unsigned integer: ") + raw);
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

struct Source {
    std::string preset;
    std::string config;
    std::optional<std::size_t> scale_n;
    std::optional<std::size_t> scale_r;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;

    void add_options(CLI::App* cmd) {
        cmd->add_option("preset", preset, "Preset name (see `netdyn presets`)");
        cmd->add_option("-c,--config", config, "JSON experiment config");
        cmd->add_option("--scale-n", scale_n, "Override the number of nodes N")->check(CLI::PositiveNumber);
        cmd->add_option("--scale-r", scale_r, "Override the number of realizations R")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "Master seed (falls back to the config, then NETDYN_SEED)");
    }

    ExperimentConfig load() const {
        if (preset.empty() == config.empty()) throw std::invalid_argument("give exactly one of a preset name or --config");
        ExperimentConfig c;
        if (!preset.empty()) {
            c = make_preset(preset, {scale_n, scale_r});
        } else {
            c = load_config(config);
            if (scale_n) c.ensemble.family.n = *scale_n;
            if (scale_r) c.ensemble.realizations = *scale_r;
            c.validate();
        }
        // the environment is consulted only when nothing else supplies a seed
        c = resolve(std::move(c), seed, seed || c.seed ? std::nullopt : env_seed());
        c.ensemble.threads = threads;
        return c;
    }
};

std::string output_stem(const ExperimentConfig& c, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (!c.output.empty()) return c.output;
    return c.name;
}

int cmd_simulate(const Source& src, const std::string& output) {
    ExperimentConfig c = src.load();
    const Trajectory traj = run_single(c);
    const std::string path = output.empty() ? output_stem(c, "") + "_trajectory.csv" : output;
    auto out = open_output(path);
    write_trajectory_csv(out, traj, c.params().num_opinions, c.params().num_classes);
    std::cout << "wrote " << path << " (" << traj.events << " events)\n";
    return kExitOk;
}

int cmd_experiment(const Source& src, const std::string& output) {
    ExperimentConfig c = src.load();
    const ExperimentResult res = run_experiment(c);
    const std::string stem = output_stem(c, output);
    const int big_m = c.params().num_opinions, big_k = c.params().num_classes;
    {
        auto out = open_output(stem + "_ensemble.csv");
        write_ensemble_csv(out, res.stats, big_m, big_k);
    }
    {
        auto out = open_output(stem + "_mfe.csv");
        write_trajectory_csv(out, res.mfe, big_m, big_k);
    }
    {
        auto out = open_output(stem + "_deviation.csv");
        write_deviation_csv(out, res.deviation);
    }
    std::cout << c.name << ": N=" << c.ensemble.family.n << " R=" << c.ensemble.realizations
              << " seed=" << c.ensemble.seed << '\n';
    if (!c.description.empty()) std::cout << c.description << '\n';
    write_deviation_summary(std::cout, res.deviation);
    std::cout << "wrote " << stem << "_ensemble.csv, " << stem << "_mfe.csv, " << stem << "_deviation.csv\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::optional<std::uint64_t> seed) {
    if (!seed) seed = env_seed();
    if (!seed) throw std::invalid_argument("no seed: pass --seed or set NETDYN_SEED");
    const auto results = run_suite(suite, *seed);
    bool ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? kExitOk : kExitVerify;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& output, const std::string& title) {
    std::vector<PlotSeries> series;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot read " + path);
        series.push_back({path.substr(path.find_last_of('/') + 1), read_csv(in)});
    }
    const std::string svg = render_svg(series, title);
    auto out = open_output(output);
    out << svg;
    std::cout << "wrote " << output << '\n';
    return kExitOk;
}

int cmd_presets(bool show_json) {
    for (const auto& name : preset_names()) {
        if (show_json) std::cout << config_to_json(make_preset(name)).dump(2) << '\n';
        else std::cout << name << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy voter dynamics on random graphs versus mean-field limits"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Cap on worker threads (0: all cores)");

    Source sim_src, exp_src;
    std::string sim_out, exp_out;
    auto* simulate = app.add_subcommand("simulate", "One realization, written as a trajectory CSV");
    sim_src.add_options(simulate);
    simulate->add_option("-o,--output", sim_out, "Output CSV path");

    auto* experiment = app.add_subcommand("experiment", "Ensemble, mean-field solution and deviation report");
    exp_src.add_options(experiment);
    experiment->add_option("-o,--output", exp_out, "Output path stem");

    std::string suite;
    std::optional<std::uint64_t> verify_seed;
    auto* verify = app.add_subcommand("verify", "Statistical verification suites");
    verify->add_option("suite", suite, "graphs | concentration | oracle | delta | all")->required();
    verify->add_option("--seed", verify_seed, "Master seed (falls back to NETDYN_SEED)");

    std::vector<std::string> plot_inputs;
    std::string plot_out = "plot.svg", plot_title;
    auto* plot = app.add_subcommand("plot", "SVG chart of trajectory/ensemble CSVs sharing a time column");
    plot->add_option("inputs", plot_inputs, "CSV files")->required();
    plot->add_option("-o,--output", plot_out, "Output SVG path");
    plot->add_option("--title", plot_title, "Chart title");

    bool show_json = false;
    auto* presets = app.add_subcommand("presets", "List preset names");
    presets->add_flag("--json", show_json, "Print each preset as a config document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    sim_src.threads = exp_src.threads = threads;
    try {
        if (*simulate) return cmd_simulate(sim_src, sim_out);
        if (*experiment) return cmd_experiment(exp_src, exp_out);
        if (*verify) return cmd_verify(suite, verify_seed);
        if (*plot) return cmd_plot(plot_inputs, plot_out, plot_title);
        if (*presets) return cmd_presets(show_json);
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
