// coea-lab: experiment runner for the (1,lambda)-EA / (1,lambda)-CoEA on DIAGONAL.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "coea/coea.hpp"
#include "coea/presets.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coea;

constexpr int kExitError = 1;
constexpr int kExitBoundFailure = 3;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct CommonArgs {
    std::string config;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("-c,--config", args.config, "JSON configuration file");
    if (config_required) opt->required();
    cmd->add_option("-j,--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("-s,--seed", args.seed, "master seed override");
    cmd->add_option("-o,--out", args.out, "output directory override");
}

json merged_config(json base, const CommonArgs& args) {
    if (!args.config.empty()) base.merge_patch(experiment::load_json(args.config));
    if (args.seed) base["master_seed"] = *args.seed;
    if (!args.out.empty()) base["output_dir"] = args.out;
    return base;
}

int execute(const experiment::ExperimentSpec& spec, unsigned jobs) {
    experiment::ExecutionOptions exec;
    exec.jobs = jobs;
    exec.cancel = &g_stop;
    const auto res = experiment::run_experiment(spec, exec);
    std::cout << spec.name << ": " << res.rows.size() << " runs written to " << (spec.output_dir / "results.csv").string()
              << '\n';
    for (const auto& g : res.summary) {
        std::cout << "  n=" << g.n << " lambda=" << g.lambda << " chi=" << csv::format_double(g.chi)
                  << " eps=" << csv::format_double(g.eps) << " success=" << g.hits << '/' << g.runs;
        if (g.mean) std::cout << " mean_evals=" << *g.mean << " ratio_6ln=" << *g.ratio();
        std::cout << '\n';
    }
    if (res.interrupted) {
        std::cerr << "interrupted: partial results flushed\n";
        return kExitInterrupted;
    }
    return 0;
}

int cmd_run(const CommonArgs& args) {
    return execute(experiment::parse_spec(merged_config(json::object(), args)), args.jobs);
}

int cmd_preset(json preset, const CommonArgs& args) {
    return execute(experiment::parse_spec(merged_config(std::move(preset), args)), args.jobs);
}

int cmd_ea_vs_coea(const CommonArgs& args) {
    const json base = merged_config(presets::ea_vs_coea(), args);
    const fs::path root = base.value("output_dir", std::string("out/ea-vs-coea"));
    json comparison = json::object();
    int status = 0;
    for (const char* algo : {"EA", "CoEA"}) {
        json leg = base;
        leg["algorithm"] = algo;
        leg["name"] = base.value("name", std::string("ea-vs-coea")) + "-" + algo;
        leg["output_dir"] = (root / algo).string();
        const auto spec = experiment::parse_spec(leg);
        status = execute(spec, args.jobs);
        const auto rows = experiment::read_results(spec.output_dir / "results.csv");
        comparison[algo] = experiment::summary_json(experiment::summarize_rows(rows))["configurations"];
        if (status != 0) break;
    }
    std::ofstream(root / "comparison.json", std::ios::binary) << comparison.dump(2) << '\n';
    return status;
}

int cmd_oracles(const CommonArgs& args) {
    const fs::path out = args.out.empty() ? fs::path("out/oracles") : fs::path(args.out);
    const auto res = oracles::run_oracles(args.config, out / "oracle_report.csv");
    std::cout << res.rows.size() << " oracle checks, " << res.failures << " failures -> "
              << (out / "oracle_report.csv").string() << '\n';
    return res.failures == 0 ? 0 : kExitBoundFailure;
}

int cmd_summarize(const std::string& input, const std::string& out_dir) {
    const auto rows = experiment::read_results(input);
    const fs::path dir = out_dir.empty() ? fs::path(input).parent_path() : fs::path(out_dir);
    if (!dir.empty()) fs::create_directories(dir);
    const fs::path target = dir / "summary.json";
    experiment::write_summary(target, experiment::summarize_rows(rows));
    std::cout << "wrote " << target.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coea-lab: (1,lambda)-EA and (1,lambda)-CoEA experiments on DIAGONAL"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, scale_args, cmp_args, oracle_args;
    add_common(app.add_subcommand("run", "run an experiment spec"), run_args, true);
    add_common(app.add_subcommand("sweep-chi", "mutation-rate sweep (desk-scale preset)"), sweep_args, false);
    add_common(app.add_subcommand("scale-n", "runtime vs problem size (desk-scale preset)"), scale_args, false);
    add_common(app.add_subcommand("ea-vs-coea", "EA and CoEA on the same grid"), cmp_args, false);
    add_common(app.add_subcommand("oracles", "evaluate exact tail/MGF oracle checks"), oracle_args, true);

    std::string summarize_in, summarize_out;
    auto* summarize = app.add_subcommand("summarize", "rebuild summary.json from results.csv");
    summarize->add_option("-c,--config,--in", summarize_in, "results.csv path")->required();
    summarize->add_option("-o,--out", summarize_out, "output directory (default: alongside input)");

    CLI11_PARSE(app, argc, argv);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    try {
        if (app.got_subcommand("run")) return cmd_run(run_args);
        if (app.got_subcommand("sweep-chi")) return cmd_preset(presets::chi_sweep(), sweep_args);
        if (app.got_subcommand("scale-n")) return cmd_preset(presets::scale_n(), scale_args);
        if (app.got_subcommand("ea-vs-coea")) return cmd_ea_vs_coea(cmp_args);
        if (app.got_subcommand("oracles")) return cmd_oracles(oracle_args);
        if (app.got_subcommand("summarize")) return cmd_summarize(summarize_in, summarize_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
