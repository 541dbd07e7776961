#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monoforge/artifacts.hpp"
#include "monoforge/error.hpp"
#include "monoforge/registry.hpp"
#include "monoforge/rundir.hpp"
#include "monoforge/sweep.hpp"

namespace fs = std::filesystem;
using namespace monoforge;

namespace {

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw ConfigError("bad value '" + item + "' in list");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty value list");
    return out;
}

void print_final(const RunResult& r) {
    std::cout << r.dir.string() << ": " << r.status.status;
    if (r.reused) std::cout << " (reused)";
    if (r.final_record) {
        const auto& f = *r.final_record;
        std::cout << " step " << f.step << " loss " << f.loss << " mono_fraction " << f.mono_fraction
                  << " mean_bias " << f.mean_bias;
    }
    if (!r.status.message.empty()) std::cout << " [" << r.status.message << "]";
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monoforge: toy-model monosemanticity experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> train_out;
    std::optional<std::uint64_t> train_seed;
    bool desk = false;
    auto* train_cmd = app.add_subcommand("train", "train one model from a JSON config");
    train_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--out", train_out, "run directory");
    train_cmd->add_option("--seed", train_seed, "override the config seed");
    train_cmd->add_flag("--desk-scale", desk, "shrink to N=128, d=32, k/4, eps*2, B=4096");

    std::string batch;
    std::string values_text;
    std::size_t parallel = 1;
    std::optional<std::string> sweep_out;
    std::uint64_t sweep_seed = 0;
    std::optional<std::size_t> sweep_steps;
    std::map<std::string, double> extra_text;
    auto* sweep_cmd = app.add_subcommand("sweep", "run one batch over a list of variable values");
    sweep_cmd->add_option("--batch", batch, "batch key, see `list`")->required();
    sweep_cmd->add_option("--values", values_text, "comma-separated values")->required();
    sweep_cmd->add_option("--parallel", parallel, "concurrent runs (capped by MONOFORGE_THREADS)")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep_out, "sweep directory (default sweeps/<batch>)");
    sweep_cmd->add_option("--seed", sweep_seed, "sweep seed");
    sweep_cmd->add_option("--steps", sweep_steps, "training steps per run");
    sweep_cmd->add_option("--set", extra_text, "secondary variable, e.g. --set lr 0.003");

    std::string run_dir;
    std::string features_text;
    auto* analyze_cmd = app.add_subcommand("analyze", "write interpretability artifacts for a run");
    analyze_cmd->add_option("--run", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
    analyze_cmd->add_option("--features", features_text, "comma-separated feature indices");

    std::string sweep_dir;
    auto* report_cmd = app.add_subcommand("report", "aggregate a sweep into summary.csv");
    report_cmd->add_option("--sweep", sweep_dir, "sweep directory")->required()->check(CLI::ExistingDirectory);

    bool list_desk = false;
    auto* list_cmd = app.add_subcommand("list", "print the batch registry");
    list_cmd->add_flag("--desk", list_desk, "show desk-scale variants");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            TrainConfig cfg = load_config(config_path);
            if (train_seed) cfg.seed = *train_seed;
            if (desk) cfg = desk_scaled(cfg);
            const fs::path out = train_out ? fs::path(*train_out) : fs::path("runs") / run_dir_name(cfg);
            const RunResult r = execute_run(cfg, out);
            print_final(r);
            return r.status.status == "done" ? 0 : 2;
        }
        if (*sweep_cmd) {
            const BatchSpec& spec = find_batch(batch);
            SweepOptions opt;
            opt.root = sweep_out ? fs::path(*sweep_out) : fs::path("sweeps") / spec.key;
            opt.parallelism = parallel;
            opt.seed = sweep_seed;
            opt.total_steps = sweep_steps;
            for (const auto& [name, v] : extra_text) opt.extra[parse_sweep_variable(name)] = v;
            opt.log = [](const std::string& msg) { std::cout << msg << '\n' << std::flush; };
            const auto entries = run_sweep(spec, parse_values(values_text), opt);
            int failed = 0;
            for (const auto& e : entries) {
                if (e.status != "done") ++failed;
            }
            std::cout << "manifest: " << (opt.root / kManifestFile).string() << '\n';
            return failed == 0 ? 0 : 2;
        }
        if (*analyze_cmd) {
            std::vector<std::size_t> features;
            if (!features_text.empty()) {
                for (double v : parse_values(features_text)) {
                    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
                        throw ConfigError("feature indices must be non-negative integers");
                    }
                    features.push_back(static_cast<std::size_t>(v));
                }
            }
            for (const auto& p : write_analysis(run_dir, features)) std::cout << p.string() << '\n';
            return 0;
        }
        if (*report_cmd) {
            std::cout << write_summary_csv(sweep_dir).string() << '\n';
            return 0;
        }
        if (*list_cmd) {
            for (const auto& s : registry()) {
                if (s.desk != list_desk) continue;
                std::cout << s.key << "  " << to_string(s.task) << ' ' << to_string(s.activation)
                          << "  varies:";
                for (auto v : s.variables) std::cout << ' ' << to_string(v);
                if (!s.notes.empty()) std::cout << "  (" << s.notes << ')';
                std::cout << '\n';
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
