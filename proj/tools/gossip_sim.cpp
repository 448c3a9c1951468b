// Command-line front end: single runs and parameter sweeps over the
// round-based gossip learning simulator.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gossip/config.hpp"
#include "gossip/errors.hpp"
#include "gossip/simulation.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> rounds;
    std::optional<int> bootstrap;
    std::optional<double> f;
    std::optional<std::string> force;
    std::optional<std::string> attack;
    std::optional<std::string> aggregator;
    std::optional<std::string> sampler;
    std::optional<std::string> threshold;
    std::optional<double> fixed_b;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "Master RNG seed");
    cmd->add_option("--rounds", ov.rounds, "Number of rounds");
    cmd->add_option("--bootstrap", ov.bootstrap, "Bootstrap set size |I|");
    cmd->add_option("--f", ov.f, "Byzantine fraction");
    cmd->add_option("--force", ov.force, "Flood force (number or 'inf')");
    cmd->add_option("--attack", ov.attack, "none|foe|alie");
    cmd->add_option("--aggregator", ov.aggregator, "average|gts|cs|cwtm");
    cmd->add_option("--sampler", ov.sampler, "history|basalt");
    cmd->add_option("--threshold", ov.threshold,
                    "adaptive|fixed|conservative");
    cmd->add_option("--fixed-b", ov.fixed_b, "Threshold for fixed mode");
}

gossip::SimConfig apply_overrides(gossip::SimConfig cfg, const Overrides& ov) {
    nlohmann::json doc;
    if (ov.seed) doc["seed"] = *ov.seed;
    if (ov.rounds) doc["rounds"] = *ov.rounds;
    if (ov.bootstrap) doc["bootstrap_size"] = *ov.bootstrap;
    if (ov.f) doc["byz_fraction"] = *ov.f;
    if (ov.force) {
        if (*ov.force == "inf") {
            doc["flood_force"] = "inf";
        } else {
            try {
                doc["flood_force"] = std::stoll(*ov.force);
            } catch (const std::exception&) {
                throw gossip::ConfigError(
                    "flood_force: expected a number or 'inf', got '" +
                    *ov.force + "'");
            }
        }
    }
    if (ov.attack) doc["attack"] = *ov.attack;
    if (ov.aggregator) doc["aggregator"] = *ov.aggregator;
    if (ov.sampler) doc["sampler"] = *ov.sampler;
    if (ov.threshold) doc["threshold"] = *ov.threshold;
    if (ov.fixed_b) doc["fixed_b"] = *ov.fixed_b;
    return gossip::apply_config_json(std::move(cfg), doc);
}

gossip::SimConfig resolve_config(const std::string& preset,
                                 const std::string& config_path,
                                 const Overrides& ov) {
    gossip::SimConfig cfg =
        preset.empty() ? gossip::SimConfig{} : gossip::preset_config(preset);
    if (!config_path.empty())
        cfg = gossip::load_config_file(config_path, std::move(cfg));
    return apply_overrides(std::move(cfg), ov);
}

int run_once(const gossip::SimConfig& cfg, const std::string& out_dir) {
    const auto artifact = gossip::run_to_files(cfg, out_dir);
    double mean = 0.0;
    for (const auto& [id, f1] : artifact.final_f1) mean += f1;
    if (!artifact.final_f1.empty()) mean /= artifact.final_f1.size();
    std::printf("rounds=%zu final_f1_mean=%.4f violations=%d wall=%.1fs\n",
                artifact.rows.size(), mean,
                artifact.threshold_violation_rounds,
                artifact.duration_seconds);
    std::printf("wrote %s/metrics.csv and %s/summary.json\n", out_dir.c_str(),
                out_dir.c_str());
    return 0;
}

std::string combo_dir_name(const nlohmann::json& combo) {
    std::string name;
    for (const auto& [key, value] : combo.items()) {
        if (!name.empty()) name += "_";
        std::string v = value.is_string() ? value.get<std::string>()
                                          : value.dump();
        name += key + "-" + v;
    }
    return name;
}

int run_sweep(const std::string& config_path, const std::string& out_dir,
              const Overrides& ov) {
    std::ifstream in(config_path);
    if (!in) throw gossip::IoError("cannot open config file: " + config_path);
    nlohmann::json doc;
    in >> doc;
    if (!doc.contains("sweep"))
        throw gossip::ConfigError("sweep: config has no 'sweep' object");
    const nlohmann::json grid = doc["sweep"];

    // Cross product over the grid axes, applied on top of the base config.
    std::vector<nlohmann::json> combos{nlohmann::json::object()};
    for (const auto& [key, values] : grid.items()) {
        std::vector<nlohmann::json> next;
        for (const auto& combo : combos) {
            for (const auto& v : values) {
                nlohmann::json c = combo;
                c[key] = v;
                next.push_back(std::move(c));
            }
        }
        combos = std::move(next);
    }

    nlohmann::json index = nlohmann::json::array();
    for (const auto& combo : combos) {
        gossip::SimConfig cfg = gossip::apply_config_json(
            gossip::apply_config_json(gossip::SimConfig{}, doc), combo);
        cfg = apply_overrides(std::move(cfg), ov);
        const std::string name = combo_dir_name(combo);
        const auto dir = std::filesystem::path(out_dir) / name;
        std::filesystem::create_directories(dir);
        std::printf("sweep: %s\n", name.c_str());
        const auto artifact = gossip::run_to_files(cfg, dir.string());
        double mean = 0.0;
        for (const auto& [id, f1] : artifact.final_f1) mean += f1;
        if (!artifact.final_f1.empty()) mean /= artifact.final_f1.size();
        index.push_back({{"combo", combo},
                         {"dir", name},
                         {"final_f1_mean", mean},
                         {"violations", artifact.threshold_violation_rounds}});
    }
    std::ofstream js(std::filesystem::path(out_dir) / "sweep_index.json");
    js << index.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine-resilient gossip learning simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = ".";
    Overrides ov;

    CLI::App* run = app.add_subcommand("run", "Run one experiment");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--preset", preset, "Named scenario preset");
    run->add_option("--out", out_dir, "Output directory (must exist)");
    add_override_flags(run, ov);

    CLI::App* sweep =
        app.add_subcommand("sweep", "Run the config's parameter grid");
    sweep->add_option("--config", config_path, "JSON config file")
        ->required();
    sweep->add_option("--out", out_dir, "Output directory (must exist)");
    add_override_flags(sweep, ov);

    CLI::App* presets =
        app.add_subcommand("presets", "List named scenario presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (presets->parsed()) {
            for (const auto& name : gossip::preset_names())
                std::printf("%s\n", name.c_str());
            return 0;
        }
        if (run->parsed()) {
            if (config_path.empty() && preset.empty())
                throw gossip::ConfigError("run: need --config or --preset");
            return run_once(resolve_config(preset, config_path, ov), out_dir);
        }
        if (sweep->parsed()) return run_sweep(config_path, out_dir, ov);
    } catch (const gossip::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
