#include "gossip/config.hpp"

#include <fstream>

#include "gossip/errors.hpp"

namespace gossip {

namespace {

AttackKind parse_attack(const std::string& s) {
    if (s == "none") return AttackKind::None;
    if (s == "foe") return AttackKind::FallOfEmpires;
    if (s == "alie") return AttackKind::LittleIsEnough;
    throw ConfigError("attack: unknown value '" + s + "'");
}

AggregatorKind parse_aggregator(const std::string& s) {
    if (s == "average") return AggregatorKind::PlainAverage;
    if (s == "gts") return AggregatorKind::GTS;
    if (s == "cs") return AggregatorKind::CS;
    if (s == "cwtm") return AggregatorKind::CWTM;
    throw ConfigError("aggregator: unknown value '" + s + "'");
}

SamplerKind parse_sampler(const std::string& s) {
    if (s == "history") return SamplerKind::HistoryAware;
    if (s == "basalt") return SamplerKind::StreamBaseline;
    throw ConfigError("sampler: unknown value '" + s + "'");
}

ThresholdMode parse_threshold(const std::string& s) {
    if (s == "adaptive") return ThresholdMode::Adaptive;
    if (s == "fixed") return ThresholdMode::Fixed;
    if (s == "conservative") return ThresholdMode::Conservative;
    throw ConfigError("threshold: unknown value '" + s + "'");
}

std::string attack_name(AttackKind k) {
    switch (k) {
        case AttackKind::None: return "none";
        case AttackKind::FallOfEmpires: return "foe";
        case AttackKind::LittleIsEnough: return "alie";
    }
    return "none";
}

std::string aggregator_name(AggregatorKind k) {
    switch (k) {
        case AggregatorKind::PlainAverage: return "average";
        case AggregatorKind::GTS: return "gts";
        case AggregatorKind::CS: return "cs";
        case AggregatorKind::CWTM: return "cwtm";
    }
    return "average";
}

std::string sampler_name(SamplerKind k) {
    return k == SamplerKind::HistoryAware ? "history" : "basalt";
}

std::string threshold_name(ThresholdMode m) {
    switch (m) {
        case ThresholdMode::Adaptive: return "adaptive";
        case ThresholdMode::Fixed: return "fixed";
        case ThresholdMode::Conservative: return "conservative";
    }
    return "adaptive";
}

FloodForce parse_force(const nlohmann::json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return kUnlimitedForce;
        throw ConfigError("flood_force: expected a number or \"inf\"");
    }
    const auto n = v.get<long long>();
    if (n < 0) return kUnlimitedForce;
    return static_cast<FloodForce>(n);
}

}  // namespace

SimConfig apply_config_json(SimConfig base, const nlohmann::json& doc) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "nodes") base.n = value.get<int>();
        else if (key == "view_size") base.view_size = value.get<int>();
        else if (key == "bootstrap_size") base.bootstrap_size = value.get<int>();
        else if (key == "rounds") base.rounds = value.get<int>();
        else if (key == "byz_fraction") base.byz_fraction = value.get<double>();
        else if (key == "flood_force") base.flood_force = parse_force(value);
        else if (key == "attack") base.attack = parse_attack(value.get<std::string>());
        else if (key == "aggregator") base.aggregator = parse_aggregator(value.get<std::string>());
        else if (key == "sampler") base.sampler = parse_sampler(value.get<std::string>());
        else if (key == "threshold") base.threshold_mode = parse_threshold(value.get<std::string>());
        else if (key == "fixed_b") base.fixed_b = value.get<double>();
        else if (key == "kappa") base.kappa = value.get<double>();
        else if (key == "c0") base.c0_override = value.get<double>();
        else if (key == "worst_case_byz_history") base.worst_case_byz_history = value.get<bool>();
        else if (key == "seed_refresh") {
            if (value.contains("interval")) base.refresh.interval = value["interval"].get<int>();
            if (value.contains("count")) base.refresh.seeds_per_refresh = value["count"].get<int>();
        } else if (key == "basalt") {
            if (value.contains("rho")) base.baseline_rho = value["rho"].get<double>();
            if (value.contains("interval")) base.baseline_interval = value["interval"].get<int>();
            if (value.contains("count")) base.baseline_count = value["count"].get<int>();
        } else if (key == "trainer") {
            if (value.contains("eta")) base.trainer.eta = value["eta"].get<double>();
            if (value.contains("momentum")) base.trainer.momentum = value["momentum"].get<double>();
            if (value.contains("batch_size")) base.trainer.batch_size = value["batch_size"].get<int>();
        } else if (key == "dataset") {
            if (value.contains("kind")) {
                const auto kind = value["kind"].get<std::string>();
                if (kind == "synthetic") base.dataset.kind = DatasetSpec::Kind::Synthetic;
                else if (kind == "idx") base.dataset.kind = DatasetSpec::Kind::Idx;
                else throw ConfigError("dataset.kind: unknown value '" + kind + "'");
            }
            if (value.contains("dirichlet_beta")) base.dataset.dirichlet_beta = value["dirichlet_beta"].get<double>();
            if (value.contains("classes")) base.dataset.classes = value["classes"].get<int>();
            if (value.contains("feature_dim")) base.dataset.feature_dim = value["feature_dim"].get<int>();
            if (value.contains("samples_per_node")) base.dataset.samples_per_node = value["samples_per_node"].get<int>();
            if (value.contains("mean_radius")) base.dataset.mean_radius = value["mean_radius"].get<double>();
            if (value.contains("test_fraction")) base.dataset.test_fraction = value["test_fraction"].get<double>();
            if (value.contains("train_images")) base.dataset.train_images = value["train_images"].get<std::string>();
            if (value.contains("train_labels")) base.dataset.train_labels = value["train_labels"].get<std::string>();
            if (value.contains("test_images")) base.dataset.test_images = value["test_images"].get<std::string>();
            if (value.contains("test_labels")) base.dataset.test_labels = value["test_labels"].get<std::string>();
        } else if (key == "zeta_grid") {
            base.zeta_grid = value.get<std::vector<double>>();
        } else if (key == "seed") {
            base.seed = value.get<std::uint64_t>();
        } else if (key == "eval_test_cap") {
            base.eval_test_cap = value.get<int>();
        } else if (key == "sweep") {
            // handled by the sweep command, not per-run state
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return base;
}

SimConfig load_config_file(const std::string& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return apply_config_json(std::move(base), doc);
}

nlohmann::json config_to_json(const SimConfig& c) {
    nlohmann::json doc;
    doc["nodes"] = c.n;
    doc["view_size"] = c.view_size;
    doc["bootstrap_size"] = c.bootstrap_size;
    doc["rounds"] = c.rounds;
    doc["byz_fraction"] = c.byz_fraction;
    if (c.flood_force == kUnlimitedForce)
        doc["flood_force"] = "inf";
    else
        doc["flood_force"] = c.flood_force;
    doc["attack"] = attack_name(c.attack);
    doc["aggregator"] = aggregator_name(c.aggregator);
    doc["sampler"] = sampler_name(c.sampler);
    doc["threshold"] = threshold_name(c.threshold_mode);
    doc["fixed_b"] = c.fixed_b;
    doc["kappa"] = c.kappa;
    if (c.c0_override > 0) doc["c0"] = c.c0_override;
    doc["worst_case_byz_history"] = c.worst_case_byz_history;
    doc["seed_refresh"] = {{"interval", c.refresh.interval},
                           {"count", c.refresh.seeds_per_refresh}};
    nlohmann::json basalt{{"rho", c.baseline_rho}};
    if (c.baseline_interval >= 0) basalt["interval"] = c.baseline_interval;
    if (c.baseline_count >= 0) basalt["count"] = c.baseline_count;
    doc["basalt"] = basalt;
    doc["trainer"] = {{"eta", c.trainer.eta},
                      {"momentum", c.trainer.momentum},
                      {"batch_size", c.trainer.batch_size}};
    nlohmann::json ds;
    if (c.dataset.kind == DatasetSpec::Kind::Synthetic) {
        ds["kind"] = "synthetic";
        ds["classes"] = c.dataset.classes;
        ds["feature_dim"] = c.dataset.feature_dim;
        ds["samples_per_node"] = c.dataset.samples_per_node;
        ds["mean_radius"] = c.dataset.mean_radius;
        ds["test_fraction"] = c.dataset.test_fraction;
    } else {
        ds["kind"] = "idx";
        ds["train_images"] = c.dataset.train_images;
        ds["train_labels"] = c.dataset.train_labels;
        ds["test_images"] = c.dataset.test_images;
        ds["test_labels"] = c.dataset.test_labels;
    }
    ds["dirichlet_beta"] = c.dataset.dirichlet_beta;
    doc["dataset"] = ds;
    doc["zeta_grid"] = c.zeta_grid;
    doc["seed"] = c.seed;
    doc["eval_test_cap"] = c.eval_test_cap;
    return doc;
}

std::vector<std::string> preset_names() {
    return {"foe-f01",  "foe-f03",  "alie-f01",      "alie-f03",
            "flood-f1", "flood-f2", "flood-finf",    "connectivity-f03",
            "basalt-foe-f01"};
}

SimConfig preset_config(const std::string& name) {
    SimConfig c;
    c.n = 300;
    c.view_size = 20;
    c.bootstrap_size = 30;
    c.rounds = 200;
    c.flood_force = 2;
    c.sampler = SamplerKind::HistoryAware;
    c.threshold_mode = ThresholdMode::Adaptive;
    c.aggregator = AggregatorKind::CS;
    // Desk-scale task kept light so n=300 presets finish quickly.
    c.dataset.feature_dim = 16;
    c.dataset.samples_per_node = 30;
    c.eval_test_cap = 1500;

    if (name == "foe-f01") {
        c.attack = AttackKind::FallOfEmpires;
        c.byz_fraction = 0.1;
    } else if (name == "foe-f03") {
        c.attack = AttackKind::FallOfEmpires;
        c.byz_fraction = 0.3;
    } else if (name == "alie-f01") {
        c.attack = AttackKind::LittleIsEnough;
        c.byz_fraction = 0.1;
    } else if (name == "alie-f03") {
        c.attack = AttackKind::LittleIsEnough;
        c.byz_fraction = 0.3;
    } else if (name == "flood-f1" || name == "flood-f2" ||
               name == "flood-finf") {
        c.attack = AttackKind::None;
        c.byz_fraction = 0.1;
        c.rounds = 100;
        c.flood_force = name == "flood-f1"
                            ? 1
                            : (name == "flood-f2" ? 2 : kUnlimitedForce);
    } else if (name == "connectivity-f03") {
        c.attack = AttackKind::None;
        c.byz_fraction = 0.3;
        c.rounds = 120;
    } else if (name == "basalt-foe-f01") {
        c.attack = AttackKind::FallOfEmpires;
        c.byz_fraction = 0.1;
        c.sampler = SamplerKind::StreamBaseline;
        c.threshold_mode = ThresholdMode::Fixed;
        c.fixed_b = 8;  // 4 * f * v
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

}  // namespace gossip
