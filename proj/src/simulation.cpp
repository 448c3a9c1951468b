#include "gossip/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "gossip/config.hpp"
#include "gossip/errors.hpp"

namespace gossip {

void SimConfig::validate() const {
    if (n < view_size + 1)
        throw ConfigError("n: must be at least view_size + 1");
    if (view_size < 1) throw ConfigError("view_size: must be >= 1");
    if (bootstrap_size < 1) throw ConfigError("bootstrap_size: must be >= 1");
    if (rounds < 1) throw ConfigError("rounds: must be >= 1");
    if (byz_fraction < 0.0 || byz_fraction >= 0.5)
        throw ConfigError("byz_fraction: must lie in [0, 0.5)");
    if (kappa <= 0.0 || kappa >= 1.0)
        throw ConfigError("kappa: must lie in (0, 1)");
    if (threshold_mode == ThresholdMode::Fixed && fixed_b < 0.0)
        throw ConfigError("fixed_b: must be >= 0");
    if (trainer.eta <= 0.0) throw ConfigError("trainer.eta: must be > 0");
    if (trainer.momentum < 0.0 || trainer.momentum >= 1.0)
        throw ConfigError("trainer.momentum: must lie in [0, 1)");
    if (trainer.batch_size < 1)
        throw ConfigError("trainer.batch_size: must be >= 1");
    if (refresh.interval < 1)
        throw ConfigError("seed_refresh.interval: must be >= 1");
    if (refresh.seeds_per_refresh < 0)
        throw ConfigError("seed_refresh.count: must be >= 0");
    if (dataset.kind == DatasetSpec::Kind::Synthetic) {
        if (dataset.classes < 2) throw ConfigError("dataset.classes: >= 2");
        if (dataset.feature_dim < 1)
            throw ConfigError("dataset.feature_dim: >= 1");
        if (dataset.samples_per_node < 1)
            throw ConfigError("dataset.samples_per_node: >= 1");
        if (dataset.test_fraction <= 0.0 || dataset.test_fraction >= 1.0)
            throw ConfigError("dataset.test_fraction: must lie in (0, 1)");
    }
    for (double z : zeta_grid)
        if (z < 0.0) throw ConfigError("zeta_grid: entries must be >= 0");
}

Simulation::Simulation(const SimConfig& config) : cfg_(config) {
    cfg_.validate();
    cfg_.refresh.seeds_per_refresh =
        std::min(cfg_.refresh.seeds_per_refresh, cfg_.view_size);
    zeta_grid_ = cfg_.zeta_grid;
    if (zeta_grid_.empty()) {
        for (int e = -4; e <= 4; ++e) zeta_grid_.push_back(std::pow(2.0, e));
    }
    baseline_policy_.interval =
        cfg_.baseline_interval >= 0
            ? cfg_.baseline_interval
            : static_cast<int>(std::lround(cfg_.view_size / cfg_.baseline_rho));
    baseline_policy_.seeds_per_refresh =
        cfg_.baseline_count >= 0
            ? cfg_.baseline_count
            : static_cast<int>(std::lround(cfg_.baseline_rho * cfg_.view_size));
    bootstrap();
}

void Simulation::build_dataset() {
    Dataset train;
    if (cfg_.dataset.kind == DatasetSpec::Kind::Idx) {
        train = load_idx(cfg_.dataset.train_images, cfg_.dataset.train_labels);
        test_ = load_idx(cfg_.dataset.test_images, cfg_.dataset.test_labels);
        if (train.feature_dim != test_.feature_dim)
            throw ConfigError("dataset: train/test feature dims differ");
        const int classes = std::max(train.classes, test_.classes);
        train.classes = test_.classes = classes;
    } else {
        const auto& ds = cfg_.dataset;
        const std::size_t train_count =
            static_cast<std::size_t>(cfg_.n) * ds.samples_per_node;
        const std::size_t pool_count = static_cast<std::size_t>(
            std::llround(train_count / (1.0 - ds.test_fraction)));
        Rng data_rng = substream(cfg_.seed, Stream::DataGen);
        const Dataset pool = make_blobs(pool_count, ds.feature_dim, ds.classes,
                                        ds.mean_radius, data_rng);

        // The held-out split is taken i.i.d. so that F1 measures the
        // global objective rather than any node's skewed shard.
        std::vector<std::uint32_t> idx(pool.size());
        std::iota(idx.begin(), idx.end(), 0u);
        Rng split_rng = substream(cfg_.seed, Stream::Partition);
        split_rng.shuffle(idx);
        const std::size_t test_count = pool.size() - train_count;

        test_.feature_dim = train.feature_dim = pool.feature_dim;
        test_.classes = train.classes = pool.classes;
        for (std::size_t i = 0; i < test_count; ++i)
            test_.push_row(pool.row(idx[i]), pool.labels[idx[i]]);
        for (std::size_t i = test_count; i < pool.size(); ++i)
            train.push_row(pool.row(idx[i]), pool.labels[idx[i]]);
    }

    Rng part_rng = substream(cfg_.seed, Stream::Partition, 1);
    shards_ =
        dirichlet_partition(train, cfg_.n, cfg_.dataset.dirichlet_beta, part_rng);
    spec_.feature_dim = train.feature_dim;
    spec_.classes = train.classes;

    if (cfg_.eval_test_cap > 0 &&
        test_.size() > static_cast<std::size_t>(cfg_.eval_test_cap)) {
        Dataset eval;
        eval.feature_dim = test_.feature_dim;
        eval.classes = test_.classes;
        for (int i = 0; i < cfg_.eval_test_cap; ++i)
            eval.push_row(test_.row(i), test_.labels[i]);
        eval_cap_ = std::move(eval);
    }
}

void Simulation::bootstrap() {
    const int n = cfg_.n;
    const auto n_byz =
        static_cast<int>(std::lround(cfg_.byz_fraction * n));

    // Scatter roles with a seeded shuffle.
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0u);
    Rng role_rng = substream(cfg_.seed, Stream::Roles);
    role_rng.shuffle(order);
    roles_.assign(n, Role::Honest);
    for (int i = 0; i < n_byz; ++i) roles_[order[i]] = Role::Byzantine;
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i)
        if (roles_[i] == Role::Byzantine) byz_ids_.push_back(i);

    build_dataset();

    threshold_params_.n_honest = n - n_byz;
    threshold_params_.n_byz = n_byz;
    threshold_params_.view_size = cfg_.view_size;
    threshold_params_.kappa = cfg_.kappa;
    threshold_params_.c0 =
        cfg_.c0_override > 0.0
            ? cfg_.c0_override
            : (1.0 - cfg_.byz_fraction) * cfg_.bootstrap_size;
    threshold_params_.c0 = std::max(threshold_params_.c0, 1.0);

    nodes_.reserve(n);
    train_rngs_.reserve(n);
    for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
        NodeState node;
        node.id = i;
        node.role = roles_[i];
        node.history = History(static_cast<std::uint32_t>(n));

        // Bootstrap set: i.i.d. identifiers, redrawn until it holds at
        // least one honest id other than the node itself.
        Rng boot_rng = substream(cfg_.seed, Stream::Bootstrap, i);
        for (int attempt = 0;; ++attempt) {
            if (attempt > 1000)
                throw ConfigError("bootstrap_size: cannot draw an honest id");
            std::vector<NodeId> draw(cfg_.bootstrap_size);
            bool ok = false;
            for (auto& id : draw) {
                id = static_cast<NodeId>(boot_rng.below(n));
                if (id != i && roles_[id] == Role::Honest) ok = true;
            }
            if (!ok) continue;
            for (NodeId id : draw)
                if (id != i) node.history.insert(id);
            break;
        }
        if (cfg_.worst_case_byz_history) {
            for (NodeId b : byz_ids_)
                if (b != i) node.history.insert(b);
        }

        Rng seed_rng = substream(cfg_.seed, Stream::Seeds, i);
        node.seeds.resize(cfg_.view_size);
        for (int k = 0; k < cfg_.view_size; ++k)
            node.seeds[k] = {seed_rng.next_u64(),
                             static_cast<std::uint32_t>(k)};
        node.view = select_view(node.history, node.seeds, i);

        node.model = ModelVector(spec_.param_dim());
        train_rngs_.push_back(substream(cfg_.seed, Stream::Training, i));
        node.trainer =
            make_trainer_state(spec_, shards_[i].size(), train_rngs_.back());
        nodes_.push_back(std::move(node));
    }
}

RoundGraph Simulation::graph_snapshot() const {
    RoundGraph graph;
    graph.round = round_;
    graph.out_views.reserve(nodes_.size());
    for (const NodeState& node : nodes_) graph.out_views.push_back(node.view);
    return graph;
}

ThresholdEstimate Simulation::round_threshold(int t) const {
    return estimate_threshold(threshold_params_, cfg_.n,
                              static_cast<double>(t));
}

double Simulation::effective_threshold(const ThresholdEstimate& est) const {
    const double cap = static_cast<double>(cfg_.view_size - 1);
    switch (cfg_.threshold_mode) {
        case ThresholdMode::Adaptive:
            return est.b_t;
        case ThresholdMode::Fixed:
            return std::min(cfg_.fixed_b, cap);
        case ThresholdMode::Conservative:
            return cap;
    }
    return est.b_t;
}

std::vector<NodeId> Simulation::distinct_view_targets(
    const NodeState& node) const {
    std::vector<NodeId> targets;
    targets.reserve(node.view.size());
    for (NodeId id : node.view) {
        if (std::find(targets.begin(), targets.end(), id) == targets.end())
            targets.push_back(id);
    }
    return targets;
}

RoundMetrics Simulation::step() {
    const int t = ++round_;
    round_messages_ = 0;
    std::vector<std::vector<NodeId>> incoming(nodes_.size());

    // Phase 1: message generation from round t-1 views.
    for (const NodeState& node : nodes_) {
        if (node.role == Role::Honest) {
            Rng push_rng = substream(cfg_.seed, Stream::PushTarget, node.id, t);
            const NodeId push_to = node.view[push_rng.below(node.view.size())];
            incoming[push_to].insert(incoming[push_to].end(),
                                     node.view.begin(), node.view.end());

            Rng pull_rng = substream(cfg_.seed, Stream::PullTarget, node.id, t);
            const NodeId pull_from =
                node.view[pull_rng.below(node.view.size())];
            if (roles_[pull_from] == Role::Honest) {
                const View& response = nodes_[pull_from].view;
                incoming[node.id].insert(incoming[node.id].end(),
                                         response.begin(), response.end());
            } else {
                // Byzantine responders always answer with Byzantine ids.
                Rng resp_rng = substream(cfg_.seed, Stream::PullResponse,
                                         pull_from, t, node.id);
                for (int k = 0; k < cfg_.view_size; ++k)
                    incoming[node.id].push_back(
                        byz_ids_[resp_rng.below(byz_ids_.size())]);
            }
            round_messages_ += 2;  // one push, one pull request
        } else {
            std::vector<NodeId> honest_neighbors;
            for (NodeId id : distinct_view_targets(node))
                if (roles_[id] == Role::Honest) honest_neighbors.push_back(id);
            Rng flood_rng =
                substream(cfg_.seed, Stream::FloodTarget, node.id, t);
            const auto floods =
                flood_round(node.id, honest_neighbors, cfg_.flood_force,
                            byz_ids_, cfg_.view_size, flood_rng);
            for (const FloodMessage& msg : floods) {
                incoming[msg.target].insert(incoming[msg.target].end(),
                                            msg.push.ids.begin(),
                                            msg.push.ids.end());
            }
            round_messages_ += static_cast<long long>(floods.size());
        }
    }

    // Phases 2-4: history update, seed refresh, view re-selection.
    for (NodeState& node : nodes_) {
        Rng refresh_rng =
            substream(cfg_.seed, Stream::SeedRefresh, node.id, t);
        if (node.role == Role::Byzantine ||
            cfg_.sampler == SamplerKind::HistoryAware) {
            // Byzantine nodes keep full memory regardless of the honest
            // protocol under test.
            accumulate_history(node, incoming[node.id]);
            refresh_seeds(node, t, cfg_.refresh, refresh_rng);
            node.view = select_view(node.history, node.seeds, node.id);
        } else {
            baseline_round(node, incoming[node.id], t, baseline_policy_,
                           refresh_rng);
        }
    }

    // Phase 5: filtering threshold for this round.
    const ThresholdEstimate est = round_threshold(t);
    const double b_eff = effective_threshold(est);

    // Phases 6-7: model pull, per-victim poisoning, aggregation, training.
    int violation = 0;
    exchange_and_train(b_eff, &violation);
    violation_rounds_ += violation;

    // Phase 8: metrics.
    RoundMetrics row;
    row.round = t;
    const RoundGraph graph = graph_snapshot();
    row.f_in_out = byz_fraction_out(graph, roles_);
    row.f_in_in = byz_fraction_in(graph, roles_);
    row.byz_bound = est.byz_ratio;
    row.threshold = b_eff;
    row.hssr = hssr(graph, roles_);
    capture_f1(row);
    row.messages_sent = round_messages_;
    return row;
}

void Simulation::exchange_and_train(double b_eff, int* violation_flag) {
    std::vector<const ModelVector*> honest_models;
    for (const NodeState& node : nodes_)
        if (node.role == Role::Honest) honest_models.push_back(&node.model);

    CollusionOracle oracle;
    if (cfg_.attack != AttackKind::None) oracle = build_oracle(honest_models);

    const double ceil_b = std::ceil(b_eff);
    std::vector<std::pair<NodeId, ModelVector>> staged;
    staged.reserve(honest_models.size());

    for (NodeState& node : nodes_) {
        if (node.role != Role::Honest) continue;

        // Count Byzantine slots against the round's threshold.
        std::size_t byz_slots = 0;
        for (NodeId id : node.view)
            if (roles_[id] == Role::Byzantine) ++byz_slots;
        if (static_cast<double>(byz_slots) > ceil_b) *violation_flag = 1;

        const std::vector<NodeId> targets = distinct_view_targets(node);
        const double weight = 1.0 / static_cast<double>(targets.size() + 1);

        // Per-victim crafted poisons must outlive the aggregation.
        std::vector<ModelVector> poisons;
        poisons.reserve(targets.size());
        std::vector<ReceivedModel> received;
        received.reserve(targets.size());
        double radius = 0.0;
        if (cfg_.attack != AttackKind::None) {
            radius = cfg_.aggregator == AggregatorKind::PlainAverage
                         ? std::numeric_limits<double>::infinity()
                         : victim_clip_radius(oracle, node.model, b_eff);
        }
        for (NodeId j : targets) {
            if (roles_[j] == Role::Honest) {
                received.push_back({j, &nodes_[j].model, weight});
            } else {
                switch (cfg_.attack) {
                    case AttackKind::None:
                        // No poisoning: the adversary serves its real
                        // (never-trained) model.
                        poisons.push_back(nodes_[j].model);
                        break;
                    case AttackKind::FallOfEmpires:
                        poisons.push_back(foe_poison(oracle, zeta_grid_,
                                                     node.model, radius));
                        break;
                    case AttackKind::LittleIsEnough:
                        poisons.push_back(alie_poison(oracle, zeta_grid_,
                                                      node.model, radius));
                        break;
                }
                received.push_back({j, &poisons.back(), weight});
            }
        }

        const auto diffs = sort_differences(node.model, received);
        ModelVector aggregated;
        switch (cfg_.aggregator) {
            case AggregatorKind::PlainAverage:
                aggregated = plain_average(node.model, diffs);
                break;
            case AggregatorKind::GTS:
                aggregated = gts_aggregate(node.model, diffs, b_eff * weight);
                break;
            case AggregatorKind::CS:
                aggregated = cs_aggregate(node.model, diffs, b_eff * weight);
                break;
            case AggregatorKind::CWTM: {
                std::vector<const ModelVector*> models;
                for (const ReceivedModel& r : received)
                    models.push_back(r.model);
                // Largest valid trim keeps 2b < |models| + 1.
                const int max_trim = static_cast<int>(models.size()) / 2;
                const int b_int =
                    std::min(static_cast<int>(ceil_b), max_trim);
                aggregated =
                    cwtm_aggregate(node.model, models, std::max(b_int, 0));
                break;
            }
        }

        local_step(spec_, aggregated, node.trainer, shards_[node.id],
                   cfg_.trainer, train_rngs_[node.id]);
        staged.emplace_back(node.id, std::move(aggregated));
    }

    for (auto& [id, model] : staged) nodes_[id].model = std::move(model);
}

void Simulation::capture_f1(RoundMetrics& row) {
    const Dataset* eval_set = eval_cap_ ? &*eval_cap_ : &test_;
    std::vector<double> scores;
    for (const NodeState& node : nodes_) {
        if (node.role != Role::Honest) continue;
        scores.push_back(f1_macro(spec_, node.model, *eval_set));
    }
    const auto [mean, sd] = mean_std(scores);
    row.f1_mean = mean;
    row.f1_std = sd;
}

RunArtifact Simulation::run(std::ostream* csv) {
    const auto start = std::chrono::steady_clock::now();
    RunArtifact artifact;
    if (csv) *csv << csv_header() << '\n';
    for (int t = 1; t <= cfg_.rounds; ++t) {
        RoundMetrics row = step();
        if (csv) append_csv_row(*csv, row);
        artifact.rows.push_back(row);
    }
    for (const NodeState& node : nodes_) {
        if (node.role != Role::Honest) continue;
        artifact.final_f1.emplace_back(node.id,
                                       f1_macro(spec_, node.model, test_));
    }
    artifact.threshold_violation_rounds = violation_rounds_;
    artifact.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return artifact;
}

const char* Simulation::csv_header() {
    return "round,f_in_out,f_in_in,B_t,b_t,hssr,f1_mean,f1_std,messages_sent";
}

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

void Simulation::append_csv_row(std::ostream& out, const RoundMetrics& row) {
    std::string line = std::to_string(row.round);
    for (double v : {row.f_in_out, row.f_in_in, row.byz_bound, row.threshold,
                     row.hssr, row.f1_mean, row.f1_std}) {
        line.push_back(',');
        append_number(line, v);
    }
    line.push_back(',');
    line += std::to_string(row.messages_sent);
    line.push_back('\n');
    out << line;
}

RunArtifact run_to_files(const SimConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(out_dir))
        throw IoError("output directory does not exist: " + out_dir);

    const fs::path csv_path = fs::path(out_dir) / "metrics.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open " + csv_path.string());

    Simulation sim(config);
    RunArtifact artifact = sim.run(&csv);
    csv.close();

    nlohmann::json summary;
    summary["config"] = config_to_json(config);
    summary["rounds"] = config.rounds;
    summary["duration_seconds"] = artifact.duration_seconds;
    summary["threshold_violation_rounds"] = artifact.threshold_violation_rounds;
    nlohmann::json f1 = nlohmann::json::array();
    double final_mean = 0.0;
    for (const auto& [id, score] : artifact.final_f1) {
        f1.push_back({id, score});
        final_mean += score;
    }
    if (!artifact.final_f1.empty()) final_mean /= artifact.final_f1.size();
    summary["final_f1"] = f1;
    summary["final_f1_mean"] = final_mean;

    const fs::path json_path = fs::path(out_dir) / "summary.json";
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw IoError("cannot open " + json_path.string());
    js << summary.dump(2) << '\n';
    return artifact;
}

}  // namespace gossip
