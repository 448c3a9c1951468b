#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gossip/adversary.hpp"
#include "gossip/aggregation.hpp"
#include "gossip/learning.hpp"
#include "gossip/metrics.hpp"
#include "gossip/peer_sampling.hpp"
#include "gossip/threshold.hpp"

namespace gossip {

enum class ThresholdMode { Adaptive, Fixed, Conservative };

struct DatasetSpec {
    enum class Kind { Synthetic, Idx } kind = Kind::Synthetic;
    double dirichlet_beta = 5.0;
    // Synthetic blobs.
    int classes = 10;
    int feature_dim = 32;
    int samples_per_node = 60;
    double mean_radius = 2.5;
    double test_fraction = 0.2;
    // IDX files.
    std::string train_images, train_labels, test_images, test_labels;
};

struct SimConfig {
    int n = 300;
    int view_size = 20;
    int bootstrap_size = 30;
    int rounds = 200;
    double byz_fraction = 0.1;
    FloodForce flood_force = 2;
    AttackKind attack = AttackKind::None;
    AggregatorKind aggregator = AggregatorKind::CS;
    SamplerKind sampler = SamplerKind::HistoryAware;
    ThresholdMode threshold_mode = ThresholdMode::Adaptive;
    double fixed_b = 0.0;
    double kappa = 1e-3;
    double c0_override = -1.0;  // < 0: derive (1 - f) * bootstrap_size
    bool worst_case_byz_history = false;
    SeedRefreshPolicy refresh{1, 10};
    double baseline_rho = 0.25;   // interval = v / rho, count = rho * v
    int baseline_interval = -1;   // explicit overrides when >= 0
    int baseline_count = -1;
    TrainerConfig trainer;
    DatasetSpec dataset;
    std::vector<double> zeta_grid;  // empty: 2^-4 .. 2^4
    std::uint64_t seed = 1;
    int eval_test_cap = 0;  // 0 = full test set each round

    // Throws ConfigError naming the offending field.
    void validate() const;
};

struct RunArtifact {
    std::vector<RoundMetrics> rows;
    std::vector<std::pair<NodeId, double>> final_f1;  // honest nodes
    double duration_seconds = 0;
    // Rounds in which some honest view held more Byzantine ids than the
    // ceiling of the round's filtering threshold.
    int threshold_violation_rounds = 0;
};

class Simulation {
public:
    explicit Simulation(const SimConfig& config);

    // Executes round current_round()+1; returns its metrics row.
    RoundMetrics step();

    // Runs all configured rounds; streams CSV rows into `csv` when given.
    RunArtifact run(std::ostream* csv = nullptr);

    int current_round() const { return round_; }
    const std::vector<NodeState>& nodes() const { return nodes_; }
    const std::vector<Role>& roles() const { return roles_; }
    const Dataset& test_set() const { return test_; }
    const std::vector<Dataset>& shards() const { return shards_; }
    const ClassifierSpec& classifier() const { return spec_; }
    RoundGraph graph_snapshot() const;

    static const char* csv_header();
    static void append_csv_row(std::ostream& out, const RoundMetrics& row);

private:
    void bootstrap();
    void build_dataset();
    ThresholdEstimate round_threshold(int t) const;
    double effective_threshold(const ThresholdEstimate& est) const;
    std::vector<NodeId> distinct_view_targets(const NodeState& node) const;
    void exchange_and_train(double b_eff, int* violation_flag);
    void capture_f1(RoundMetrics& row);

    SimConfig cfg_;
    int round_ = 0;
    std::vector<NodeState> nodes_;
    std::vector<Role> roles_;
    std::vector<NodeId> byz_ids_;
    std::vector<Dataset> shards_;
    Dataset test_;
    std::optional<Dataset> eval_cap_;
    ClassifierSpec spec_;
    std::vector<Rng> train_rngs_;
    std::vector<double> zeta_grid_;
    SeedRefreshPolicy baseline_policy_;
    ThresholdParams threshold_params_;
    long long round_messages_ = 0;
    int violation_rounds_ = 0;
};

// Runs and writes <out_dir>/metrics.csv plus <out_dir>/summary.json.
// The directory must already exist; throws IoError naming it otherwise.
RunArtifact run_to_files(const SimConfig& config, const std::string& out_dir);

}  // namespace gossip
