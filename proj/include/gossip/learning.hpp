#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gossip/model_vector.hpp"
#include "gossip/rng.hpp"

namespace gossip {

// Dense feature matrix (row-major) with integer class labels.
struct Dataset {
    int feature_dim = 0;
    int classes = 0;
    std::vector<double> features;  // size() * feature_dim
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * feature_dim,
                static_cast<std::size_t>(feature_dim)};
    }
    void push_row(std::span<const double> x, int label);
};

// Multinomial logistic regression on a flat parameter vector:
// weights (classes x feature_dim, row-major) followed by biases.
struct ClassifierSpec {
    int feature_dim = 0;
    int classes = 0;
    std::size_t param_dim() const {
        return static_cast<std::size_t>(feature_dim) * classes + classes;
    }
};

struct TrainerConfig {
    double eta = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
};

// Per-node optimizer state. The epoch order is reshuffled once the
// cursor wraps; velocity is local and never gossiped.
struct TrainerState {
    ModelVector velocity;
    std::vector<std::uint32_t> order;
    std::size_t cursor = 0;
};

TrainerState make_trainer_state(const ClassifierSpec& spec,
                                std::size_t shard_size, Rng& rng);

// Mean cross-entropy over the given sample indices.
double ce_loss(const ClassifierSpec& spec, const ModelVector& params,
               const Dataset& data, std::span<const std::uint32_t> batch);

// Gradient of ce_loss with respect to params.
ModelVector ce_gradient(const ClassifierSpec& spec, const ModelVector& params,
                        const Dataset& data,
                        std::span<const std::uint32_t> batch);

// One mini-batch SGD-with-momentum step; the batch is drawn without
// replacement from the shard, reshuffling each epoch.
void local_step(const ClassifierSpec& spec, ModelVector& params,
                TrainerState& state, const Dataset& shard,
                const TrainerConfig& cfg, Rng& rng);

// Predicted class per sample; non-finite logits fall back to class 0.
std::vector<int> predict(const ClassifierSpec& spec, const ModelVector& params,
                         const Dataset& data);

// Macro-averaged F1 over classes present in the ground truth.
double f1_macro(const ClassifierSpec& spec, const ModelVector& params,
                const Dataset& test);

// Gaussian-blob classification task: class means drawn isotropically at
// the given radius, unit noise.
Dataset make_blobs(std::size_t n_samples, int feature_dim, int classes,
                   double mean_radius, Rng& rng);

// Heterogeneous shards: per class, node proportions drawn from
// Dirichlet(beta). Guarantees no empty shard by moving one sample from
// the largest shard. Throws InsufficientDataError when samples < nodes.
std::vector<Dataset> dirichlet_partition(const Dataset& data, int n_nodes,
                                         double beta, Rng& rng);

// IDX container ingestion (big-endian magic + dims + payload).
struct IdxTensor {
    std::vector<std::size_t> dims;
    std::vector<std::uint8_t> data;
};

IdxTensor read_idx(const std::string& path);

// Pairs an images file (3-d u8 tensor, scaled to [0,1]) with a labels
// file (1-d u8 tensor). Throws MalformedFileError / InsufficientDataError.
Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path);

}  // namespace gossip
