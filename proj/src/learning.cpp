#include "gossip/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "gossip/errors.hpp"

namespace gossip {

void Dataset::push_row(std::span<const double> x, int label) {
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
}

TrainerState make_trainer_state(const ClassifierSpec& spec,
                                std::size_t shard_size, Rng& rng) {
    TrainerState state;
    state.velocity = ModelVector(spec.param_dim());
    state.order.resize(shard_size);
    std::iota(state.order.begin(), state.order.end(), 0u);
    rng.shuffle(state.order);
    return state;
}

namespace {

// logits[c] = W[c,:] . x + bias[c]
void logits_for(const ClassifierSpec& spec, const ModelVector& params,
                std::span<const double> x, std::vector<double>& logits) {
    const std::size_t bias_base =
        static_cast<std::size_t>(spec.feature_dim) * spec.classes;
    for (int c = 0; c < spec.classes; ++c) {
        double acc = params[bias_base + c];
        const std::size_t row = static_cast<std::size_t>(c) * spec.feature_dim;
        for (int d = 0; d < spec.feature_dim; ++d)
            acc += params[row + d] * x[d];
        logits[c] = acc;
    }
}

// In-place softmax with max subtraction.
void softmax(std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - m);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

}  // namespace

double ce_loss(const ClassifierSpec& spec, const ModelVector& params,
               const Dataset& data, std::span<const std::uint32_t> batch) {
    std::vector<double> logits(spec.classes);
    double loss = 0.0;
    for (std::uint32_t idx : batch) {
        logits_for(spec, params, data.row(idx), logits);
        softmax(logits);
        const double p = std::max(logits[data.labels[idx]], 1e-300);
        loss -= std::log(p);
    }
    return loss / static_cast<double>(batch.size());
}

ModelVector ce_gradient(const ClassifierSpec& spec, const ModelVector& params,
                        const Dataset& data,
                        std::span<const std::uint32_t> batch) {
    ModelVector grad(spec.param_dim());
    const std::size_t bias_base =
        static_cast<std::size_t>(spec.feature_dim) * spec.classes;
    std::vector<double> logits(spec.classes);
    for (std::uint32_t idx : batch) {
        const auto x = data.row(idx);
        logits_for(spec, params, x, logits);
        softmax(logits);
        logits[data.labels[idx]] -= 1.0;  // p - onehot(y)
        for (int c = 0; c < spec.classes; ++c) {
            const double g = logits[c];
            const std::size_t row =
                static_cast<std::size_t>(c) * spec.feature_dim;
            for (int d = 0; d < spec.feature_dim; ++d)
                grad[row + d] += g * x[d];
            grad[bias_base + c] += g;
        }
    }
    grad *= 1.0 / static_cast<double>(batch.size());
    return grad;
}

void local_step(const ClassifierSpec& spec, ModelVector& params,
                TrainerState& state, const Dataset& shard,
                const TrainerConfig& cfg, Rng& rng) {
    const std::size_t batch_size =
        std::min<std::size_t>(cfg.batch_size, shard.size());
    std::vector<std::uint32_t> batch;
    batch.reserve(batch_size);
    while (batch.size() < batch_size) {
        if (state.cursor >= state.order.size()) {
            rng.shuffle(state.order);
            state.cursor = 0;
        }
        batch.push_back(state.order[state.cursor++]);
    }

    const ModelVector grad = ce_gradient(spec, params, shard, batch);
    state.velocity *= cfg.momentum;
    state.velocity += grad;
    params.axpy(-cfg.eta, state.velocity);
}

std::vector<int> predict(const ClassifierSpec& spec, const ModelVector& params,
                         const Dataset& data) {
    std::vector<int> out(data.size(), 0);
    std::vector<double> logits(spec.classes);
    for (std::size_t i = 0; i < data.size(); ++i) {
        logits_for(spec, params, data.row(i), logits);
        int best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        bool finite = true;
        for (int c = 0; c < spec.classes; ++c) {
            if (!std::isfinite(logits[c])) {
                finite = false;
                break;
            }
            if (logits[c] > best_val) {
                best_val = logits[c];
                best = c;
            }
        }
        out[i] = finite ? best : 0;
    }
    return out;
}

double f1_macro(const ClassifierSpec& spec, const ModelVector& params,
                const Dataset& test) {
    const std::vector<int> pred = predict(spec, params, test);
    std::vector<long> tp(spec.classes, 0), fp(spec.classes, 0),
        fn(spec.classes, 0), truth(spec.classes, 0);
    for (std::size_t i = 0; i < test.size(); ++i) {
        const int y = test.labels[i];
        const int p = pred[i];
        ++truth[y];
        if (p == y) {
            ++tp[y];
        } else {
            ++fp[p];
            ++fn[y];
        }
    }
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < spec.classes; ++c) {
        if (truth[c] == 0) continue;  // absent from ground truth
        ++present;
        const double denom = 2.0 * tp[c] + fp[c] + fn[c];
        if (denom > 0.0) sum += 2.0 * tp[c] / denom;
    }
    return present > 0 ? sum / present : 0.0;
}

Dataset make_blobs(std::size_t n_samples, int feature_dim, int classes,
                   double mean_radius, Rng& rng) {
    std::vector<double> means(static_cast<std::size_t>(classes) * feature_dim);
    for (int c = 0; c < classes; ++c) {
        double norm = 0.0;
        const std::size_t base = static_cast<std::size_t>(c) * feature_dim;
        for (int d = 0; d < feature_dim; ++d) {
            means[base + d] = rng.normal();
            norm += means[base + d] * means[base + d];
        }
        norm = std::sqrt(norm);
        for (int d = 0; d < feature_dim; ++d)
            means[base + d] *= mean_radius / norm;
    }

    Dataset data;
    data.feature_dim = feature_dim;
    data.classes = classes;
    data.features.reserve(n_samples * feature_dim);
    data.labels.reserve(n_samples);
    std::vector<double> x(feature_dim);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const int label = static_cast<int>(rng.below(classes));
        const std::size_t base = static_cast<std::size_t>(label) * feature_dim;
        for (int d = 0; d < feature_dim; ++d)
            x[d] = means[base + d] + rng.normal();
        data.push_row(x, label);
    }
    return data;
}

std::vector<Dataset> dirichlet_partition(const Dataset& data, int n_nodes,
                                         double beta, Rng& rng) {
    if (data.size() < static_cast<std::size_t>(n_nodes)) {
        throw InsufficientDataError(
            "cannot split " + std::to_string(data.size()) + " samples over " +
            std::to_string(n_nodes) + " nodes");
    }

    // Sample indices grouped by class.
    std::vector<std::vector<std::uint32_t>> by_class(data.classes);
    for (std::size_t i = 0; i < data.size(); ++i)
        by_class[data.labels[i]].push_back(static_cast<std::uint32_t>(i));

    std::vector<std::vector<std::uint32_t>> assigned(n_nodes);
    std::vector<double> props(n_nodes);
    for (int c = 0; c < data.classes; ++c) {
        auto& pool = by_class[c];
        if (pool.empty()) continue;
        rng.shuffle(pool);

        double total = 0.0;
        for (int k = 0; k < n_nodes; ++k) {
            props[k] = rng.gamma(beta);
            total += props[k];
        }
        // Largest-remainder apportionment of |pool| samples.
        std::vector<std::size_t> count(n_nodes);
        std::vector<std::pair<double, int>> remainder(n_nodes);
        std::size_t used = 0;
        for (int k = 0; k < n_nodes; ++k) {
            const double share = props[k] / total * pool.size();
            count[k] = static_cast<std::size_t>(share);
            remainder[k] = {share - count[k], k};
            used += count[k];
        }
        std::sort(remainder.begin(), remainder.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                  });
        for (std::size_t i = 0; used + i < pool.size(); ++i)
            ++count[remainder[i % remainder.size()].second];

        std::size_t offset = 0;
        for (int k = 0; k < n_nodes; ++k) {
            for (std::size_t i = 0; i < count[k]; ++i)
                assigned[k].push_back(pool[offset + i]);
            offset += count[k];
        }
    }

    // Repair empty shards from the largest one.
    for (int k = 0; k < n_nodes; ++k) {
        if (!assigned[k].empty()) continue;
        int largest = 0;
        for (int j = 1; j < n_nodes; ++j)
            if (assigned[j].size() > assigned[largest].size()) largest = j;
        assigned[k].push_back(assigned[largest].back());
        assigned[largest].pop_back();
    }

    std::vector<Dataset> shards(n_nodes);
    for (int k = 0; k < n_nodes; ++k) {
        shards[k].feature_dim = data.feature_dim;
        shards[k].classes = data.classes;
        std::sort(assigned[k].begin(), assigned[k].end());
        for (std::uint32_t idx : assigned[k])
            shards[k].push_row(data.row(idx), data.labels[idx]);
    }
    return shards;
}

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes,
                        std::size_t offset) {
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace

IdxTensor read_idx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes(
        (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 4) throw MalformedFileError("truncated header", 0);
    if (bytes[0] != 0 || bytes[1] != 0)
        throw MalformedFileError("bad magic", 0);
    if (bytes[2] != 0x08)
        throw MalformedFileError("unsupported data type", 2);
    const std::size_t ndims = bytes[3];
    if (ndims == 0 || ndims > 4)
        throw MalformedFileError("unsupported dimensionality", 3);
    if (bytes.size() < 4 + 4 * ndims)
        throw MalformedFileError("truncated dimension table", bytes.size());

    IdxTensor tensor;
    std::size_t total = 1;
    for (std::size_t d = 0; d < ndims; ++d) {
        const std::size_t len = read_be32(bytes, 4 + 4 * d);
        tensor.dims.push_back(len);
        total *= len;
    }
    const std::size_t payload = 4 + 4 * ndims;
    if (bytes.size() < payload + total)
        throw MalformedFileError("truncated payload", bytes.size());
    tensor.data.assign(bytes.begin() + payload,
                       bytes.begin() + payload + total);
    return tensor;
}

Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path) {
    const IdxTensor images = read_idx(images_path);
    const IdxTensor labels = read_idx(labels_path);
    if (images.dims.size() != 3)
        throw MalformedFileError("images file is not a 3-d tensor", 3);
    if (labels.dims.size() != 1)
        throw MalformedFileError("labels file is not a 1-d tensor", 3);
    if (images.dims[0] == 0) throw InsufficientDataError("0 items");
    if (images.dims[0] != labels.dims[0])
        throw MalformedFileError("images/labels item count mismatch", 4);

    Dataset data;
    data.feature_dim = static_cast<int>(images.dims[1] * images.dims[2]);
    int max_label = 0;
    for (std::uint8_t l : labels.data) max_label = std::max<int>(max_label, l);
    data.classes = max_label + 1;
    data.features.resize(images.data.size());
    for (std::size_t i = 0; i < images.data.size(); ++i)
        data.features[i] = images.data[i] / 255.0;
    data.labels.assign(labels.data.begin(), labels.data.end());
    return data;
}

}  // namespace gossip
