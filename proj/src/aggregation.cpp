#include "gossip/aggregation.hpp"

#include <algorithm>
#include <cmath>

#include "gossip/errors.hpp"

namespace gossip {

std::vector<NeighborDifference> sort_differences(
    const ModelVector& local, std::span<const ReceivedModel> received) {
    std::vector<NeighborDifference> diffs;
    diffs.reserve(received.size());
    for (const ReceivedModel& r : received) {
        if (r.model->dim() != local.dim()) {
            throw DimensionMismatchError(
                "received model from node " + std::to_string(r.source) +
                " has dimension " + std::to_string(r.model->dim()) +
                ", expected " + std::to_string(local.dim()));
        }
        NeighborDifference d;
        d.source = r.source;
        d.z = *r.model - local;
        d.norm = d.z.norm();
        d.weight = r.weight;
        diffs.push_back(std::move(d));
    }
    std::sort(diffs.begin(), diffs.end(),
              [](const NeighborDifference& a, const NeighborDifference& b) {
                  if (a.norm != b.norm) return a.norm > b.norm;
                  return a.source < b.source;
              });
    return diffs;
}

ModelVector gts_aggregate(const ModelVector& local,
                          std::span<const NeighborDifference> sorted_diffs,
                          double b) {
    double total = 0.0;
    for (const auto& d : sorted_diffs) total += d.weight;
    if (b >= total) return local;  // everything trimmed

    ModelVector out = local;
    double cumulative = 0.0;
    std::size_t pivot = sorted_diffs.size();
    for (std::size_t i = 0; i < sorted_diffs.size(); ++i) {
        cumulative += sorted_diffs[i].weight;
        if (cumulative >= b) {
            pivot = i;
            out.axpy(cumulative - b, sorted_diffs[i].z);  // residual weight
            break;
        }
    }
    for (std::size_t i = pivot + 1; i < sorted_diffs.size(); ++i)
        out.axpy(sorted_diffs[i].weight, sorted_diffs[i].z);
    return out;
}

ModelVector cs_aggregate(const ModelVector& local,
                         std::span<const NeighborDifference> sorted_diffs,
                         double b) {
    double total = 0.0;
    for (const auto& d : sorted_diffs) total += d.weight;
    if (b > 0.0 && 2.0 * b >= total) return local;

    ModelVector out = local;
    if (b <= 0.0) {
        for (const auto& d : sorted_diffs) out.axpy(d.weight, d.z);
        return out;
    }

    // Largest tau with at least 2b weight mass at norms >= tau; scanning
    // the sorted norms inclusive of ties.
    double clip_norm = 0.0;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < sorted_diffs.size();) {
        const double norm = sorted_diffs[i].norm;
        std::size_t j = i;
        while (j < sorted_diffs.size() && sorted_diffs[j].norm == norm) {
            cumulative += sorted_diffs[j].weight;
            ++j;
        }
        if (cumulative >= 2.0 * b) {
            clip_norm = norm;
            break;
        }
        i = j;
    }

    for (const auto& d : sorted_diffs) {
        const double scale =
            d.norm > clip_norm ? d.weight * (clip_norm / d.norm) : d.weight;
        out.axpy(scale, d.z);
    }
    return out;
}

ModelVector cwtm_aggregate(const ModelVector& local,
                           std::span<const ModelVector* const> received,
                           int b) {
    const std::size_t count = received.size() + 1;
    if (b < 0 || 2 * static_cast<std::size_t>(b) >= count) {
        throw ThresholdExceedsMassError(
            "trim count " + std::to_string(b) + " too large for " +
            std::to_string(count) + " values");
    }
    for (const ModelVector* m : received) {
        if (m->dim() != local.dim())
            throw DimensionMismatchError("received model dimension mismatch");
    }

    ModelVector out(local.dim());
    std::vector<double> column(count);
    const std::size_t kept = count - 2 * static_cast<std::size_t>(b);
    for (std::size_t i = 0; i < local.dim(); ++i) {
        column[0] = local[i];
        for (std::size_t j = 0; j < received.size(); ++j)
            column[j + 1] = (*received[j])[i];
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (std::size_t j = b; j < b + kept; ++j) sum += column[j];
        out[i] = sum / static_cast<double>(kept);
    }
    return out;
}

ModelVector plain_average(const ModelVector& local,
                          std::span<const NeighborDifference> diffs) {
    ModelVector out = local;
    for (const auto& d : diffs) out.axpy(d.weight, d.z);
    return out;
}

ModelVector gossip_step(const ModelVector& aggregated,
                        const ModelVector& grad, double eta) {
    ModelVector out = aggregated;
    out.axpy(-eta, grad);
    return out;
}

}  // namespace gossip
