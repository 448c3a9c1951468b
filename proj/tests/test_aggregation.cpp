#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gossip/aggregation.hpp"
#include "gossip/errors.hpp"
#include "gossip/rng.hpp"

using namespace gossip;

namespace {

ModelVector mv(std::initializer_list<double> coords) {
    return ModelVector::from_coords(std::vector<double>(coords));
}

ModelVector random_vec(std::size_t d, Rng& rng) {
    ModelVector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = rng.normal();
    return v;
}

double max_abs_diff(const ModelVector& a, const ModelVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Literal evaluation of the trimmed sum over the ascending ordering:
// k* = max{k : sum_{r=k..m} w_(r) >= b}, residual = that suffix - b,
// output = local + sum_{r<k*} w_(r) z_(r) + residual * z_(k*).
ModelVector gts_definition_oracle(const ModelVector& local,
                                  std::vector<NeighborDifference> diffs,
                                  double b) {
    std::sort(diffs.begin(), diffs.end(),
              [](const NeighborDifference& a, const NeighborDifference& c) {
                  if (a.norm != c.norm) return a.norm < c.norm;  // ascending
                  return a.source > c.source;
              });
    const std::size_t m = diffs.size();
    std::ptrdiff_t k_star = -1;
    double residual = 0.0;
    for (std::size_t k = 0; k < m; ++k) {  // enumerate the pivot set
        double suffix = 0.0;
        for (std::size_t r = k; r < m; ++r) suffix += diffs[r].weight;
        if (suffix >= b) {
            k_star = static_cast<std::ptrdiff_t>(k);  // max k satisfying
            residual = suffix - b;
        }
    }
    ModelVector out = local;
    if (k_star < 0) return out;
    for (std::ptrdiff_t r = 0; r < k_star; ++r)
        out.axpy(diffs[r].weight, diffs[r].z);
    out.axpy(residual, diffs[k_star].z);
    return out;
}

// Unweighted drop-the-b-largest oracle.
ModelVector gts_drop_oracle(const ModelVector& local,
                            std::vector<NeighborDifference> diffs, int b) {
    std::sort(diffs.begin(), diffs.end(),
              [](const NeighborDifference& a, const NeighborDifference& c) {
                  return a.norm > c.norm;
              });
    ModelVector out = local;
    for (std::size_t i = b; i < diffs.size(); ++i) out.axpy(1.0, diffs[i].z);
    return out;
}

// Max over tau in {sorted norms} of those with inclusive mass >= 2b.
double cs_pi_oracle(const std::vector<NeighborDifference>& diffs, double b) {
    double best = 0.0;
    for (const auto& candidate : diffs) {
        double mass = 0.0;
        for (const auto& d : diffs)
            if (d.norm >= candidate.norm) mass += d.weight;
        if (mass >= 2.0 * b) best = std::max(best, candidate.norm);
    }
    return best;
}

std::vector<NeighborDifference> diffs_from(
    const ModelVector& local, const std::vector<ModelVector>& models,
    double weight = 1.0) {
    std::vector<ReceivedModel> received;
    for (std::size_t i = 0; i < models.size(); ++i)
        received.push_back({static_cast<NodeId>(i), &models[i], weight});
    return sort_differences(local, received);
}

}  // namespace

TEST_CASE("model vectors reject non-finite coordinates") {
    CHECK_THROWS_AS(ModelVector::from_coords({1.0, std::nan("")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        ModelVector::from_coords({std::numeric_limits<double>::infinity()}),
        std::invalid_argument);
    CHECK(ModelVector::from_coords({1.0, -2.0}).all_finite());
}

TEST_CASE("sort_differences orders by norm, ties by id") {
    const ModelVector local = mv({0, 0});
    std::vector<ModelVector> models = {mv({1, 0}), mv({3, 0}), mv({0, 2})};
    auto diffs = diffs_from(local, models);
    CHECK(diffs[0].norm == doctest::Approx(3));
    CHECK(diffs[1].norm == doctest::Approx(2));
    CHECK(diffs[2].norm == doctest::Approx(1));

    // Two copies of the local model: both zero-norm, ordered by id.
    models = {local, local};
    diffs = diffs_from(local, models);
    CHECK(diffs[0].source == 0);
    CHECK(diffs[1].source == 1);
    CHECK(diffs[0].norm == 0.0);
}

TEST_CASE("sort_differences matches an independent comparison sort") {
    Rng rng(5);
    const ModelVector local = random_vec(4, rng);
    std::vector<ModelVector> models;
    for (int i = 0; i < 5; ++i) models.push_back(random_vec(4, rng));
    const auto diffs = diffs_from(local, models);

    std::vector<double> norms;
    for (const auto& m : models) norms.push_back((m - local).norm());
    std::sort(norms.begin(), norms.end(), std::greater<>());
    for (std::size_t i = 0; i < diffs.size(); ++i)
        CHECK(diffs[i].norm == doctest::Approx(norms[i]).epsilon(1e-12));
}

TEST_CASE("sort_differences rejects mismatched dimensions") {
    const ModelVector local = mv({0, 0});
    const ModelVector bad = mv({1, 2, 3});
    std::vector<ReceivedModel> received{{7, &bad, 1.0}};
    CHECK_THROWS_AS(sort_differences(local, received),
                    DimensionMismatchError);
}

TEST_CASE("gts with b = 0 keeps the full sum") {
    const ModelVector local = mv({1, 1});
    std::vector<ModelVector> models = {mv({2, 1}), mv({1, 3})};
    const auto diffs = diffs_from(local, models);
    const ModelVector out = gts_aggregate(local, diffs, 0.0);
    CHECK(out[0] == doctest::Approx(2.0));
    CHECK(out[1] == doctest::Approx(3.0));
}

TEST_CASE("gts drops the b largest differences under unit weights") {
    const ModelVector local = mv({0});
    std::vector<ModelVector> models = {mv({5}), mv({4}), mv({3}), mv({2}),
                                       mv({1})};
    const auto diffs = diffs_from(local, models);
    const ModelVector out = gts_aggregate(local, diffs, 2.0);
    CHECK(out[0] == doctest::Approx(3 + 2 + 1));
}

TEST_CASE("gts fractional threshold takes residual weight at the pivot") {
    const ModelVector local = mv({0});
    std::vector<ModelVector> models = {mv({5}), mv({4}), mv({3}), mv({2}),
                                       mv({1})};
    const auto diffs = diffs_from(local, models);
    const ModelVector out = gts_aggregate(local, diffs, 1.5);
    // Half of the norm-4 difference plus the three smallest.
    CHECK(out[0] == doctest::Approx(0.5 * 4 + 3 + 2 + 1));
    const ModelVector oracle = gts_definition_oracle(local, diffs, 1.5);
    CHECK(max_abs_diff(out, oracle) < 1e-12);
}

TEST_CASE("gts returns the local model when everything is trimmed") {
    const ModelVector local = mv({7, -2});
    std::vector<ModelVector> models = {mv({9, 0})};
    const auto diffs = diffs_from(local, models);
    CHECK(gts_aggregate(local, diffs, 5.0) == local);
}

TEST_CASE("gts matches the definition oracle on weighted instances") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 1 + rng.below(6);
        const std::size_t m = 1 + rng.below(8);
        const ModelVector local = random_vec(d, rng);
        std::vector<ReceivedModel> received;
        std::vector<ModelVector> models;
        models.reserve(m);
        for (std::size_t i = 0; i < m; ++i) models.push_back(random_vec(d, rng));
        for (std::size_t i = 0; i < m; ++i)
            received.push_back(
                {static_cast<NodeId>(i), &models[i], 0.1 + rng.next_double()});
        const auto diffs = sort_differences(local, received);
        double total = 0.0;
        for (const auto& df : diffs) total += df.weight;
        const double b = rng.next_double() * total * 0.9;
        const ModelVector out = gts_aggregate(local, diffs, b);
        const ModelVector oracle = gts_definition_oracle(local, diffs, b);
        CHECK(max_abs_diff(out, oracle) < 1e-9);
    }
}

TEST_CASE("cs with b = 0 is the plain weighted sum") {
    const ModelVector local = mv({1});
    std::vector<ModelVector> models = {mv({3}), mv({0})};
    const auto diffs = diffs_from(local, models, 0.5);
    const ModelVector out = cs_aggregate(local, diffs, 0.0);
    CHECK(out[0] == doctest::Approx(1 + 0.5 * 2 + 0.5 * -1));
}

TEST_CASE("cs clips the largest vectors at the 2b-th largest norm") {
    const ModelVector local = mv({0});
    std::vector<ModelVector> models = {mv({4}), mv({3}), mv({2}), mv({1})};
    const auto diffs = diffs_from(local, models);
    const ModelVector out = cs_aggregate(local, diffs, 1.0);
    // pi = 3: the norm-4 vector shrinks to 3, the others pass through.
    CHECK(out[0] == doctest::Approx(3 + 3 + 2 + 1));
}

TEST_CASE("cs is the identity when no norm exceeds the clip level") {
    const ModelVector local = mv({0, 0});
    std::vector<ModelVector> models = {mv({1, 0}), mv({0, 1}), mv({-1, 0}),
                                       mv({0, -1})};
    const auto diffs = diffs_from(local, models);
    // 2b = 1 -> pi = 1 = every norm; nothing shrinks.
    const ModelVector out = cs_aggregate(local, diffs, 0.5);
    const ModelVector plain = plain_average(local, diffs);
    CHECK(max_abs_diff(out, plain) < 1e-12);
}

TEST_CASE("cs returns the local model when 2b reaches the total mass") {
    const ModelVector local = mv({5});
    std::vector<ModelVector> models = {mv({1}), mv({2})};
    const auto diffs = diffs_from(local, models);
    CHECK(cs_aggregate(local, diffs, 1.0) == local);
    CHECK(cs_aggregate(local, diffs, 8.0) == local);
}

TEST_CASE("cs clip level matches the tau-scan oracle") {
    Rng rng(314);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 1 + rng.below(6);
        const std::size_t m = 2 + rng.below(7);
        const ModelVector local = random_vec(d, rng);
        std::vector<ModelVector> models;
        models.reserve(m);
        for (std::size_t i = 0; i < m; ++i) models.push_back(random_vec(d, rng));
        const auto diffs = diffs_from(local, models);
        const double b = rng.next_double() * (m / 2.0) * 0.99;
        const double pi = cs_pi_oracle(diffs, b);

        // Reconstruct the clip level from the aggregate: with unit
        // weights, out - local = sum clip(z, pi).
        ModelVector expected = local;
        for (const auto& df : diffs) {
            const double scale = df.norm > pi ? pi / df.norm : 1.0;
            expected.axpy(scale, df.z);
        }
        const ModelVector out = cs_aggregate(local, diffs, b);
        CHECK(max_abs_diff(out, expected) < 1e-9);
    }
}

TEST_CASE("cs output distance is bounded by the clipped mass") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + rng.below(5);
        const std::size_t m = 2 + rng.below(8);
        const ModelVector local = random_vec(d, rng);
        std::vector<ModelVector> models;
        models.reserve(m);
        for (std::size_t i = 0; i < m; ++i)
            models.push_back(random_vec(d, rng) * 3.0);
        const auto diffs = diffs_from(local, models, 1.0 / (m + 1));
        const double b = 0.5 / (m + 1);
        const double pi = cs_pi_oracle(diffs, b);
        const ModelVector out = cs_aggregate(local, diffs, b);
        double mass = 0.0;
        for (const auto& df : diffs) mass += df.weight;
        CHECK(out.distance_to(local) <= mass * pi + 1e-9);
    }
}

TEST_CASE("gts and cs center on the local model") {
    Rng rng(8);
    const ModelVector local = random_vec(5, rng);
    std::vector<ModelVector> models(6, local);
    const auto diffs = diffs_from(local, models, 1.0 / 7.0);
    for (double b : {0.0, 0.1, 0.5, 0.99}) {
        CHECK(max_abs_diff(gts_aggregate(local, diffs, b), local) < 1e-12);
        CHECK(max_abs_diff(cs_aggregate(local, diffs, b), local) < 1e-12);
    }
}

TEST_CASE("aggregation is invariant to input permutation") {
    Rng rng(21);
    const ModelVector local = random_vec(4, rng);
    std::vector<ModelVector> models;
    for (int i = 0; i < 7; ++i) models.push_back(random_vec(4, rng));

    std::vector<ReceivedModel> received;
    for (std::size_t i = 0; i < models.size(); ++i)
        received.push_back({static_cast<NodeId>(i), &models[i], 1.0});
    auto shuffled = received;
    std::reverse(shuffled.begin(), shuffled.end());

    const auto d1 = sort_differences(local, received);
    const auto d2 = sort_differences(local, shuffled);
    CHECK(max_abs_diff(gts_aggregate(local, d1, 2.5),
                       gts_aggregate(local, d2, 2.5)) < 1e-12);
    CHECK(max_abs_diff(cs_aggregate(local, d1, 1.5),
                       cs_aggregate(local, d2, 1.5)) < 1e-12);
}

TEST_CASE("cwtm trims per coordinate") {
    const ModelVector local = mv({1});
    std::vector<ModelVector> models = {mv({2}), mv({3}), mv({4}), mv({5})};
    std::vector<const ModelVector*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    const ModelVector out = cwtm_aggregate(local, ptrs, 1);
    CHECK(out[0] == doctest::Approx(3.0));  // mean{2,3,4}

    const ModelVector mean = cwtm_aggregate(local, ptrs, 0);
    CHECK(mean[0] == doctest::Approx(3.0));  // mean{1..5}
}

TEST_CASE("cwtm of identical inputs is that input") {
    const ModelVector local = mv({2, -1});
    std::vector<ModelVector> models(4, local);
    std::vector<const ModelVector*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    CHECK(cwtm_aggregate(local, ptrs, 2) == local);
}

TEST_CASE("cwtm rejects trims that consume everything") {
    const ModelVector local = mv({0});
    std::vector<ModelVector> models = {mv({1}), mv({2}), mv({3})};
    std::vector<const ModelVector*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    CHECK_THROWS_AS(cwtm_aggregate(local, ptrs, 2), ThresholdExceedsMassError);
}

TEST_CASE("gossip_step applies the gradient") {
    const ModelVector agg = mv({1, 1});
    const ModelVector grad = mv({2, -2});
    CHECK(gossip_step(agg, grad, 0.5) == mv({0, 2}));
    CHECK(gossip_step(agg, grad, 0.0) == agg);
    CHECK(gossip_step(agg, mv({0, 0}), 0.7) == agg);
}
