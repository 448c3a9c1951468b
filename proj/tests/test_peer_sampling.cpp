#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "gossip/peer_sampling.hpp"

using namespace gossip;

namespace {

NodeState make_node(NodeId id, std::uint32_t universe, std::size_t v,
                    std::uint64_t seed, std::initializer_list<NodeId> known) {
    NodeState node;
    node.id = id;
    node.history = History(universe);
    for (NodeId k : known) node.history.insert(k);
    Rng rng(seed);
    node.seeds.resize(v);
    for (std::size_t k = 0; k < v; ++k)
        node.seeds[k] = {rng.next_u64(), static_cast<std::uint32_t>(k)};
    node.view = select_view(node.history, node.seeds, id);
    return node;
}

std::vector<std::uint64_t> seed_values(const NodeState& node) {
    std::vector<std::uint64_t> vals;
    for (const auto& s : node.seeds) vals.push_back(s.value);
    return vals;
}

}  // namespace

TEST_CASE("empty inbox leaves history and view unchanged") {
    NodeState node = make_node(0, 100, 6, 1, {3, 9, 42, 17});
    const auto history_before = node.history.ordered();
    const View view_before = node.view;
    history_round(node, {});
    CHECK(node.history.ordered() == history_before);
    CHECK(node.view == view_before);
}

TEST_CASE("already-known ids do not grow the history") {
    NodeState node = make_node(0, 100, 6, 2, {3, 9, 42});
    const std::vector<NodeId> incoming{9, 3, 42, 9};
    history_round(node, incoming);
    CHECK(node.history.size() == 3);
}

TEST_CASE("history never shrinks across rounds") {
    NodeState node = make_node(0, 200, 8, 3, {5, 6, 7});
    Rng rng(33);
    for (int round = 0; round < 50; ++round) {
        const auto before = node.history.ordered();
        std::vector<NodeId> incoming;
        for (int i = 0; i < 5; ++i)
            incoming.push_back(static_cast<NodeId>(rng.below(200)));
        history_round(node, incoming);
        const auto& after = node.history.ordered();
        REQUIRE(after.size() >= before.size());
        CHECK(std::equal(before.begin(), before.end(), after.begin()));
    }
}

TEST_CASE("a new id that wins one slot changes only that slot") {
    NodeState node = make_node(0, 5000, 8, 4, {10, 11, 12, 13, 14, 15});
    const View before = node.view;

    // Search for an id that beats exactly one slot's occupant.
    for (NodeId candidate = 100; candidate < 5000; ++candidate) {
        int wins = 0;
        std::size_t winning_slot = 0;
        for (std::size_t k = 0; k < node.seeds.size(); ++k) {
            if (rank(node.seeds[k], candidate) <
                rank(node.seeds[k], before[k])) {
                ++wins;
                winning_slot = k;
            }
        }
        if (wins != 1) continue;
        const std::vector<NodeId> incoming{candidate};
        history_round(node, incoming);
        for (std::size_t k = 0; k < node.seeds.size(); ++k) {
            if (k == winning_slot)
                CHECK(node.view[k] == candidate);
            else
                CHECK(node.view[k] == before[k]);
        }
        return;
    }
    FAIL("no single-slot winner found");
}

TEST_CASE("refresh_seeds honors the policy") {
    SUBCASE("zero seeds per refresh is the identity") {
        NodeState node = make_node(0, 100, 6, 5, {1, 2, 3});
        const auto before = seed_values(node);
        Rng rng(7);
        refresh_seeds(node, 4, {1, 0}, rng);
        CHECK(seed_values(node) == before);
    }
    SUBCASE("interval 1 with count v re-seeds every slot") {
        NodeState node = make_node(0, 100, 6, 6, {1, 2, 3});
        const auto before = seed_values(node);
        Rng rng(8);
        refresh_seeds(node, 1, {1, 6}, rng);
        const auto after = seed_values(node);
        for (std::size_t k = 0; k < 6; ++k) CHECK(after[k] != before[k]);
    }
    SUBCASE("off-interval rounds are the identity") {
        NodeState node = make_node(0, 100, 6, 9, {1, 2, 3});
        const auto before = seed_values(node);
        Rng rng(10);
        refresh_seeds(node, 3, {2, 6}, rng);
        CHECK(seed_values(node) == before);
        refresh_seeds(node, 4, {2, 6}, rng);
        CHECK(seed_values(node) != before);
    }
    SUBCASE("partial refresh touches exactly count slots") {
        NodeState node = make_node(0, 100, 10, 11, {1, 2, 3});
        const auto before = seed_values(node);
        Rng rng(12);
        refresh_seeds(node, 1, {1, 4}, rng);
        const auto after = seed_values(node);
        int changed = 0;
        for (std::size_t k = 0; k < 10; ++k)
            if (after[k] != before[k]) ++changed;
        CHECK(changed == 4);
    }
}

TEST_CASE("baseline: no incoming ids leaves the view unchanged") {
    NodeState node = make_node(0, 300, 10, 13, {4, 8, 15, 16, 23, 42});
    const View before = node.view;
    Rng rng(14);
    baseline_round(node, {}, 3, {80, 5}, rng);  // t=3: no seed rotation
    CHECK(node.view == before);
}

TEST_CASE("baseline: a stronger incoming id captures its slot") {
    NodeState node = make_node(0, 5000, 6, 15, {21, 22, 23, 24});
    const View before = node.view;
    for (NodeId candidate = 100; candidate < 5000; ++candidate) {
        bool beats_zero =
            rank(node.seeds[0], candidate) < rank(node.seeds[0], before[0]);
        if (!beats_zero) continue;
        const std::vector<NodeId> incoming{candidate};
        Rng rng(16);
        baseline_round(node, incoming, 2, {80, 5}, rng);
        CHECK(node.view[0] == candidate);
        return;
    }
    FAIL("no slot-0 winner found");
}

TEST_CASE("baseline pool forgets ids that left the stream") {
    // An id that once occupied no slot is gone for good: feed a weak id
    // and confirm it cannot reappear later without being re-sent.
    NodeState node = make_node(0, 1000, 4, 17, {50, 51});
    Rng rng(18);
    // Find an id that wins no slot against current occupants.
    for (NodeId weak = 100; weak < 1000; ++weak) {
        bool wins = false;
        for (std::size_t k = 0; k < node.seeds.size(); ++k)
            if (rank(node.seeds[k], weak) < rank(node.seeds[k], node.view[k]))
                wins = true;
        if (wins) continue;
        const std::vector<NodeId> incoming{weak};
        baseline_round(node, incoming, 2, {80, 1}, rng);
        for (NodeId id : node.view) CHECK(id != weak);
        return;
    }
    FAIL("no weak id found");
}

TEST_CASE("baseline rotation schedule: 5 slots every 80 rounds") {
    NodeState node = make_node(0, 300, 20, 19, {1, 2, 3, 4, 5, 6});
    const SeedRefreshPolicy policy{80, 5};  // v/rho = 80, rho*v = 5
    Rng rng(20);

    auto changed_since = [&](const std::vector<std::uint64_t>& base) {
        int n = 0;
        const auto now = seed_values(node);
        for (std::size_t k = 0; k < now.size(); ++k)
            if (now[k] != base[k]) ++n;
        return n;
    };

    auto base = seed_values(node);
    for (int t = 1; t < 80; ++t) {
        baseline_round(node, {}, t, policy, rng);
        CHECK(changed_since(base) == 0);
    }
    baseline_round(node, {}, 80, policy, rng);
    CHECK(changed_since(base) == 5);

    // The next event rotates the following 5 slots (round-robin).
    base = seed_values(node);
    baseline_round(node, {}, 160, policy, rng);
    const auto now = seed_values(node);
    for (std::size_t k = 0; k < 20; ++k) {
        if (k >= 5 && k < 10)
            CHECK(now[k] != base[k]);
        else
            CHECK(now[k] == base[k]);
    }
}

TEST_CASE("accumulate_history skips the node's own id") {
    NodeState node = make_node(7, 100, 4, 23, {1, 2});
    const std::vector<NodeId> incoming{7, 7, 3};
    accumulate_history(node, incoming);
    CHECK(!node.history.contains(7));
    CHECK(node.history.contains(3));
}
