#include "gossip/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace gossip {

double byz_fraction_out(const RoundGraph& graph,
                        std::span<const Role> roles) {
    double sum = 0.0;
    std::size_t honest = 0;
    for (std::size_t i = 0; i < graph.out_views.size(); ++i) {
        if (roles[i] != Role::Honest) continue;
        ++honest;
        const View& view = graph.out_views[i];
        if (view.empty()) continue;
        std::size_t byz = 0;
        for (NodeId id : view)
            if (roles[id] == Role::Byzantine) ++byz;
        sum += static_cast<double>(byz) / view.size();
    }
    return honest ? sum / honest : 0.0;
}

double byz_fraction_in(const RoundGraph& graph, std::span<const Role> roles) {
    const std::size_t n = graph.out_views.size();
    std::vector<std::size_t> in_total(n, 0), in_byz(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (NodeId target : graph.out_views[j]) {
            ++in_total[target];
            if (roles[j] == Role::Byzantine) ++in_byz[target];
        }
    }
    double sum = 0.0;
    std::size_t honest = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (roles[i] != Role::Honest) continue;
        ++honest;
        if (in_total[i] > 0)
            sum += static_cast<double>(in_byz[i]) / in_total[i];
    }
    return honest ? sum / honest : 0.0;
}

std::size_t largest_scc(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), lowlink(n, 0), on_stack(n, 0);
    std::vector<int> stack;
    std::size_t best = 0;
    int counter = 0;

    // Iterative Tarjan; frame second = position in adjacency list.
    std::vector<std::pair<int, std::size_t>> frames;
    for (int start = 0; start < n; ++start) {
        if (index[start] != -1) continue;
        frames.push_back({start, 0});
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos == 0) {
                index[v] = lowlink[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (pos < adj[v].size()) {
                const int w = adj[v][pos++];
                if (index[w] == -1) {
                    frames.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                std::size_t size = 0;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    ++size;
                } while (w != v);
                best = std::max(best, size);
            }
            const int child = v;
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().first;
                lowlink[parent] = std::min(lowlink[parent], lowlink[child]);
            }
        }
    }
    return best;
}

double hssr(const RoundGraph& graph, std::span<const Role> roles) {
    const std::size_t n = graph.out_views.size();
    std::vector<int> compact(n, -1);
    int honest = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (roles[i] == Role::Honest) compact[i] = honest++;
    if (honest == 0) return 0.0;

    std::vector<std::vector<int>> adj(honest);
    for (std::size_t i = 0; i < n; ++i) {
        if (compact[i] == -1) continue;
        auto& edges = adj[compact[i]];
        for (NodeId target : graph.out_views[i]) {
            if (compact[target] == -1) continue;
            const int t = compact[target];
            if (std::find(edges.begin(), edges.end(), t) == edges.end())
                edges.push_back(t);
        }
    }
    return static_cast<double>(largest_scc(adj)) / honest;
}

std::pair<double, double> mean_std(std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

}  // namespace gossip
