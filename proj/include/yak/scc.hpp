#ifndef YAK_SCC_HPP
#define YAK_SCC_HPP

#include <algorithm>
#include <utility>
#include <vector>

namespace yak {

using Adjacency = std::vector<std::vector<int>>;

struct SccResult {
    /// Components in reverse topological order (Tarjan's emission order).
    std::vector<std::vector<int>> components;
    std::vector<int> component_of;
};

/// Iterative Tarjan; node ids are 0..adj.size()-1.
inline SccResult strongly_connected_components(const Adjacency& adj) {
    const int n = static_cast<int>(adj.size());
    SccResult r;
    r.component_of.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> index(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n), 0);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    std::vector<std::pair<int, std::size_t>> call;
    int counter = 0;

    for (int s = 0; s < n; ++s) {
        if (index[s] != -1) continue;
        call.emplace_back(s, 0);
        while (!call.empty()) {
            auto& [v, next] = call.back();
            if (next == 0 && index[v] == -1) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            if (next < adj[v].size()) {
                int w = adj[v][next++];
                if (index[w] == -1) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    r.component_of[w] = static_cast<int>(r.components.size());
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                r.components.push_back(std::move(comp));
            }
            int done = v;
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }
    return r;
}

/// True if the component has more than one node or a self-loop.
inline bool is_nontrivial(const std::vector<int>& comp, const Adjacency& adj) {
    if (comp.size() > 1) return true;
    const auto& out = adj[comp.front()];
    return std::find(out.begin(), out.end(), comp.front()) != out.end();
}

/// Kahn's algorithm; returns the order, shorter than adj.size() iff cyclic.
/// Ties are broken by smallest node id.
inline std::vector<int> topological_order(const Adjacency& adj) {
    const std::size_t n = adj.size();
    std::vector<int> indeg(n, 0);
    for (const auto& out : adj)
        for (int w : out) ++indeg[static_cast<std::size_t>(w)];
    std::vector<int> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
    std::vector<int> order;
    while (!ready.empty()) {
        auto it = std::min_element(ready.begin(), ready.end());
        int v = *it;
        ready.erase(it);
        order.push_back(v);
        for (int w : adj[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push_back(w);
    }
    return order;
}

}  // namespace yak

#endif  // YAK_SCC_HPP
