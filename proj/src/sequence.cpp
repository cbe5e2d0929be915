#include "cellforge/sequence.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cellforge/error.hpp"
#include "cellforge/random.hpp"

namespace cellforge
{
namespace
{
using Order = std::vector<std::size_t>;
using Matrix = std::vector<std::vector<bool>>;

//! Depth-first lexicographic enumeration; stops once `limit` orders exist.
void enumerate_dfs(const Matrix& adj, Order& prefix, std::vector<bool>& used,
                   std::vector<Order>& out, std::size_t limit)
{
    const std::size_t n = adj.size();
    if (prefix.size() == n)
    {
        out.push_back(prefix);
        return;
    }
    for (std::size_t v = 0; v < n && out.size() < limit; ++v)
    {
        if (used[v])
            continue;
        bool touches = prefix.empty();
        for (std::size_t u : prefix)
            touches = touches || adj[u][v];
        if (!touches)
            continue;
        used[v] = true;
        prefix.push_back(v);
        enumerate_dfs(adj, prefix, used, out, limit);
        prefix.pop_back();
        used[v] = false;
    }
}

Order sample_order(const Matrix& adj, SplitMix64& rng)
{
    const std::size_t n = adj.size();
    Order order{static_cast<std::size_t>(rng.below(n))};
    std::vector<bool> used(n, false);
    used[order[0]] = true;
    while (order.size() < n)
    {
        std::vector<std::size_t> frontier;
        for (std::size_t v = 0; v < n; ++v)
        {
            if (used[v])
                continue;
            for (std::size_t u : order)
            {
                if (adj[u][v])
                {
                    frontier.push_back(v);
                    break;
                }
            }
        }
        const std::size_t v = frontier[rng.below(frontier.size())];
        used[v] = true;
        order.push_back(v);
    }
    return order;
}

BuildSequence to_sequence(const AdjacencyGraph& g, const Order& order, const std::string& part_id)
{
    BuildSequence seq{part_id, {}};
    for (std::size_t i : order)
        seq.order.push_back(g.nodes[i]);
    return seq;
}

void require_connected(const AdjacencyGraph& g)
{
    if (g.nodes.empty())
        throw Disconnected("graph has no nodes");
    if (!g.connected())
        throw Disconnected("adjacency graph is not connected");
}

std::vector<std::string> surfaces_of(const Part& part, const std::vector<std::string>& cells)
{
    std::set<std::string> ids;
    for (const auto& cid : cells)
    {
        const Cell* c = part.find_cell(cid);
        if (!c)
            throw InconsistentExample("unknown cell '" + cid + "' in sequence");
        for (const auto& t : c->region)
            ids.insert(t.surface);
    }
    return {ids.begin(), ids.end()};
}

} // namespace

Matrix AdjacencyGraph::adjacency_matrix() const
{
    Matrix adj(nodes.size(), std::vector<bool>(nodes.size(), false));
    for (const auto& [a, b] : edges)
        adj[a][b] = adj[b][a] = true;
    return adj;
}

bool AdjacencyGraph::connected() const
{
    if (nodes.empty())
        return false;
    const auto adj = adjacency_matrix();
    std::vector<bool> seen(nodes.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty())
    {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < nodes.size(); ++v)
            if (adj[u][v] && !seen[v])
            {
                seen[v] = true;
                stack.push_back(v);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::size_t AdjacencyGraph::index_of(const std::string& id) const
{
    auto it = std::find(nodes.begin(), nodes.end(), id);
    if (it == nodes.end())
        throw std::invalid_argument("unknown node '" + id + "'");
    return static_cast<std::size_t>(it - nodes.begin());
}

AdjacencyGraph build_graph(const Part& part, const KernelConfig& cfg)
{
    const auto cells = resolve_cells(part);
    AdjacencyGraph g;
    for (const auto& c : cells)
        g.nodes.push_back(c.id);
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            if (cells_adjacent(cells[i], cells[j], cfg))
                g.edges.emplace_back(i, j);
    return g;
}

AdjacencyGraph make_graph(std::vector<std::string> nodes,
                          const std::vector<std::pair<std::string, std::string>>& edges)
{
    AdjacencyGraph g;
    g.nodes = std::move(nodes);
    for (const auto& [a, b] : edges)
    {
        auto i = g.index_of(a), j = g.index_of(b);
        if (i == j)
            throw std::invalid_argument("self loop on '" + a + "'");
        g.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

bool is_connected_order(const AdjacencyGraph& graph, const std::vector<std::string>& order)
{
    if (order.size() != graph.size())
        return false;
    const auto adj = graph.adjacency_matrix();
    std::vector<bool> used(graph.size(), false);
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        const std::size_t v = graph.index_of(order[k]);
        if (used[v])
            return false;
        bool touches = k == 0;
        for (std::size_t j = 0; j < k && !touches; ++j)
            touches = adj[graph.index_of(order[j])][v];
        if (!touches)
            return false;
        used[v] = true;
    }
    return true;
}

std::vector<BuildSequence> enumerate_orders(const AdjacencyGraph& graph, std::size_t cap,
                                            std::uint64_t seed, const std::string& part_id)
{
    if (cap < 1)
        throw std::invalid_argument("cap must be >= 1");
    require_connected(graph);

    const auto adj = graph.adjacency_matrix();
    std::vector<Order> orders;
    {
        Order prefix;
        std::vector<bool> used(graph.size(), false);
        const std::size_t limit = cap == kUnlimited ? kUnlimited : cap + 1;
        enumerate_dfs(adj, prefix, used, orders, limit);
    }

    if (orders.size() > cap)
    {
        // More than cap exist: sample instead.
        std::set<Order> picked;
        SplitMix64 rng(seed);
        const std::size_t max_draws = 1000 * cap + 1000;
        for (std::size_t draw = 0; draw < max_draws && picked.size() < cap; ++draw)
            picked.insert(sample_order(adj, rng));
        orders.assign(picked.begin(), picked.end());
    }

    std::vector<BuildSequence> out;
    out.reserve(orders.size());
    for (const auto& o : orders)
        out.push_back(to_sequence(graph, o, part_id));
    return out;
}

BuildSequence first_order(const AdjacencyGraph& graph, const std::string& part_id)
{
    require_connected(graph);
    const auto adj = graph.adjacency_matrix();
    std::vector<Order> orders;
    Order prefix;
    std::vector<bool> used(graph.size(), false);
    enumerate_dfs(adj, prefix, used, orders, 1);
    return to_sequence(graph, orders.front(), part_id);
}

std::uint64_t count_orders(const AdjacencyGraph& graph)
{
    const std::size_t n = graph.size();
    if (n == 0)
        return 0;
    if (n > 22)
        throw std::length_error("count_orders supports at most 22 nodes");
    const auto adj = graph.adjacency_matrix();
    std::vector<std::uint32_t> nbr(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adj[i][j])
                nbr[i] |= 1u << j;

    // ways[S]: orders of S whose every prefix is connected.
    std::vector<std::uint64_t> ways(std::size_t{1} << n, 0);
    for (std::size_t v = 0; v < n; ++v)
        ways[std::size_t{1} << v] = 1;
    for (std::uint32_t s = 1; s < (1u << n); ++s)
    {
        if (!ways[s])
            continue;
        for (std::size_t v = 0; v < n; ++v)
            if (!(s >> v & 1u) && (nbr[v] & s))
                ways[s | (1u << v)] += ways[s];
    }
    return ways[(std::size_t{1} << n) - 1];
}

SplitExample split_at(const BuildSequence& seq, const Part& part, std::size_t k)
{
    const std::size_t n = seq.order.size();
    if (k < 1 || k >= n)
        throw std::out_of_range("cut must satisfy 1 <= k <= n-1");
    SplitExample ex;
    ex.part_id = seq.part_id.empty() ? part.id : seq.part_id;
    ex.order = seq.order;
    ex.cut = k;
    ex.input_cells.assign(seq.order.begin(), seq.order.begin() + static_cast<std::ptrdiff_t>(k));
    ex.output_cells.assign(seq.order.begin() + static_cast<std::ptrdiff_t>(k), seq.order.end());

    const auto in = surfaces_of(part, ex.input_cells);
    const auto out = surfaces_of(part, ex.output_cells);
    std::vector<std::string> common;
    std::set_intersection(in.begin(), in.end(), out.begin(), out.end(), std::back_inserter(common));
    for (const auto& s : part.surfaces)
        if (std::binary_search(common.begin(), common.end(), s.id))
            ex.reused_surfaces.push_back(s.id);
    return ex;
}

std::vector<SplitExample> split_all(const BuildSequence& seq, const Part& part)
{
    const std::size_t n = seq.order.size();
    if (n < 2)
        throw TooSmall("a sequence needs at least two cells to split");
    std::vector<SplitExample> out;
    for (std::size_t k = 1; k < n; ++k)
        out.push_back(split_at(seq, part, k));
    return out;
}

} // namespace cellforge
