#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cellforge/geom.hpp"

namespace cellforge
{
//! Face-adjacency graph over a part's cells. Node order follows the part.
struct AdjacencyGraph
{
    std::vector<std::string> nodes;
    //! Node-index pairs (i < j), sorted.
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::size_t size() const noexcept { return nodes.size(); }
    std::vector<std::vector<bool>> adjacency_matrix() const;
    bool connected() const;
    //! Throws std::invalid_argument for an unknown id.
    std::size_t index_of(const std::string& id) const;
};

//! A cell ordering whose every prefix is connected.
struct BuildSequence
{
    std::string part_id;
    std::vector<std::string> order;

    bool operator==(const BuildSequence&) const = default;
};

struct SplitExample
{
    std::string part_id;
    std::vector<std::string> order;
    std::size_t cut = 0; //!< number of input cells
    std::vector<std::string> input_cells;
    std::vector<std::string> output_cells;
    //! Surfaces referenced by both sides, in part order.
    std::vector<std::string> reused_surfaces;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

AdjacencyGraph build_graph(const Part& part, const KernelConfig& cfg);

//! Graph from explicit node ids and id pairs; used for fixtures.
AdjacencyGraph make_graph(std::vector<std::string> nodes,
                          const std::vector<std::pair<std::string, std::string>>& edges);

//! Every prefix of `order` (given as node ids) is connected in `graph`.
bool is_connected_order(const AdjacencyGraph& graph, const std::vector<std::string>& order);

/*!
 * Connected build orders of the graph.
 *
 * If the graph admits at most `cap` connected orderings, all of them are
 * returned in lexicographic order of node positions. Otherwise `cap` distinct
 * orders are drawn by seeded frontier-uniform growth (uniform start, then a
 * uniform pick among the cells touching the current prefix) and returned
 * sorted. Throws Disconnected.
 */
std::vector<BuildSequence> enumerate_orders(const AdjacencyGraph& graph, std::size_t cap,
                                            std::uint64_t seed,
                                            const std::string& part_id = {});

//! The lexicographically least connected order. Throws Disconnected.
BuildSequence first_order(const AdjacencyGraph& graph, const std::string& part_id = {});

//! Number of connected orderings (subset dynamic program; at most 22 nodes).
std::uint64_t count_orders(const AdjacencyGraph& graph);

//! One example per cut k = 1..n-1. Throws TooSmall for n < 2.
std::vector<SplitExample> split_all(const BuildSequence& seq, const Part& part);
//! Single cut; throws std::out_of_range unless 1 <= k <= n-1.
SplitExample split_at(const BuildSequence& seq, const Part& part, std::size_t k);

//! The cut used when only one example per order is wanted: ceil((n-1)/2).
constexpr std::size_t middle_cut(std::size_t n) noexcept { return n / 2; }

} // namespace cellforge
