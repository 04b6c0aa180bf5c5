#pragma once

#include <cstdint>
#include <istream>
#include <ostream>

#include "mobind/coaffil.hpp"

namespace mobind {

// Edge list "source,target,weight" and node list "id,weight". Edges below
// `min_weight` are left out; nodes are always written.
void write_edge_list(std::ostream& out, const CoAffiliationGraph& graph, std::uint64_t min_weight = 1);
void write_node_list(std::ostream& out, const CoAffiliationGraph& graph);

/// Rebuilds a graph from a node list and an edge list. Throws ParseError on
/// malformed rows or an edge whose endpoint is not in the node list.
CoAffiliationGraph read_node_edge_lists(std::istream& nodes, std::istream& edges, Level level);

/// GraphML with a long "weight" attribute on nodes and edges and the entity
/// key as node label.
void write_graphml(std::ostream& out, const CoAffiliationGraph& graph, std::uint64_t min_weight = 1);
CoAffiliationGraph read_graphml(std::istream& in);

/// Pajek .net (1-based vertex numbers, edge weights as the third column).
void write_pajek(std::ostream& out, const CoAffiliationGraph& graph, std::uint64_t min_weight = 1);

}  // namespace mobind
