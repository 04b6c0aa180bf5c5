#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mobind/coaffil.hpp"

namespace mobind {

struct CentralityOptions {
  /// Edges with weight below the threshold are treated as absent.
  std::uint64_t threshold = 1;
  /// Use 1/weight as edge length instead of counting hops.
  bool weighted = false;
};

/// Compressed adjacency over node indices. Index i corresponds to names[i]
/// (sorted key order when built from a CoAffiliationGraph).
struct Adjacency {
  std::vector<std::string> names;
  std::vector<std::size_t> offsets;  // size() + 1 entries
  std::vector<std::uint32_t> targets;
  std::vector<double> lengths;  // parallel to targets
  bool weighted = false;

  std::size_t size() const noexcept { return names.size(); }

  static Adjacency from_graph(const CoAffiliationGraph& graph, const CentralityOptions& options = {});
  /// Unit-length undirected graph; names are the decimal indices.
  static Adjacency from_edges(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);
};

/// Component-scaled closeness: for v in a component of r nodes out of n,
///   ((r - 1) / (n - 1)) * ((r - 1) / sum of distances from v),
/// and 0 for isolated nodes.
std::vector<double> closeness_centrality(const Adjacency& graph);

/// Unnormalized shortest-path betweenness over unordered pairs, by
/// single-source dependency accumulation (O(n m) unweighted).
std::vector<double> betweenness_centrality(const Adjacency& graph);

std::map<std::string, double> closeness_all(const CoAffiliationGraph& graph, const CentralityOptions& options = {});
std::map<std::string, double> betweenness_all(const CoAffiliationGraph& graph, const CentralityOptions& options = {});

struct CentralityRow {
  std::string entity;
  std::uint64_t researcher_count = 0;
  double closeness = 0.0;
  double betweenness = 0.0;
};

enum class CentralitySortKey { kBetweenness, kCloseness, kResearchers };

/// Rows sorted descending by `key`, ties by researcher count (descending) and
/// then entity (ascending), truncated to `top_k`. Throws ConfigError when
/// top_k <= 0.
std::vector<CentralityRow> centrality_table(const CoAffiliationGraph& graph, int top_k,
                                            CentralitySortKey key = CentralitySortKey::kBetweenness,
                                            const CentralityOptions& options = {});

/// Subgraph induced by `entities`. Throws ContractViolation on an empty set.
CoAffiliationGraph region_subgraph(const CoAffiliationGraph& graph,
                                   const std::set<std::string, std::less<>>& entities);

/// entity,researchers,closeness,betweenness with 6 and 4 decimals.
void write_centrality_csv(std::ostream& out, std::span<const CentralityRow> rows);

}  // namespace mobind
