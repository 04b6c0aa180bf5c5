#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "mobind/corpus.hpp"

namespace mobind {

/// How "most common" is counted when picking a researcher's top two entities.
enum class OccurrenceCounting {
  kPublications,  // publications listing the entity
  kYears,         // distinct years listing the entity
};

struct TopTwo {
  std::string first;
  std::optional<std::string> second;

  bool operator==(const TopTwo&) const = default;
};

/// The researcher's two most frequent entities at `level`. Ties go to the
/// entity used first (earliest year), then to the smaller key. nullopt when
/// the researcher has no entity at this level.
std::optional<TopTwo> top_two_entities(const AuthorHistory& history, Level level,
                                       OccurrenceCounting counting = OccurrenceCounting::kPublications);

using EntityPair = std::pair<std::string, std::string>;  // first < second

/// Raw (non-normalized) co-occurrence network. Node weight counts researchers
/// affiliated with the entity at least once; edge weight counts researchers
/// linking the two entities.
struct CoAffiliationGraph {
  Level level = Level::kCountry;
  std::map<std::string, std::uint64_t, std::less<>> nodes;
  std::map<EntityPair, std::uint64_t> edges;
  /// Researchers that contributed to the graph. Unknown for graphs derived
  /// from another graph (induced subgraphs, re-imported edge lists).
  std::optional<std::uint64_t> researchers = 0;

  /// Adds `weight` to the undirected edge {a, b}. Self-loops are ignored.
  void add_edge(const std::string& a, const std::string& b, std::uint64_t weight = 1);

  /// Structural equality: level, nodes, edges and weights.
  bool same_structure(const CoAffiliationGraph& other) const {
    return level == other.level && nodes == other.nodes && edges == other.edges;
  }
};

EntityPair make_pair_key(const std::string& a, const std::string& b);

struct CoaffilOptions {
  OccurrenceCounting counting = OccurrenceCounting::kPublications;
  /// Link every pair of a researcher's entities rather than only the top two.
  bool all_pairs = false;
};

/// Builds the network from eligible researchers. A non-empty `scope_countries`
/// keeps only researchers whose top entities all lie in those countries and
/// only nodes inside them.
CoAffiliationGraph build_coaffiliation_graph(const HistoryMap& eligible, Level level,
                                             const std::set<std::string, std::less<>>& scope_countries = {},
                                             const CoaffilOptions& options = {});

struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::optional<std::uint64_t> researchers;
  std::size_t components = 0;
  double density = 0.0;
};

GraphSummary graph_summary(const CoAffiliationGraph& graph);

}  // namespace mobind
