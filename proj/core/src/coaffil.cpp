#include "mobind/coaffil.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <vector>

namespace mobind {

namespace {

struct Occurrence {
  std::uint64_t count = 0;
  int first_year = 0;
};

std::map<std::string, Occurrence, std::less<>> count_occurrences(const AuthorHistory& history, Level level,
                                                                 OccurrenceCounting counting) {
  std::map<std::string, Occurrence, std::less<>> counts;
  std::set<std::pair<std::string, int>> seen_years;
  for (const auto& pub : history.publications) {
    std::set<std::string> keys;
    for (const auto& aff : pub.affiliations) {
      if (auto key = entity_key(aff, level); !key.empty()) keys.insert(std::move(key));
    }
    for (const auto& key : keys) {
      if (counting == OccurrenceCounting::kYears && !seen_years.emplace(key, pub.year).second) continue;
      auto [it, inserted] = counts.try_emplace(key, Occurrence{0, pub.year});
      it->second.count += 1;
      it->second.first_year = std::min(it->second.first_year, pub.year);
    }
  }
  return counts;
}

std::set<std::string> all_entities(const AuthorHistory& history, Level level) {
  std::set<std::string> out;
  for (const auto& [year, affs] : history.timeline) {
    for (const auto& aff : affs) {
      if (auto key = entity_key(aff, level); !key.empty()) out.insert(std::move(key));
    }
  }
  return out;
}

bool in_scope(std::string_view key, const std::set<std::string, std::less<>>& scope) {
  return scope.empty() || scope.contains(country_of_key(key));
}

}  // namespace

EntityPair make_pair_key(const std::string& a, const std::string& b) {
  return a < b ? EntityPair{a, b} : EntityPair{b, a};
}

void CoAffiliationGraph::add_edge(const std::string& a, const std::string& b, std::uint64_t weight) {
  if (a == b) return;
  edges[make_pair_key(a, b)] += weight;
}

std::optional<TopTwo> top_two_entities(const AuthorHistory& history, Level level, OccurrenceCounting counting) {
  const auto counts = count_occurrences(history, level, counting);
  if (counts.empty()) return std::nullopt;

  std::vector<std::tuple<std::uint64_t, int, std::string_view>> ranked;
  ranked.reserve(counts.size());
  for (const auto& [key, occ] : counts) ranked.emplace_back(occ.count, occ.first_year, key);
  // Highest count, then earliest first use, then smallest key.
  auto better = [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  };
  const auto top = std::min<std::size_t>(2, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top), ranked.end(), better);

  TopTwo result{std::string(std::get<2>(ranked[0])), std::nullopt};
  if (ranked.size() > 1) result.second = std::string(std::get<2>(ranked[1]));
  return result;
}

CoAffiliationGraph build_coaffiliation_graph(const HistoryMap& eligible, Level level,
                                             const std::set<std::string, std::less<>>& scope_countries,
                                             const CoaffilOptions& options) {
  CoAffiliationGraph graph;
  graph.level = level;
  std::uint64_t researchers = 0;

  for (const auto& [id, history] : eligible) {
    const auto top = top_two_entities(history, level, options.counting);
    if (!top) continue;
    if (!in_scope(top->first, scope_countries)) continue;
    if (top->second && !in_scope(*top->second, scope_countries)) continue;

    const auto entities = all_entities(history, level);
    bool contributed = false;
    for (const auto& key : entities) {
      if (!in_scope(key, scope_countries)) continue;
      graph.nodes[key] += 1;
      contributed = true;
    }
    if (!contributed) continue;
    ++researchers;

    if (options.all_pairs) {
      std::vector<const std::string*> inside;
      for (const auto& key : entities) {
        if (in_scope(key, scope_countries)) inside.push_back(&key);
      }
      for (std::size_t i = 0; i < inside.size(); ++i) {
        for (std::size_t j = i + 1; j < inside.size(); ++j) graph.add_edge(*inside[i], *inside[j]);
      }
    } else if (top->second) {
      graph.add_edge(top->first, *top->second);
    }
  }
  graph.researchers = researchers;
  return graph;
}

GraphSummary graph_summary(const CoAffiliationGraph& graph) {
  GraphSummary summary;
  summary.nodes = graph.nodes.size();
  summary.edges = graph.edges.size();
  summary.researchers = graph.researchers;

  std::map<std::string_view, std::size_t> index;
  for (const auto& [key, weight] : graph.nodes) index.emplace(key, index.size());
  std::vector<std::size_t> parent(index.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = index.size();
  for (const auto& [pair, weight] : graph.edges) {
    const auto a = find(index.at(pair.first));
    const auto b = find(index.at(pair.second));
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  summary.components = components;
  if (summary.nodes > 1) {
    summary.density = 2.0 * static_cast<double>(summary.edges) /
                      (static_cast<double>(summary.nodes) * static_cast<double>(summary.nodes - 1));
  }
  return summary;
}

}  // namespace mobind
