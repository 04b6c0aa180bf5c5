#include "mobind/graphmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mobind/csv.hpp"
#include "mobind/error.hpp"
#include "mobind/format.hpp"
#include "mobind/parallel.hpp"

namespace mobind {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative tolerance for deciding that two weighted path lengths are equal.
bool same_length(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

// Fixed chunking keeps floating-point reduction order independent of threads.
std::size_t source_grain(std::size_t n) { return std::max<std::size_t>(8, (n + 63) / 64); }

// Single-source shortest paths. Fills `order` with nodes by non-decreasing
// distance, and `dist`/`sigma` (number of shortest paths from s).
void shortest_paths(const Adjacency& g, std::uint32_t s, std::vector<std::uint32_t>& order,
                    std::vector<double>& dist, std::vector<double>& sigma) {
  const auto n = g.size();
  order.clear();
  dist.assign(n, kInf);
  sigma.assign(n, 0.0);
  dist[s] = 0.0;
  sigma[s] = 1.0;

  if (!g.weighted) {
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const auto v = order[head];
      for (auto e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
        const auto w = g.targets[e];
        if (dist[w] == kInf) {
          dist[w] = dist[v] + 1.0;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1.0) sigma[w] += sigma[v];
      }
    }
    return;
  }

  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  std::vector<char> settled(n, 0);
  queue.emplace(0.0, s);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    order.push_back(v);
    for (auto e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
      const auto w = g.targets[e];
      if (settled[w]) continue;
      const double candidate = d + g.lengths[e];
      if (dist[w] == kInf || (candidate < dist[w] && !same_length(candidate, dist[w]))) {
        dist[w] = candidate;
        sigma[w] = sigma[v];
        queue.emplace(candidate, w);
      } else if (same_length(candidate, dist[w])) {
        sigma[w] += sigma[v];
      }
    }
  }
}

bool on_shortest_path(const Adjacency& g, const std::vector<double>& dist, std::uint32_t v, std::size_t e) {
  const auto w = g.targets[e];
  if (!g.weighted) return dist[w] == dist[v] + 1.0;
  return dist[w] != kInf && same_length(dist[w], dist[v] + g.lengths[e]);
}

}  // namespace

Adjacency Adjacency::from_graph(const CoAffiliationGraph& graph, const CentralityOptions& options) {
  Adjacency adj;
  adj.weighted = options.weighted;
  std::map<std::string_view, std::uint32_t> index;
  for (const auto& [key, weight] : graph.nodes) {
    index.emplace(key, static_cast<std::uint32_t>(adj.names.size()));
    adj.names.push_back(key);
  }
  std::vector<std::vector<std::pair<std::uint32_t, double>>> lists(adj.names.size());
  for (const auto& [pair, weight] : graph.edges) {
    if (weight < options.threshold) continue;
    const auto a = index.at(pair.first);
    const auto b = index.at(pair.second);
    const double length = options.weighted ? 1.0 / static_cast<double>(weight) : 1.0;
    lists[a].emplace_back(b, length);
    lists[b].emplace_back(a, length);
  }
  adj.offsets.assign(1, 0);
  for (auto& list : lists) {
    std::sort(list.begin(), list.end());
    for (const auto& [t, len] : list) {
      adj.targets.push_back(t);
      adj.lengths.push_back(len);
    }
    adj.offsets.push_back(adj.targets.size());
  }
  return adj;
}

Adjacency Adjacency::from_edges(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  Adjacency adj;
  adj.names.resize(n);
  for (std::size_t i = 0; i < n; ++i) adj.names[i] = std::to_string(i);
  std::vector<std::set<std::uint32_t>> lists(n);
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    lists.at(a).insert(b);
    lists.at(b).insert(a);
  }
  adj.offsets.assign(1, 0);
  for (const auto& list : lists) {
    for (auto t : list) {
      adj.targets.push_back(t);
      adj.lengths.push_back(1.0);
    }
    adj.offsets.push_back(adj.targets.size());
  }
  return adj;
}

std::vector<double> closeness_centrality(const Adjacency& g) {
  const auto n = g.size();
  std::vector<double> result(n, 0.0);
  if (n < 2) return result;
  const auto grain = source_grain(n);
  parallel_chunks(n, grain, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> order;
    std::vector<double> dist, sigma;
    for (auto s = begin; s < end; ++s) {
      shortest_paths(g, static_cast<std::uint32_t>(s), order, dist, sigma);
      double total = 0.0;
      for (auto v : order) total += dist[v];
      const double reached = static_cast<double>(order.size() - 1);
      if (reached > 0 && total > 0) {
        result[s] = (reached / static_cast<double>(n - 1)) * (reached / total);
      }
    }
  });
  return result;
}

std::vector<double> betweenness_centrality(const Adjacency& g) {
  const auto n = g.size();
  const auto grain = source_grain(n);
  std::vector<std::vector<double>> partial(chunk_count(n, grain));
  parallel_chunks(n, grain, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& acc = partial[chunk];
    acc.assign(n, 0.0);
    std::vector<std::uint32_t> order;
    std::vector<double> dist, sigma, delta(n);
    for (auto s = begin; s < end; ++s) {
      shortest_paths(g, static_cast<std::uint32_t>(s), order, dist, sigma);
      for (auto v : order) delta[v] = 0.0;
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto v = *it;
        for (auto e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
          if (!on_shortest_path(g, dist, v, e)) continue;
          const auto w = g.targets[e];
          delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if (v != s) acc[v] += delta[v];
      }
    }
  });

  std::vector<double> result(n, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t v = 0; v < n; ++v) result[v] += acc[v];
  }
  // Every unordered pair was counted from both endpoints.
  for (auto& value : result) value /= 2.0;
  return result;
}

std::map<std::string, double> closeness_all(const CoAffiliationGraph& graph, const CentralityOptions& options) {
  const auto adj = Adjacency::from_graph(graph, options);
  const auto values = closeness_centrality(adj);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < adj.size(); ++i) out.emplace(adj.names[i], values[i]);
  return out;
}

std::map<std::string, double> betweenness_all(const CoAffiliationGraph& graph, const CentralityOptions& options) {
  const auto adj = Adjacency::from_graph(graph, options);
  const auto values = betweenness_centrality(adj);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < adj.size(); ++i) out.emplace(adj.names[i], values[i]);
  return out;
}

std::vector<CentralityRow> centrality_table(const CoAffiliationGraph& graph, int top_k, CentralitySortKey key,
                                            const CentralityOptions& options) {
  if (top_k <= 0) throw ConfigError("top_k must be positive, got " + std::to_string(top_k));
  const auto adj = Adjacency::from_graph(graph, options);
  const auto closeness = closeness_centrality(adj);
  const auto betweenness = betweenness_centrality(adj);

  std::vector<CentralityRow> rows;
  rows.reserve(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    rows.push_back({adj.names[i], graph.nodes.find(adj.names[i])->second, closeness[i], betweenness[i]});
  }
  auto metric = [key](const CentralityRow& r) {
    switch (key) {
      case CentralitySortKey::kCloseness: return r.closeness;
      case CentralitySortKey::kResearchers: return static_cast<double>(r.researcher_count);
      case CentralitySortKey::kBetweenness: break;
    }
    return r.betweenness;
  };
  std::sort(rows.begin(), rows.end(), [&](const CentralityRow& a, const CentralityRow& b) {
    const double ma = metric(a);
    const double mb = metric(b);
    if (ma != mb) return ma > mb;
    if (a.researcher_count != b.researcher_count) return a.researcher_count > b.researcher_count;
    return a.entity < b.entity;
  });
  if (rows.size() > static_cast<std::size_t>(top_k)) rows.resize(static_cast<std::size_t>(top_k));
  return rows;
}

CoAffiliationGraph region_subgraph(const CoAffiliationGraph& graph,
                                   const std::set<std::string, std::less<>>& entities) {
  if (entities.empty()) throw ContractViolation("region_subgraph: empty entity set");
  CoAffiliationGraph sub;
  sub.level = graph.level;
  sub.researchers.reset();
  for (const auto& [key, weight] : graph.nodes) {
    if (entities.contains(key)) sub.nodes.emplace(key, weight);
  }
  for (const auto& [pair, weight] : graph.edges) {
    if (sub.nodes.contains(pair.first) && sub.nodes.contains(pair.second)) sub.edges.emplace(pair, weight);
  }
  return sub;
}

void write_centrality_csv(std::ostream& out, std::span<const CentralityRow> rows) {
  csv::write_row(out, {"entity", "researchers", "closeness", "betweenness"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.entity, std::to_string(r.researcher_count), format_fixed(r.closeness, 6),
                         format_fixed(r.betweenness, 4)});
  }
}

}  // namespace mobind
