#include "mobind/flows.hpp"

#include <algorithm>
#include <charconv>

#include "mobind/csv.hpp"
#include "mobind/error.hpp"
#include "mobind/format.hpp"

namespace mobind {

namespace {

bool in_scope(std::string_view entity, const std::set<std::string, std::less<>>& scope) {
  return scope.empty() || scope.contains(country_of_key(entity)) || scope.contains(entity);
}

}  // namespace

std::vector<FlowEdge> flow_edges_from_event(const MobilityEvent& event) {
  if (!is_mobile(event.label)) {
    throw ContractViolation("flow_edges_from_event: event " + event.author_id + "/" + std::to_string(event.year) +
                            " is " + std::string(to_string(event.label)));
  }
  if (event.prior_entities.empty() || event.new_entities.empty()) {
    throw ContractViolation("flow_edges_from_event: mobile event without prior or new entities");
  }
  const double weight =
      1.0 / (static_cast<double>(event.prior_entities.size()) * static_cast<double>(event.new_entities.size()));
  std::vector<FlowEdge> edges;
  edges.reserve(event.prior_entities.size() * event.new_entities.size());
  for (const auto& from : event.prior_entities) {
    for (const auto& to : event.new_entities) edges.push_back({from, to, weight});
  }
  return edges;
}

CapacityMap compute_capacities(const HistoryMap& eligible, Level level) {
  CapacityMap capacities;
  for (const auto& [id, history] : eligible) {
    std::set<std::string> entities;
    for (const auto& [year, affs] : history.timeline) {
      for (const auto& aff : affs) {
        if (auto key = entity_key(aff, level); !key.empty()) entities.insert(std::move(key));
      }
    }
    for (const auto& e : entities) capacities[e] += 1;
  }
  return capacities;
}

std::optional<std::size_t> FlowMatrix::index_of(std::string_view entity) const {
  auto it = std::lower_bound(entities.begin(), entities.end(), entity);
  if (it == entities.end() || *it != entity) return std::nullopt;
  return static_cast<std::size_t>(it - entities.begin());
}

double FlowMatrix::at(std::string_view from, std::string_view to) const {
  const auto i = index_of(from);
  const auto j = index_of(to);
  return (i && j) ? at(*i, *j) : 0.0;
}

double FlowMatrix::row_sum(std::size_t i) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < size(); ++j) sum += at(i, j);
  return sum;
}

double FlowMatrix::column_sum(std::size_t j) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < size(); ++i) sum += at(i, j);
  return sum;
}

double FlowMatrix::total() const {
  double sum = 0.0;
  for (double c : cells) sum += c;
  return sum;
}

FlowMatrix build_flow_matrix(std::span<const MobilityEvent> events, const CapacityMap& capacities,
                             const FlowOptions& options) {
  std::map<std::string, std::size_t, std::less<>> moves_per_author;
  if (options.dedup_researchers) {
    for (const auto& e : events) {
      if (is_mobile(e.label)) ++moves_per_author[e.author_id];
    }
  }

  auto keep = [&](const FlowEdge& edge) {
    if (options.scope.empty()) return true;
    const bool from = in_scope(edge.from, options.scope);
    const bool to = in_scope(edge.to, options.scope);
    return options.scope_mode == ScopeMode::kBothEndpoints ? (from && to) : (from || to);
  };

  std::map<std::pair<std::string, std::string>, double> sums;
  std::set<std::string, std::less<>> endpoints;
  std::size_t contributing = 0;
  for (const auto& event : events) {
    if (!is_mobile(event.label)) continue;
    if (event.prior_entities.empty() || event.new_entities.empty()) {
      throw DataError("mobile event " + event.author_id + "/" + std::to_string(event.year) +
                      " has no prior or new entities");
    }
    const double scale =
        options.dedup_researchers ? 1.0 / static_cast<double>(moves_per_author[event.author_id]) : 1.0;
    bool contributed = false;
    for (auto& edge : flow_edges_from_event(event)) {
      if (!keep(edge)) continue;
      sums[{edge.from, edge.to}] += edge.weight * scale;
      endpoints.insert(edge.from);
      endpoints.insert(edge.to);
      contributed = true;
    }
    contributing += contributed;
  }

  std::set<std::string, std::less<>> entities;
  for (const auto& [entity, count] : capacities) {
    if (in_scope(entity, options.scope)) entities.insert(entity);
  }
  entities.insert(endpoints.begin(), endpoints.end());

  FlowMatrix matrix;
  matrix.entities.assign(entities.begin(), entities.end());
  matrix.cells.assign(matrix.size() * matrix.size(), 0.0);
  matrix.contributing_events = contributing;
  for (const auto& entity : matrix.entities) {
    auto it = capacities.find(entity);
    matrix.capacity[entity] = it == capacities.end() ? 0 : it->second;
  }
  for (const auto& [pair, weight] : sums) {
    const auto i = *matrix.index_of(pair.first);
    const auto j = *matrix.index_of(pair.second);
    matrix.cells[i * matrix.size() + j] += weight;
  }
  return matrix;
}

std::string_view to_string(FlowDirection direction) noexcept {
  return direction == FlowDirection::kSending ? "sending" : "receiving";
}

ShareTable normalized_shares(const FlowMatrix& matrix, FlowDirection direction) {
  const double total_flow = matrix.total();
  if (!(total_flow > 0.0)) throw DataError("no mobility events in scope");
  std::uint64_t total_capacity = 0;
  for (const auto& [entity, count] : matrix.capacity) total_capacity += count;
  if (total_capacity == 0) throw DataError("no researcher capacity in scope");

  ShareTable table;
  table.direction = direction;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    ShareRow row;
    row.country = matrix.entities[i];
    row.capacity = matrix.capacity.at(row.country);
    row.capacity_share = static_cast<double>(row.capacity) / static_cast<double>(total_capacity);
    const double flow = direction == FlowDirection::kSending ? matrix.row_sum(i) : matrix.column_sum(i);
    row.observed_share = flow / total_flow;
    if (row.capacity > 0) {
      row.normalized_share = row.observed_share / row.capacity_share;
    } else if (flow > 0.0) {
      table.warnings.push_back(row.country + " has " + std::string(to_string(direction)) +
                               " flow but zero capacity; normalized share undefined");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_flow_matrix_csv(std::ostream& out, const FlowMatrix& matrix) {
  csv::Row header{"sender"};
  header.insert(header.end(), matrix.entities.begin(), matrix.entities.end());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    csv::Row row{matrix.entities[i]};
    for (std::size_t j = 0; j < matrix.size(); ++j) row.push_back(format_fixed(matrix.at(i, j), 6));
    csv::write_row(out, row);
  }
}

void write_share_csv(std::ostream& out, const ShareTable& table) {
  csv::write_row(out, {"country", "capacity", "capacity_share", "observed_share", "normalized_share"});
  for (const auto& r : table.rows) {
    csv::write_row(out, {r.country, std::to_string(r.capacity), format_fixed(r.capacity_share, 6),
                         format_fixed(r.observed_share, 6),
                         r.normalized_share ? format_fixed(*r.normalized_share, 6) : std::string()});
  }
}

void write_share_long_csv(std::ostream& out, const ShareTable& sending, const ShareTable& receiving) {
  csv::write_row(out, {"country", "direction", "normalized_share"});
  for (const auto* table : {&sending, &receiving}) {
    for (const auto& r : table->rows) {
      csv::write_row(out, {r.country, std::string(to_string(table->direction)),
                           r.normalized_share ? format_fixed(*r.normalized_share, 6) : std::string()});
    }
  }
}

void write_capacity_csv(std::ostream& out, const CapacityMap& capacities) {
  csv::write_row(out, {"entity", "researchers"});
  for (const auto& [entity, count] : capacities) csv::write_row(out, {entity, std::to_string(count)});
}

CapacityMap read_capacity_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"entity", "researchers"}, "capacity table");
  CapacityMap capacities;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 2) throw ParseError("capacity table: expected entity,researchers", reader.line());
    std::uint64_t value = 0;
    const auto& text = (*row)[1];
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ParseError("capacity table: bad count \"" + text + "\"", reader.line());
    }
    capacities[(*row)[0]] = value;
  }
  return capacities;
}

}  // namespace mobind
