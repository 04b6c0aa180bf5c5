#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mobind/corpus.hpp"
#include "mobind/mobility.hpp"

namespace mobind {

struct FlowEdge {
  std::string from;
  std::string to;
  double weight = 0.0;

  bool operator==(const FlowEdge&) const = default;
};

/// Splits one move over prior x new entities, each edge weighing
/// 1 / (|prior| * |new|). Throws ContractViolation for a non-mobile event.
std::vector<FlowEdge> flow_edges_from_event(const MobilityEvent& event);

/// Eligible researchers per entity (the expectation baseline for shares).
using CapacityMap = std::map<std::string, std::uint64_t, std::less<>>;

/// Counts each eligible researcher once for every entity they were ever
/// affiliated with at `level`.
CapacityMap compute_capacities(const HistoryMap& eligible, Level level = Level::kCountry);

enum class ScopeMode {
  kBothEndpoints,   // intra-region flows only
  kEitherEndpoint,  // flows touching the region
};

struct FlowOptions {
  std::set<std::string, std::less<>> scope;  // empty = everything
  ScopeMode scope_mode = ScopeMode::kBothEndpoints;
  /// Weight each mobile researcher's events 1/k so a researcher counts once.
  bool dedup_researchers = false;
};

/// Directed sender -> receiver matrix with a zero diagonal.
struct FlowMatrix {
  std::vector<std::string> entities;  // sorted
  std::vector<double> cells;          // row-major, sender x receiver
  CapacityMap capacity;               // restricted to `entities`
  std::size_t contributing_events = 0;

  std::size_t size() const noexcept { return entities.size(); }
  double at(std::size_t from, std::size_t to) const { return cells[from * size() + to]; }
  /// Cell by name; 0 when either entity is absent.
  double at(std::string_view from, std::string_view to) const;
  std::optional<std::size_t> index_of(std::string_view entity) const;
  double row_sum(std::size_t i) const;
  double column_sum(std::size_t j) const;
  double total() const;
};

FlowMatrix build_flow_matrix(std::span<const MobilityEvent> events, const CapacityMap& capacities,
                             const FlowOptions& options = {});

enum class FlowDirection { kSending, kReceiving };

std::string_view to_string(FlowDirection direction) noexcept;

struct ShareRow {
  std::string country;
  std::uint64_t capacity = 0;
  double capacity_share = 0.0;
  double observed_share = 0.0;
  /// observed / capacity share; absent when the capacity is zero.
  std::optional<double> normalized_share;
};

struct ShareTable {
  FlowDirection direction = FlowDirection::kSending;
  std::vector<ShareRow> rows;
  std::vector<std::string> warnings;
};

/// Capacity-normalized sending (row sums) or receiving (column sums) shares.
/// Throws DataError when the matrix carries no flow or no capacity.
ShareTable normalized_shares(const FlowMatrix& matrix, FlowDirection direction);

/// Square matrix with a header row and a leading label column (6 decimals).
void write_flow_matrix_csv(std::ostream& out, const FlowMatrix& matrix);
/// country,capacity,capacity_share,observed_share,normalized_share
void write_share_csv(std::ostream& out, const ShareTable& table);
/// country,direction,normalized_share for both directions.
void write_share_long_csv(std::ostream& out, const ShareTable& sending, const ShareTable& receiving);

/// entity,researchers
void write_capacity_csv(std::ostream& out, const CapacityMap& capacities);
CapacityMap read_capacity_csv(std::istream& in);

}  // namespace mobind
