#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mobind/corpus.hpp"
#include "mobind/flows.hpp"
#include "mobind/mobility.hpp"

namespace mobind {

struct CountrySpec {
  std::string name;
  double weight = 1.0;           // relative size of the research population
  double send_multiplier = 1.0;  // scales the mobility rate of researchers from here
};

enum class DestinationModel {
  /// Destination drawn by weight among allowed countries other than the origin.
  kWeighted,
  /// Origin and destination read off the same uniform draw half a turn apart
  /// on the cumulative weight circle. Both marginals equal the weights, so
  /// sending and receiving shares track capacity (null model). Requires every
  /// weight share <= 1/2 and no blocks.
  kCapacityShift,
};

struct CitationModel {
  std::vector<std::string> fields = {"PHYSICS", "BIOLOGY", "ECONOMICS"};
  double base_mean = 8.0;
  /// Applied to papers written in any year not labelled NON_MOBILE.
  double mobile_multiplier = 1.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 42;
  std::size_t n_authors = 1000;
  int first_year = 2003;
  int last_year = 2014;
  std::vector<CountrySpec> countries;
  /// Per-author probability of one move during the career.
  double mobility_rate = 0.3;
  /// Per-author probability of holding two countries at once.
  double multi_rate = 0.1;
  /// Probability that a single-country mover later returns to the origin.
  double return_rate = 0.3;
  /// Optional partition of countries; researchers stay within their origin's
  /// block plus the bridge country.
  std::vector<std::vector<std::string>> blocks;
  std::string bridge;
  DestinationModel destinations = DestinationModel::kWeighted;
  /// Probability that each year after the first is an active year.
  double year_activity = 0.7;
  int max_papers_per_year = 3;
  /// Extra authors that fail eligibility (single paper or pre-window start).
  std::size_t ineligible_authors = 0;
  CitationModel citations;

  /// Throws ConfigError on an invalid or infeasible scenario.
  void validate() const;
};

/// Named presets: "world", "null", "two-block", "over-sending".
ScenarioConfig scenario_preset(std::string_view name);

struct GroundTruth {
  /// Planted events for eligible authors, author_id then year order.
  std::vector<MobilityEvent> events;
  /// Planted country-level flow per (sender, receiver).
  std::map<std::pair<std::string, std::string>, double> flows;
  std::size_t eligible_authors = 0;
};

struct SyntheticCorpus {
  std::vector<PublicationRecord> records;  // sorted by pub_id
  GroundTruth truth;
};

/// Deterministic in config.seed. Labels are planted first and timelines are
/// then built to realize them.
SyntheticCorpus generate_corpus(const ScenarioConfig& config);

struct VerificationReport {
  std::size_t events_compared = 0;
  std::size_t flow_cells_compared = 0;
  std::vector<std::string> mismatches;

  bool ok() const noexcept { return mismatches.empty(); }
};

/// Exact comparison of labels and return flags per author-year (so per-label
/// counts agree when nothing is reported) and, when a matrix is given, of
/// every flow cell (within 1e-9). One corrupted label yields one mismatch.
VerificationReport verify_against_truth(std::span<const MobilityEvent> events, const GroundTruth& truth,
                                        const FlowMatrix* flows = nullptr);

/// Writes the corpus in the line-delimited input format.
void write_corpus(std::ostream& out, std::span<const PublicationRecord> records);
/// from,to,weight
void write_truth_flows_csv(std::ostream& out, const GroundTruth& truth);

}  // namespace mobind
