#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>

#include "mobind/corpus.hpp"
#include "mobind/mobility.hpp"

namespace mobind {

/// citations / mean citations of the paper's field-year cell. A zero mean
/// with zero citations gives 0. Throws ContractViolation when the baseline
/// is for another cell, DataError when the mean is zero but citations are not.
double normalized_citation_score(const PublicationRecord& paper, const FieldYearBaseline& baseline);
double normalized_citation_score(std::int64_t citations, const FieldYearBaseline& baseline);

/// Arithmetic mean of NCS values. Throws DataError("empty stratum") when empty.
double mncs(std::span<const double> scores);

/// True iff fewer than 10% of the cell's papers have strictly more citations.
bool is_top10(std::int64_t citations, const FieldYearBaseline& baseline);

struct CitationIndicators {
  std::uint64_t paper_count = 0;
  std::uint64_t total_citations = 0;
  double mean_citations = 0.0;
  double mncs = 0.0;
  double pp_top10 = 0.0;
};

struct StratifiedIndicators {
  /// Author-publication pairs of eligible researchers, keyed by the label of
  /// the author's year. Labels without pairs are absent.
  std::map<MobilityLabel, CitationIndicators> strata;
  /// Every corpus paper with a baseline, each counted once.
  CitationIndicators corpus;
  /// Pairs whose author-year has no event (no entity at the level).
  std::uint64_t unclassified_pairs = 0;
  /// Pairs whose paper has no field-year baseline (empty field).
  std::uint64_t unbaselined_pairs = 0;
};

StratifiedIndicators indicators_by_mobility_class(std::span<const PublicationRecord> records,
                                                  const BaselineMap& baselines, const HistoryMap& eligible,
                                                  std::span<const MobilityEvent> events);

/// label,paper_count,total_citations,mean_citations,mncs,pp_top10 with a
/// trailing CORPUS row; 4 decimals.
void write_indicators_csv(std::ostream& out, const StratifiedIndicators& indicators);

}  // namespace mobind
