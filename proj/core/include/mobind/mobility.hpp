#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mobind/corpus.hpp"

namespace mobind {

enum class MobilityLabel { kNonMobile = 0, kMobile = 1, kMultiAffiliation = 2, kMobileAndMulti = 3 };

inline constexpr std::array<MobilityLabel, 4> kAllLabels = {
    MobilityLabel::kNonMobile, MobilityLabel::kMobile, MobilityLabel::kMultiAffiliation,
    MobilityLabel::kMobileAndMulti};

/// NON_MOBILE, MOBILE, MULTI_AFFILIATION, MOBILE_AND_MULTI.
std::string_view to_string(MobilityLabel label) noexcept;
/// Throws ParseError on an unknown name.
MobilityLabel parse_label(std::string_view text);

/// True for the two labels that mark a move (a new entity versus the prior year).
constexpr bool is_mobile(MobilityLabel label) noexcept {
  return label == MobilityLabel::kMobile || label == MobilityLabel::kMobileAndMulti;
}

using EntitySet = std::set<std::string, std::less<>>;

/// Sorted, ';'-joined keys. Empty set -> empty string.
std::string join_entities(const EntitySet& entities);
EntitySet split_entities(std::string_view text);

/// Label of one active year. `prior` is the entity set of the most recent
/// earlier active year, or nullptr for the first active year.
///
///   new = current \ prior
///   new non-empty (and a prior exists):  MOBILE or, if |current| > 1, MOBILE_AND_MULTI
///   otherwise:                           NON_MOBILE or, if |current| > 1, MULTI_AFFILIATION
///
/// Throws ContractViolation on an empty `current`.
MobilityLabel label_year(const EntitySet& current, const EntitySet* prior);

struct MobilityEvent {
  std::string author_id;
  int year = 0;
  MobilityLabel label = MobilityLabel::kNonMobile;
  EntitySet prior_entities;  // empty on the first active year
  EntitySet current_entities;
  EntitySet new_entities;  // current minus prior; empty on the first active year
  bool is_return = false;

  bool operator==(const MobilityEvent&) const = default;
};

struct ClassifyOptions {
  /// Judge multiple affiliation per paper (some single paper lists more than
  /// one entity) instead of over the union of the year's papers.
  bool per_paper_multi = false;
};

/// Entity set of each active year at `level`. Years whose affiliations have
/// no key at this level (e.g. no city given) are not active.
std::map<int, EntitySet> entity_timeline(const AuthorHistory& history, Level level);

/// One event per active year in ascending order, with return flags set
/// against the first active year's entities.
std::vector<MobilityEvent> classify_author(const AuthorHistory& history, Level level,
                                           const ClassifyOptions& options = {});

/// Sets is_return on each event that (a) follows some event with no origin
/// entity, (b) contains an origin entity, and (c) directly follows an active
/// year without any origin entity.
void detect_return(std::span<MobilityEvent> events, const EntitySet& origin);

/// classify_author over every history, concatenated in author_id order.
std::vector<MobilityEvent> classify_all(const HistoryMap& histories, Level level,
                                        const ClassifyOptions& options = {});

struct AuthorMobilityProfile {
  std::string author_id;
  EntitySet origin_entities;
  bool ever_mobile = false;
  bool ever_multi = false;
  bool returned = false;
  std::vector<MobilityEvent> events;
};

using LabelTally = std::array<std::size_t, 4>;

struct MobilitySummary {
  std::map<std::string, AuthorMobilityProfile, std::less<>> profiles;
  std::map<int, LabelTally> counts_by_year;
  LabelTally totals{};
  std::size_t mobile_authors = 0;
  std::size_t multi_authors = 0;
  std::size_t returning_authors = 0;

  double mobile_author_share() const noexcept {
    return profiles.empty() ? 0.0
                            : static_cast<double>(mobile_authors) / static_cast<double>(profiles.size());
  }
};

/// Events may arrive in any order; each author's events are re-sorted by year.
MobilitySummary summarize_profiles(std::span<const MobilityEvent> events);

// Event table: author_id,year,label,prior_entities,current_entities,new_entities,is_return
void write_events_csv(std::ostream& out, std::span<const MobilityEvent> events);
std::vector<MobilityEvent> read_events_csv(std::istream& in);

void write_profiles_csv(std::ostream& out, const MobilitySummary& summary);
/// year,label,count rows plus one TOTAL row per label.
void write_label_counts_csv(std::ostream& out, const MobilitySummary& summary);

}  // namespace mobind
