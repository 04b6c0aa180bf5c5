#include "mobind/mobility.hpp"

#include <algorithm>
#include <charconv>

#include "mobind/csv.hpp"
#include "mobind/error.hpp"
#include "mobind/parallel.hpp"

namespace mobind {

namespace {

MobilityLabel combine(bool moved, bool multi) noexcept {
  if (moved) return multi ? MobilityLabel::kMobileAndMulti : MobilityLabel::kMobile;
  return multi ? MobilityLabel::kMultiAffiliation : MobilityLabel::kNonMobile;
}

EntitySet difference(const EntitySet& a, const EntitySet& b) {
  EntitySet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

bool intersects(const EntitySet& a, const EntitySet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

const csv::Row kEventHeader = {"author_id",        "year",         "label",    "prior_entities",
                               "current_entities", "new_entities", "is_return"};

}  // namespace

std::string_view to_string(MobilityLabel label) noexcept {
  switch (label) {
    case MobilityLabel::kNonMobile: return "NON_MOBILE";
    case MobilityLabel::kMobile: return "MOBILE";
    case MobilityLabel::kMultiAffiliation: return "MULTI_AFFILIATION";
    case MobilityLabel::kMobileAndMulti: return "MOBILE_AND_MULTI";
  }
  return "NON_MOBILE";
}

MobilityLabel parse_label(std::string_view text) {
  for (MobilityLabel label : kAllLabels) {
    if (to_string(label) == text) return label;
  }
  throw ParseError("unknown mobility label \"" + std::string(text) + "\"", 0);
}

std::string join_entities(const EntitySet& entities) {
  std::string out;
  for (const auto& e : entities) {
    if (!out.empty()) out.push_back(';');
    out += e;
  }
  return out;
}

EntitySet split_entities(std::string_view text) {
  EntitySet out;
  while (!text.empty()) {
    const auto pos = text.find(';');
    auto part = text.substr(0, pos);
    if (!part.empty()) out.emplace(part);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

MobilityLabel label_year(const EntitySet& current, const EntitySet* prior) {
  if (current.empty()) throw ContractViolation("label_year: empty current entity set");
  const bool multi = current.size() > 1;
  if (prior == nullptr) return combine(false, multi);
  const bool moved = std::any_of(current.begin(), current.end(),
                                 [&](const std::string& e) { return !prior->contains(e); });
  return combine(moved, multi);
}

std::map<int, EntitySet> entity_timeline(const AuthorHistory& history, Level level) {
  std::map<int, EntitySet> timeline;
  for (const auto& [year, affiliations] : history.timeline) {
    EntitySet entities;
    for (const auto& aff : affiliations) {
      if (auto key = entity_key(aff, level); !key.empty()) entities.insert(std::move(key));
    }
    if (!entities.empty()) timeline.emplace(year, std::move(entities));
  }
  return timeline;
}

std::vector<MobilityEvent> classify_author(const AuthorHistory& history, Level level,
                                           const ClassifyOptions& options) {
  const auto timeline = entity_timeline(history, level);

  // Years in which at least one single paper lists several entities.
  std::set<int> paper_multi_years;
  if (options.per_paper_multi) {
    for (const auto& pub : history.publications) {
      EntitySet keys;
      for (const auto& aff : pub.affiliations) {
        if (auto key = entity_key(aff, level); !key.empty()) keys.insert(std::move(key));
      }
      if (keys.size() > 1) paper_multi_years.insert(pub.year);
    }
  }

  std::vector<MobilityEvent> events;
  events.reserve(timeline.size());
  const EntitySet* prior = nullptr;
  for (const auto& [year, current] : timeline) {
    MobilityEvent event;
    event.author_id = history.author_id;
    event.year = year;
    event.current_entities = current;
    if (prior != nullptr) {
      event.prior_entities = *prior;
      event.new_entities = difference(current, *prior);
    }
    if (options.per_paper_multi) {
      event.label = combine(!event.new_entities.empty(), paper_multi_years.contains(year));
    } else {
      event.label = label_year(current, prior);
    }
    events.push_back(std::move(event));
    prior = &current;
  }

  if (!events.empty()) {
    const EntitySet origin = events.front().current_entities;
    detect_return(events, origin);
  }
  return events;
}

void detect_return(std::span<MobilityEvent> events, const EntitySet& origin) {
  bool left_before = false;
  bool previous_away = false;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto& event = events[i];
    const bool at_origin = intersects(event.current_entities, origin);
    event.is_return = i > 0 && left_before && previous_away && at_origin;
    if (!at_origin) left_before = true;
    previous_away = !at_origin;
  }
}

std::vector<MobilityEvent> classify_all(const HistoryMap& histories, Level level,
                                        const ClassifyOptions& options) {
  std::vector<const AuthorHistory*> order;
  order.reserve(histories.size());
  for (const auto& [id, history] : histories) order.push_back(&history);

  constexpr std::size_t kGrain = 256;
  std::vector<std::vector<MobilityEvent>> chunks(chunk_count(order.size(), kGrain));
  parallel_chunks(order.size(), kGrain, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& out = chunks[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      auto events = classify_author(*order[i], level, options);
      std::move(events.begin(), events.end(), std::back_inserter(out));
    }
  });

  std::vector<MobilityEvent> all;
  for (auto& chunk : chunks) std::move(chunk.begin(), chunk.end(), std::back_inserter(all));
  return all;
}

MobilitySummary summarize_profiles(std::span<const MobilityEvent> events) {
  MobilitySummary summary;
  for (const auto& event : events) {
    auto& profile = summary.profiles[event.author_id];
    profile.author_id = event.author_id;
    profile.events.push_back(event);
  }
  for (auto& [id, profile] : summary.profiles) {
    std::sort(profile.events.begin(), profile.events.end(),
              [](const MobilityEvent& a, const MobilityEvent& b) { return a.year < b.year; });
    profile.origin_entities = profile.events.front().current_entities;
    for (const auto& event : profile.events) {
      const auto index = static_cast<std::size_t>(event.label);
      ++summary.counts_by_year[event.year][index];
      ++summary.totals[index];
      profile.ever_mobile = profile.ever_mobile || is_mobile(event.label);
      profile.ever_multi = profile.ever_multi || event.label == MobilityLabel::kMultiAffiliation ||
                           event.label == MobilityLabel::kMobileAndMulti;
      profile.returned = profile.returned || event.is_return;
    }
    summary.mobile_authors += profile.ever_mobile;
    summary.multi_authors += profile.ever_multi;
    summary.returning_authors += profile.returned;
  }
  return summary;
}

void write_events_csv(std::ostream& out, std::span<const MobilityEvent> events) {
  csv::write_row(out, kEventHeader);
  for (const auto& e : events) {
    csv::write_row(out, {e.author_id, std::to_string(e.year), std::string(to_string(e.label)),
                         join_entities(e.prior_entities), join_entities(e.current_entities),
                         join_entities(e.new_entities), e.is_return ? "true" : "false"});
  }
}

std::vector<MobilityEvent> read_events_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, kEventHeader, "event table");
  std::vector<MobilityEvent> events;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != kEventHeader.size()) {
      throw ParseError("event table: expected 7 columns", reader.line());
    }
    const auto& r = *row;
    MobilityEvent e;
    e.author_id = r[0];
    auto [ptr, ec] = std::from_chars(r[1].data(), r[1].data() + r[1].size(), e.year);
    if (ec != std::errc{} || ptr != r[1].data() + r[1].size()) {
      throw ParseError("event table: bad year \"" + r[1] + "\"", reader.line());
    }
    try {
      e.label = parse_label(r[2]);
    } catch (const ParseError&) {
      throw ParseError("event table: unknown label \"" + r[2] + "\"", reader.line());
    }
    e.prior_entities = split_entities(r[3]);
    e.current_entities = split_entities(r[4]);
    e.new_entities = split_entities(r[5]);
    if (r[6] != "true" && r[6] != "false") {
      throw ParseError("event table: is_return must be true or false", reader.line());
    }
    e.is_return = r[6] == "true";
    events.push_back(std::move(e));
  }
  return events;
}

void write_profiles_csv(std::ostream& out, const MobilitySummary& summary) {
  csv::write_row(out, {"author_id", "origin_entities", "active_years", "ever_mobile", "ever_multi",
                       "returned"});
  for (const auto& [id, p] : summary.profiles) {
    csv::write_row(out, {id, join_entities(p.origin_entities), std::to_string(p.events.size()),
                         p.ever_mobile ? "true" : "false", p.ever_multi ? "true" : "false",
                         p.returned ? "true" : "false"});
  }
}

void write_label_counts_csv(std::ostream& out, const MobilitySummary& summary) {
  csv::write_row(out, {"year", "label", "count"});
  for (const auto& [year, tally] : summary.counts_by_year) {
    for (MobilityLabel label : kAllLabels) {
      csv::write_row(out, {std::to_string(year), std::string(to_string(label)),
                           std::to_string(tally[static_cast<std::size_t>(label)])});
    }
  }
  for (MobilityLabel label : kAllLabels) {
    csv::write_row(out, {"TOTAL", std::string(to_string(label)),
                         std::to_string(summary.totals[static_cast<std::size_t>(label)])});
  }
}

}  // namespace mobind
