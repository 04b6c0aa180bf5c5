#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "mobind/error.hpp"
#include "mobind/mobility.hpp"
#include "mobind/synth.hpp"

namespace mobind {
namespace {

using testing::career;
using testing::history_of;
using testing::set_of;

TEST(LabelYear, PaperCases) {
  const auto nl = set_of({"NL"});
  const auto nl_us = set_of({"NL", "US"});
  EXPECT_EQ(label_year(nl, &nl), MobilityLabel::kNonMobile);
  EXPECT_EQ(label_year(set_of({"US"}), &nl), MobilityLabel::kMobile);
  EXPECT_EQ(label_year(nl_us, &nl), MobilityLabel::kMobileAndMulti);
  EXPECT_EQ(label_year(nl_us, &nl_us), MobilityLabel::kMultiAffiliation);
}

TEST(LabelYear, FirstYearNeverMobile) {
  EXPECT_EQ(label_year(set_of({"NL"}), nullptr), MobilityLabel::kNonMobile);
  EXPECT_EQ(label_year(set_of({"NL", "US"}), nullptr), MobilityLabel::kMultiAffiliation);
}

TEST(LabelYear, DroppingAnEntityIsNotMobility) {
  const auto nl_us = set_of({"NL", "US"});
  EXPECT_EQ(label_year(set_of({"NL"}), &nl_us), MobilityLabel::kNonMobile);
}

TEST(LabelYear, EmptyCurrentViolatesContract) {
  EXPECT_THROW(label_year({}, nullptr), ContractViolation);
}

EntitySet from_mask(unsigned mask) {
  static const char* names[] = {"A", "B", "C"};
  EntitySet s;
  for (unsigned i = 0; i < 3; ++i) {
    if (mask & (1u << i)) s.insert(names[i]);
  }
  return s;
}

// Hand enumeration of every (current, prior) pair over three entities, with
// the expected label written from the rule's wording.
TEST(LabelYear, ExhaustiveOverThreeEntities) {
  for (unsigned cur = 1; cur < 8; ++cur) {
    const auto current = from_mask(cur);
    const bool several = __builtin_popcount(cur) > 1;
    EXPECT_EQ(label_year(current, nullptr),
              several ? MobilityLabel::kMultiAffiliation : MobilityLabel::kNonMobile);
    for (unsigned pri = 1; pri < 8; ++pri) {
      const auto prior = from_mask(pri);
      const bool gained = (cur & ~pri) != 0;
      MobilityLabel expected = MobilityLabel::kNonMobile;
      if (gained && several) expected = MobilityLabel::kMobileAndMulti;
      else if (gained) expected = MobilityLabel::kMobile;
      else if (several) expected = MobilityLabel::kMultiAffiliation;
      EXPECT_EQ(label_year(current, &prior), expected) << "cur=" << cur << " prior=" << pri;
    }
  }
}

std::vector<MobilityLabel> labels(const std::vector<MobilityEvent>& events) {
  std::vector<MobilityLabel> out;
  for (const auto& e : events) out.push_back(e.label);
  return out;
}

std::vector<bool> returns(const std::vector<MobilityEvent>& events) {
  std::vector<bool> out;
  for (const auto& e : events) out.push_back(e.is_return);
  return out;
}

TEST(ClassifyAuthor, MoveAndReturn) {
  const auto events = classify_author(history_of("a", {{2003, {"ES"}}, {2005, {"US"}}, {2007, {"ES"}}}),
                                      Level::kCountry);
  EXPECT_EQ(labels(events),
            (std::vector{MobilityLabel::kNonMobile, MobilityLabel::kMobile, MobilityLabel::kMobile}));
  EXPECT_EQ(returns(events), (std::vector{false, false, true}));
  EXPECT_EQ(events[1].prior_entities, set_of({"ES"}));
  EXPECT_EQ(events[1].new_entities, set_of({"US"}));
  EXPECT_TRUE(events[0].prior_entities.empty());
}

TEST(ClassifyAuthor, GapYearsAreSkipped) {
  const auto events = classify_author(history_of("a", {{2004, {"NL"}}, {2006, {"NL"}}}), Level::kCountry);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].label, MobilityLabel::kNonMobile);
  EXPECT_EQ(events[1].prior_entities, set_of({"NL"}));
}

TEST(ClassifyAuthor, SingleYear) {
  const auto events = classify_author(history_of("a", {{2004, {"NL", "US"}}}), Level::kCountry);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].label, MobilityLabel::kMultiAffiliation);
}

TEST(ClassifyAuthor, CityLevelSeesWithinCountryMoves) {
  std::vector<PublicationRecord> records{
      testing::pub("p1", 2004, {{"a", {testing::aff("ES", "Madrid", "UCM")}}}),
      testing::pub("p2", 2005, {{"a", {testing::aff("ES", "Valencia", "UV")}}}),
  };
  const auto h = build_author_histories(records).at("a");
  EXPECT_EQ(classify_author(h, Level::kCountry)[1].label, MobilityLabel::kNonMobile);
  const auto city = classify_author(h, Level::kCity);
  EXPECT_EQ(city[1].label, MobilityLabel::kMobile);
  EXPECT_EQ(city[1].new_entities, set_of({"ES|Valencia"}));
}

TEST(ClassifyAuthor, PerPaperMultiSwitch) {
  // Two papers in 2005, each listing one country: multi at year level only.
  std::vector<PublicationRecord> records{
      testing::pub("p1", 2004, {{"a", {testing::aff("NL")}}}),
      testing::pub("p2", 2005, {{"a", {testing::aff("NL")}}}),
      testing::pub("p3", 2005, {{"a", {testing::aff("US")}}}),
  };
  const auto h = build_author_histories(records).at("a");
  EXPECT_EQ(classify_author(h, Level::kCountry)[1].label, MobilityLabel::kMobileAndMulti);
  EXPECT_EQ(classify_author(h, Level::kCountry, {.per_paper_multi = true})[1].label, MobilityLabel::kMobile);
}

TEST(DetectReturn, Examples) {
  auto run = [](std::initializer_list<std::pair<int, std::vector<std::string>>> years) {
    return returns(classify_author(history_of("a", years), Level::kCountry));
  };
  EXPECT_EQ(run({{2003, {"ES"}}, {2004, {"US"}}, {2005, {"ES"}}}), (std::vector{false, false, true}));
  EXPECT_EQ(run({{2003, {"NL"}}, {2004, {"NL"}}, {2005, {"NL"}}}), (std::vector{false, false, false}));
  EXPECT_EQ(run({{2003, {"ES"}}, {2004, {"ES", "US"}}, {2005, {"US"}}, {2006, {"ES"}}}),
            (std::vector{false, false, false, true}));
}

// Every trajectory of length <= 4 over the non-empty subsets of {A, B},
// with the return rule evaluated by its quantifiers directly.
TEST(DetectReturn, ExhaustiveTwoEntityTrajectories) {
  const std::vector<EntitySet> subsets{set_of({"A"}), set_of({"B"}), set_of({"A", "B"})};
  auto meets = [](const EntitySet& x, const EntitySet& y) {
    return std::any_of(x.begin(), x.end(), [&](const std::string& e) { return y.contains(e); });
  };
  std::size_t checked = 0;
  for (std::size_t len = 1; len <= 4; ++len) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < len; ++i) combos *= subsets.size();
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<MobilityEvent> events(len);
      std::size_t c = code;
      for (auto& e : events) {
        e.current_entities = subsets[c % subsets.size()];
        c /= subsets.size();
      }
      const auto origin = events.front().current_entities;
      detect_return(events, origin);
      for (std::size_t i = 0; i < len; ++i) {
        bool left = false;
        for (std::size_t j = 0; j < i; ++j) left = left || !meets(events[j].current_entities, origin);
        const bool expected = i > 0 && left && meets(events[i].current_entities, origin) &&
                              !meets(events[i - 1].current_entities, origin);
        EXPECT_EQ(events[i].is_return, expected) << "trajectory " << code << " step " << i;
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 3u * 1 + 9u * 2 + 27u * 3 + 81u * 4);
}

TEST(Summary, FlagsAndShares) {
  std::vector<MobilityEvent> events;
  for (const char* id : {"a", "b", "c"}) {
    MobilityEvent e;
    e.author_id = id;
    e.year = 2004;
    e.current_entities = set_of({"NL"});
    events.push_back(e);
  }
  MobilityEvent move = events[1];
  move.year = 2005;
  move.label = MobilityLabel::kMobile;
  move.prior_entities = set_of({"NL"});
  move.current_entities = move.new_entities = set_of({"US"});
  events.push_back(move);
  const auto s = summarize_profiles(events);
  EXPECT_TRUE(s.profiles.at("b").ever_mobile);
  EXPECT_FALSE(s.profiles.at("a").ever_mobile);
  EXPECT_EQ(s.profiles.at("b").origin_entities, set_of({"NL"}));
  EXPECT_DOUBLE_EQ(s.mobile_author_share(), 1.0 / 3.0);
  EXPECT_EQ(s.totals[static_cast<std::size_t>(MobilityLabel::kMobile)], 1u);
}

ScenarioConfig busy_world(std::size_t authors) {
  auto c = scenario_preset("world");
  c.n_authors = authors;
  c.mobility_rate = 0.5;
  c.multi_rate = 0.3;
  c.return_rate = 0.5;
  return c;
}

TEST(Properties, LabelPartitionAndFirstYear) {
  const auto corpus = generate_corpus(busy_world(400));
  const auto histories = build_author_histories(corpus.records);
  const auto events = classify_all(histories, Level::kCountry);
  std::size_t active_years = 0;
  for (const auto& [id, h] : histories) active_years += h.timeline.size();
  EXPECT_EQ(events.size(), active_years);
  const auto s = summarize_profiles(events);
  std::size_t total = 0;
  for (auto t : s.totals) total += t;
  EXPECT_EQ(total, active_years);
  for (const auto& [id, p] : s.profiles) {
    EXPECT_FALSE(is_mobile(p.events.front().label));
    EXPECT_TRUE(!p.returned || p.ever_mobile);
    for (const auto& e : p.events) {
      EXPECT_TRUE(std::includes(e.current_entities.begin(), e.current_entities.end(), e.new_entities.begin(),
                                e.new_entities.end()));
      EXPECT_EQ(is_mobile(e.label), !e.new_entities.empty());
    }
  }
}

TEST(Properties, OrderIndependentAndDeterministic) {
  auto records = generate_corpus(busy_world(300)).records;
  const auto a = classify_all(build_author_histories(records), Level::kCountry);
  std::shuffle(records.begin(), records.end(), std::mt19937(3));
  const auto b = classify_all(build_author_histories(records), Level::kCountry);
  std::ostringstream x, y;
  write_events_csv(x, a);
  write_events_csv(y, b);
  EXPECT_EQ(x.str(), y.str());
}

TEST(Properties, CountryLabelsIgnoreCityAndOrgChanges) {
  auto records = generate_corpus(busy_world(200)).records;
  const auto before = classify_all(build_author_histories(records), Level::kCountry);
  for (auto& r : records) {
    for (auto& e : r.authors) {
      for (auto& a : e.affiliations) {
        a.city = "X" + std::to_string(r.year % 3);
        a.organization = "Y" + r.pub_id;
      }
    }
  }
  const auto after = classify_all(build_author_histories(records), Level::kCountry);
  std::ostringstream x, y;
  write_events_csv(x, before);
  write_events_csv(y, after);
  EXPECT_EQ(x.str(), y.str());
}

TEST(EventCsv, RoundTrip) {
  const auto events = classify_all(build_author_histories(generate_corpus(busy_world(100)).records), Level::kCountry);
  std::ostringstream out;
  write_events_csv(out, events);
  std::istringstream in(out.str());
  const auto back = read_events_csv(in);
  ASSERT_EQ(back.size(), events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(back[i].author_id, events[i].author_id);
    EXPECT_EQ(back[i].label, events[i].label);
    EXPECT_EQ(back[i].is_return, events[i].is_return);
    EXPECT_EQ(back[i].prior_entities, events[i].prior_entities);
    EXPECT_EQ(back[i].new_entities, events[i].new_entities);
  }
}

TEST(EventCsv, EntitySetsAreSortedAndSemicolonJoined) {
  EXPECT_EQ(join_entities(set_of({"US", "NL", "BE"})), "BE;NL;US");
  EXPECT_EQ(split_entities("BE;NL;US"), set_of({"BE", "NL", "US"}));
  EXPECT_TRUE(split_entities("").empty());
}

}  // namespace
}  // namespace mobind
