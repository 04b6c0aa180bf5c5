#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "mobind/corpus.hpp"
#include "mobind/error.hpp"
#include "mobind/synth.hpp"

namespace mobind {
namespace {

using testing::aff;
using testing::career;
using testing::pub;

const char* kNlLine =
    R"({"pub_id":"p1","year":2004,"field":"PHYSICS","citations":3,)"
    R"("authors":[{"author_id":"a1","affiliations":[{"org":"TU Delft","city":"Delft","country":" netherlands "}]}]})";

TEST(ParseLine, UppercasesAndTrimsCountry) {
  const auto r = parse_publication_line(kNlLine, 1);
  EXPECT_EQ(r.pub_id, "p1");
  EXPECT_EQ(r.year, 2004);
  EXPECT_EQ(r.citations, 3);
  ASSERT_EQ(r.authors.size(), 1u);
  ASSERT_EQ(r.authors[0].affiliations.size(), 1u);
  EXPECT_EQ(r.authors[0].affiliations[0].country, "NETHERLANDS");
  EXPECT_EQ(r.authors[0].affiliations[0].city, "Delft");
}

TEST(ParseLine, BadYearNamesField) {
  const std::string line =
      R"({"pub_id":"p","year":"20x5","field":"F","citations":0,"authors":[{"author_id":"a","affiliations":[]}]})";
  try {
    parse_publication_line(line, 7);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("year"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(ParseLine, MalformedJsonIsParseError) {
  EXPECT_THROW(parse_publication_line("{\"pub_id\": ", 3), ParseError);
}

TEST(ParseLine, MissingFieldsAreSchemaErrors) {
  EXPECT_THROW(parse_publication_line(R"({"year":2004,"field":"F","citations":0,"authors":[]})"), SchemaError);
  EXPECT_THROW(parse_publication_line(R"({"pub_id":"p","field":"F","citations":0,"authors":[]})"), SchemaError);
  EXPECT_THROW(parse_publication_line(R"({"pub_id":"p","year":2004,"field":"F","citations":0})"), SchemaError);
}

TEST(ParseLine, NegativeCitationsIsValidationError) {
  EXPECT_THROW(
      parse_publication_line(
          R"({"pub_id":"p","year":2004,"field":"F","citations":-1,"authors":[{"author_id":"a","affiliations":[]}]})"),
      ValidationError);
}

TEST(ParseLine, ReservedCharactersRejected) {
  EXPECT_THROW(
      parse_publication_line(
          R"({"pub_id":"p","year":2004,"field":"F","citations":0,"authors":[{"author_id":"a","affiliations":[{"org":"A;B","city":"X","country":"ES"}]}]})"),
      ValidationError);
}

TEST(ParseLine, AuthorWithoutAffiliationsAccepted) {
  const auto r = parse_publication_line(
      R"({"pub_id":"p","year":2004,"field":"F","citations":0,"authors":[{"author_id":"a","affiliations":[]}]})");
  ASSERT_EQ(r.authors.size(), 1u);
  EXPECT_TRUE(r.authors[0].affiliations.empty());
}

TEST(ParseLine, RoundTripIsStable) {
  const auto gen = generate_corpus([] {
    auto c = scenario_preset("world");
    c.n_authors = 50;
    return c;
  }());
  for (const auto& r : gen.records) {
    const auto again = parse_publication_line(serialize_publication(r));
    EXPECT_EQ(again, r);
    EXPECT_EQ(serialize_publication(again), serialize_publication(r));
  }
}

TEST(EntityKeys, ComposeCountryWithLocalName) {
  const Affiliation a{"Univ Valencia", "Valencia", "SPAIN"};
  EXPECT_EQ(entity_key(a, Level::kCountry), "SPAIN");
  EXPECT_EQ(entity_key(a, Level::kCity), "SPAIN|Valencia");
  EXPECT_EQ(entity_key(a, Level::kOrganization), "SPAIN|Univ Valencia");
  EXPECT_EQ(country_of_key("SPAIN|Valencia"), "SPAIN");
  EXPECT_EQ(entity_key(Affiliation{"", "", "SPAIN"}, Level::kCity), "");
  // Two cities named Valencia stay apart.
  EXPECT_NE(entity_key(Affiliation{"", "Valencia", "VENEZUELA"}, Level::kCity), entity_key(a, Level::kCity));
}

TEST(Aliases, SubstitutesMappedNames) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"Univ Barcelona", "UNIVERSITY OF BARCELONA"}};
  const auto map = AliasMap::from_pairs(pairs);
  const auto r = apply_alias_map(pub("p", 2004, {{"a", {aff("ES", "Barcelona", "Univ Barcelona")}}}), map);
  EXPECT_EQ(r.authors[0].affiliations[0].organization, "UNIVERSITY OF BARCELONA");
}

TEST(Aliases, EmptyMapIsIdentity) {
  const auto r = pub("p", 2004, {{"a", {aff("ES", "Barcelona", "UB")}}});
  EXPECT_EQ(apply_alias_map(r, AliasMap{}), r);
}

TEST(Aliases, CycleIsConfigError) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"A", "B"}, {"B", "C"}, {"C", "A"}};
  EXPECT_THROW(AliasMap::from_pairs(pairs), ConfigError);
}

TEST(Aliases, ConflictingTargetsIsConfigError) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"A", "B"}, {"A", "C"}};
  EXPECT_THROW(AliasMap::from_pairs(pairs), ConfigError);
}

TEST(Aliases, ChainsResolveToFixedPoint) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"A", "B"}, {"B", "C"}};
  const auto map = AliasMap::from_pairs(pairs);
  EXPECT_EQ(map.resolve("A"), "C");
  EXPECT_EQ(map.resolve("B"), "C");
  EXPECT_EQ(map.resolve("Z"), "Z");
}

TEST(Aliases, ApplicationIsIdempotent) {
  const std::vector<std::pair<std::string, std::string>> pairs{{"UB", "UNIV BARCELONA"}, {"BCN", "Barcelona"}};
  const auto map = AliasMap::from_pairs(pairs);
  const auto r = pub("p", 2004, {{"a", {aff("ES", "BCN", "UB"), aff("ES", "Barcelona", "UNIV BARCELONA")}}});
  const auto once = apply_alias_map(r, map);
  EXPECT_EQ(apply_alias_map(once, map), once);
  // Both raw spellings collapse into one affiliation.
  EXPECT_EQ(once.authors[0].affiliations.size(), 1u);
}

TEST(Aliases, ReadsCsvWithHeader) {
  std::istringstream in("raw,canonical\nUniv Barcelona,UNIVERSITY OF BARCELONA\n\"U, B\",UNIVERSITY OF BARCELONA\n");
  const auto map = AliasMap::read(in);
  EXPECT_EQ(map.resolve("U, B"), "UNIVERSITY OF BARCELONA");
  std::istringstream bad("from,to\nA,B\n");
  EXPECT_THROW(AliasMap::read(bad), ParseError);
}

TEST(Histories, UnionPerYear) {
  std::vector<PublicationRecord> records{
      pub("p1", 2004, {{"a", {aff("NL")}}}),
      pub("p2", 2004, {{"a", {aff("US")}}}),
  };
  const auto h = build_author_histories(records).at("a");
  ASSERT_EQ(h.timeline.size(), 1u);
  std::set<std::string> countries;
  for (const auto& x : h.timeline.at(2004)) countries.insert(x.country);
  EXPECT_EQ(countries, (std::set<std::string>{"NL", "US"}));
  EXPECT_EQ(h.pub_count, 2u);
}

TEST(Histories, GapsKeptAndCountsPublications) {
  const auto records = career("a", {{2003, {"NL"}}, {2005, {"NL"}}});
  const auto h = build_author_histories(records).at("a");
  EXPECT_EQ(h.timeline.size(), 2u);
  EXPECT_EQ(h.first_year, 2003);
  EXPECT_EQ(h.last_year, 2005);
  EXPECT_EQ(h.pub_count, 2u);
}

TEST(Histories, PubWithoutAffiliationCountsButAddsNoYear) {
  std::vector<PublicationRecord> records{
      pub("p1", 2004, {{"a", {aff("NL")}}}),
      pub("p2", 2005, {{"a", {}}}),
      pub("p3", 2006, {{"a", {aff("NL")}}}),
  };
  const auto h = build_author_histories(records).at("a");
  EXPECT_EQ(h.pub_count, 3u);
  EXPECT_FALSE(h.timeline.contains(2005));
}

// Brute-force union per (author, year) checked against the built histories.
TEST(Histories, MatchesBruteForceUnion) {
  auto config = scenario_preset("world");
  config.n_authors = 200;
  config.multi_rate = 0.4;
  const auto records = generate_corpus(config).records;
  const auto histories = build_author_histories(records);
  std::map<std::pair<std::string, int>, std::set<Affiliation>> expected;
  std::map<std::string, std::set<std::string>> pubs;
  for (const auto& r : records) {
    for (const auto& e : r.authors) {
      pubs[e.author_id].insert(r.pub_id);
      for (const auto& a : e.affiliations) expected[{e.author_id, r.year}].insert(a);
    }
  }
  std::size_t years = 0;
  for (const auto& [id, h] : histories) {
    EXPECT_EQ(h.pub_count, pubs.at(id).size());
    for (const auto& [year, affs] : h.timeline) {
      EXPECT_EQ(affs, (expected.at({id, year})));
      ++years;
    }
  }
  EXPECT_EQ(years, expected.size());
}

TEST(Eligibility, AppliesRule) {
  std::vector<PublicationRecord> records;
  for (auto& r : career("single", {{2005, {"NL"}}})) records.push_back(r);
  for (auto& r : career("early", {{2002, {"NL"}}, {2004, {"NL"}}})) records.push_back(r);
  for (auto& r : career("ok", {{2004, {"NL"}}, {2005, {"NL"}}, {2006, {"US"}}})) records.push_back(r);
  for (auto& r : career("late", {{2016, {"NL"}}, {2017, {"NL"}}})) records.push_back(r);
  const auto eligible = filter_eligible_researchers(build_author_histories(records), {2003, 2015});
  ASSERT_EQ(eligible.size(), 1u);
  EXPECT_TRUE(eligible.contains("ok"));
  EXPECT_THROW(filter_eligible_researchers({}, {2010, 2003}), ConfigError);
}

TEST(Eligibility, IdempotentAndMonotone) {
  auto config = scenario_preset("world");
  config.n_authors = 300;
  config.ineligible_authors = 60;
  config.first_year = 2003;
  config.last_year = 2014;
  const auto histories = build_author_histories(generate_corpus(config).records);
  const auto wide = filter_eligible_researchers(histories, {2003, 2015});
  EXPECT_EQ(filter_eligible_researchers(wide, {2003, 2015}), wide);
  EXPECT_EQ(wide.size(), 300u);
  for (int end = 2005; end <= 2015; ++end) {
    const auto narrow = filter_eligible_researchers(histories, {2005, end});
    for (const auto& [id, h] : narrow) EXPECT_TRUE(wide.contains(id));
  }
}

TEST(Baselines, MeansAndCounts) {
  std::vector<PublicationRecord> records{
      pub("p1", 2004, {{"a", {}}}, 0, "F"),  pub("p2", 2004, {{"a", {}}}, 10, "F"),
      pub("p3", 2005, {{"a", {}}}, 7, "F"),  pub("p4", 2005, {{"a", {}}}, 0, "G"),
      pub("p5", 2005, {{"a", {}}}, 0, "G"),  pub("p6", 2005, {{"a", {}}}, 4, ""),
  };
  const auto b = compute_field_year_baselines(records);
  EXPECT_DOUBLE_EQ(b.at({"F", 2004}).mean_citations(), 5.0);
  EXPECT_EQ(b.at({"F", 2004}).paper_count, 2u);
  EXPECT_DOUBLE_EQ(b.at({"F", 2005}).mean_citations(), 7.0);
  EXPECT_DOUBLE_EQ(b.at({"G", 2005}).mean_citations(), 0.0);
  std::uint64_t total = 0;
  for (const auto& [k, v] : b) total += v.paper_count;
  EXPECT_EQ(total, 5u);  // the field-less paper is skipped
}

TEST(Ingest, ReportsRejectsAndKeepsGoodLines) {
  std::string input = std::string(kNlLine) + "\n\nnot json\n" +
                      R"({"pub_id":"p2","year":2005,"field":"F","citations":-4,"authors":[{"author_id":"a"}]})" +
                      "\n" + kNlLine + "\n" +
                      R"({"pub_id":"p3","year":2005,"field":"F","citations":1,"authors":[{"author_id":"b"}]})" + "\n";
  std::istringstream in(input);
  const auto result = ingest_corpus(in);
  EXPECT_EQ(result.records.size(), 2u);
  EXPECT_EQ(result.report.lines_read, 6u);
  EXPECT_EQ(result.report.blank_lines, 1u);
  EXPECT_EQ(result.report.rejected, 3u);
  EXPECT_EQ(result.report.missing_affiliation_authors, 1u);
  std::ostringstream rejects;
  write_rejects(rejects, result.report);
  EXPECT_NE(rejects.str().find("duplicate"), std::string::npos);
  EXPECT_NE(rejects.str().find("validation"), std::string::npos);
}

TEST(Ingest, DuplicateResolutionIgnoresOrder) {
  const std::string a =
      R"({"pub_id":"p","year":2004,"field":"F","citations":1,"authors":[{"author_id":"x","affiliations":[{"country":"ES"}]}]})";
  const std::string b =
      R"({"pub_id":"p","year":2004,"field":"F","citations":2,"authors":[{"author_id":"x","affiliations":[{"country":"ES"}]}]})";
  std::istringstream ab(a + "\n" + b + "\n");
  std::istringstream ba(b + "\n" + a + "\n");
  const auto x = ingest_corpus(ab);
  const auto y = ingest_corpus(ba);
  EXPECT_EQ(x.records, y.records);
  std::ostringstream rx, ry;
  write_rejects(rx, x.report);
  write_rejects(ry, y.report);
  EXPECT_EQ(rx.str(), ry.str());
}

TEST(Ingest, ShuffledInputGivesSameRecords) {
  auto config = scenario_preset("world");
  config.n_authors = 100;
  auto records = generate_corpus(config).records;
  std::ostringstream sorted;
  for (const auto& r : records) sorted << serialize_publication(r) << '\n';
  std::shuffle(records.begin(), records.end(), std::mt19937(7));
  std::ostringstream shuffled;
  for (const auto& r : records) shuffled << serialize_publication(r) << '\n';
  std::istringstream a(sorted.str()), b(shuffled.str());
  EXPECT_EQ(ingest_corpus(a).records, ingest_corpus(b).records);
}

}  // namespace
}  // namespace mobind
