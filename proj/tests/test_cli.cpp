#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "fixtures.hpp"
#include "json.hpp"
#include "pipeline.hpp"

namespace mobind::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json provenance(const fs::path& dir, const std::string& stage) {
  auto doc = json::parse(slurp(dir / (stage + ".provenance.json")));
  doc.erase("created_at");
  return doc;
}

// A small planted corpus shared by the tests below.
const fs::path& corpus_file() {
  static const fs::path path = [] {
    const auto dir = testing::scratch_dir("cli_corpus");
    RunConfig c;
    c.out_dir = dir;
    c.authors = 300;
    run_subcommand("synth", c);
    return dir / "synth_corpus.jsonl";
  }();
  return path;
}

RunConfig on_corpus(const std::string& name) {
  RunConfig c;
  c.inputs = {corpus_file()};
  c.out_dir = testing::scratch_dir(name);
  return c;
}

TEST(Options, Window) {
  const auto w = parse_window("2000:2010");
  EXPECT_EQ(w.start, 2000);
  EXPECT_EQ(w.end, 2010);
  EXPECT_THROW(parse_window("2000"), ConfigError);
  EXPECT_THROW(parse_window("2010:2000"), ConfigError);
  EXPECT_THROW(parse_window("20x0:2010"), ConfigError);
}

TEST(Options, ScopeTokensAndFile) {
  EXPECT_EQ(parse_scope("es, fr de"), (std::set<std::string, std::less<>>{"DE", "ES", "FR"}));
  EXPECT_THROW(parse_scope(" , "), ConfigError);
  const auto dir = testing::scratch_dir("scope_file");
  std::ofstream(dir / "scope.txt") << "# Iberia\nES\npt  # Portugal\n";
  EXPECT_EQ(parse_scope((dir / "scope.txt").string()), (std::set<std::string, std::less<>>{"ES", "PT"}));
}

TEST(Options, Validation) {
  RunConfig c;
  c.top_k = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.threshold = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_format("dot"), ConfigError);
  EXPECT_THROW(run_subcommand("bogus", RunConfig{.out_dir = testing::scratch_dir("bogus")}), ConfigError);
}

TEST(Stages, MissingPrerequisiteNamesProducer) {
  RunConfig c;
  c.out_dir = testing::scratch_dir("missing");
  try {
    run_subcommand("centrality", c);
    FAIL() << "expected MissingArtifact";
  } catch (const MissingArtifact& e) {
    EXPECT_NE(std::string(e.what()).find("mobind network"), std::string::npos);
  }
  EXPECT_THROW(run_subcommand("flows", c), MissingArtifact);
  EXPECT_THROW(run_subcommand("impact", c), MissingArtifact);
}

TEST(Stages, AllWritesEveryArtifact) {
  const auto c = on_corpus("all");
  const auto results = run_subcommand("all", c);
  ASSERT_EQ(results.size(), 6u);
  for (const char* file :
       {"corpus.jsonl", "validation.csv", "rejects.csv", "baselines.csv", "events.csv", "profiles.csv",
        "label_counts.csv", "eligible.csv", "capacity.csv", "network.nodes.csv", "network.edges.csv",
        "centrality.csv", "flow_matrix.csv", "shares_sending.csv", "shares_receiving.csv", "shares_long.csv",
        "indicators.csv"}) {
    EXPECT_TRUE(fs::is_regular_file(c.out_dir / file)) << file;
  }
  for (const auto& r : results) {
    EXPECT_TRUE(fs::is_regular_file(c.out_dir / (r.stage + ".provenance.json"))) << r.stage;
  }
}

TEST(Stages, CityNetworkWithinScope) {
  auto c = on_corpus("city_scope");
  run_subcommand("ingest", c);
  c.level = Level::kCity;
  c.scope = {"ES"};
  run_subcommand("network", c);
  std::istringstream nodes(slurp(c.out_dir / "network.nodes.csv"));
  std::string line;
  std::getline(nodes, line);
  std::size_t count = 0;
  while (std::getline(nodes, line)) {
    EXPECT_EQ(line.rfind("ES|", 0), 0u) << line;
    ++count;
  }
  EXPECT_GT(count, 0u);
}

TEST(Stages, GraphFormats) {
  auto c = on_corpus("formats");
  run_subcommand("ingest", c);
  c.format = GraphFormat::kGraphml;
  EXPECT_EQ(run_subcommand("network", c).front().artifacts.back(), "network.graphml");
  c.format = GraphFormat::kPajek;
  EXPECT_EQ(run_subcommand("network", c).front().artifacts.back(), "network.net");
}

TEST(Stages, StepwiseEqualsAll) {
  const auto whole = on_corpus("whole");
  run_subcommand("all", whole);
  const auto steps = on_corpus("steps");
  for (const char* stage : {"ingest", "classify", "flows"}) run_subcommand(stage, steps);
  for (const char* file : {"events.csv", "capacity.csv", "flow_matrix.csv", "shares_long.csv"}) {
    EXPECT_EQ(slurp(whole.out_dir / file), slurp(steps.out_dir / file)) << file;
  }
}

TEST(Provenance, IdenticalRunsDifferOnlyInTimestamp) {
  const auto a = on_corpus("prov_a");
  const auto b = on_corpus("prov_b");
  run_subcommand("all", a);
  run_subcommand("all", b);
  for (const char* stage : {"ingest", "classify", "network", "centrality", "flows", "impact"}) {
    const auto pa = provenance(a.out_dir, stage);
    EXPECT_EQ(pa, provenance(b.out_dir, stage)) << stage;
    EXPECT_EQ(pa["subcommand"], stage);
    EXPECT_FALSE(pa["artifacts"].empty());
  }
}

TEST(Provenance, ConfigDiffShowsOnlyChangedKey) {
  auto c = on_corpus("prov_threshold");
  run_subcommand("ingest", c);
  run_subcommand("network", c);
  run_subcommand("centrality", c);
  const auto before = provenance(c.out_dir, "centrality")["config"];
  c.threshold = 2;
  run_subcommand("centrality", c);
  const auto after = provenance(c.out_dir, "centrality")["config"];
  const auto diff = json::diff(before, after);
  ASSERT_EQ(diff.size(), 1u);
  EXPECT_EQ(diff[0]["path"], "/threshold");
}

TEST(Provenance, InputChecksumTracksContent) {
  const auto dir = testing::scratch_dir("prov_input");
  const auto input = dir / "in.jsonl";
  fs::copy_file(corpus_file(), input);
  RunConfig c;
  c.inputs = {input};
  c.out_dir = dir / "out";
  run_subcommand("ingest", c);
  const auto before = provenance(c.out_dir, "ingest")["inputs"][0]["sha256_sorted_lines"];

  // Reordering lines keeps the checksum; editing a record changes it.
  auto text = slurp(input);
  const auto first = text.find('\n') + 1;
  std::ofstream(input, std::ios::binary | std::ios::trunc) << text.substr(first) << text.substr(0, first);
  run_subcommand("ingest", c);
  EXPECT_EQ(provenance(c.out_dir, "ingest")["inputs"][0]["sha256_sorted_lines"], before);

  text.replace(text.find("\"citations\":"), 12, "\"citations\": ");
  std::ofstream(input, std::ios::binary | std::ios::trunc) << text;
  run_subcommand("ingest", c);
  EXPECT_NE(provenance(c.out_dir, "ingest")["inputs"][0]["sha256_sorted_lines"], before);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(MOBIND_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodes) {
  const auto dir = testing::scratch_dir("exit_codes");
  const auto out = " --out " + (dir / "out").string();
  EXPECT_EQ(run_binary("--version"), 0);
  EXPECT_EQ(run_binary("frobnicate"), 1);
  EXPECT_EQ(run_binary("centrality --top-k 0" + out), 1);
  EXPECT_EQ(run_binary("centrality" + out), 1);
  EXPECT_EQ(run_binary("ingest --input " + (dir / "absent.jsonl").string() + out), 1);
  std::ofstream(dir / "bad.jsonl") << "{not json\n";
  EXPECT_EQ(run_binary("ingest --input " + (dir / "bad.jsonl").string() + out), 2);
  EXPECT_EQ(run_binary("ingest --input " + corpus_file().string() + out), 0);
  EXPECT_EQ(run_binary("classify --window 2003-2015" + out), 1);
}

}  // namespace
}  // namespace mobind::pipeline
