#include "pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "mobind/coaffil.hpp"
#include "mobind/csv.hpp"
#include "mobind/format.hpp"
#include "mobind/graph_io.hpp"
#include "mobind/graphmetrics.hpp"
#include "mobind/impact.hpp"
#include "mobind/mobility.hpp"
#include "mobind/synth.hpp"
#include "provenance.hpp"

namespace mobind::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCorpus = "corpus.jsonl";
constexpr const char* kEvents = "events.csv";
constexpr const char* kCapacity = "capacity.csv";
constexpr const char* kNodes = "network.nodes.csv";
constexpr const char* kEdges = "network.edges.csv";

std::string upper(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

int parse_year(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("bad window \"" + std::string(whole) + "\"; expected START:END, e.g. 2003:2015");
  }
  return value;
}

// Files written by one stage, tracked for provenance.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw ConfigError("error writing " + path.string());
    paths_.push_back(path);
  }

  const std::vector<fs::path>& paths() const { return paths_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& p : paths_) out.push_back(p.filename().string());
    return out;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> paths_;
};

fs::path require(const RunConfig& config, const char* file, std::string_view producer) {
  auto path = config.out_dir / file;
  if (!fs::is_regular_file(path)) throw MissingArtifact(path, producer);
  return path;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  auto& inputs = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& p : c.inputs) inputs.push_back(p.filename().string());
  j["aliases"] = c.aliases ? c.aliases->filename().string() : "";
  j["window"] = std::to_string(c.window.start) + ":" + std::to_string(c.window.end);
  j["level"] = to_string(c.level);
  auto& scope = j["scope"] = nlohmann::ordered_json::array();
  for (const auto& s : c.scope) scope.push_back(s);
  j["threshold"] = c.threshold;
  j["top_k"] = c.top_k;
  j["format"] = to_string(c.format);
  j["all_pairs"] = c.all_pairs;
  j["weighted"] = c.weighted;
  j["dedup_researchers"] = c.dedup_researchers;
  j["flow_scope"] = c.flow_scope == ScopeMode::kBothEndpoints ? "both" : "either";
  j["scenario"] = c.scenario;
  j["seed"] = c.seed;
  j["authors"] = c.authors ? nlohmann::ordered_json(*c.authors) : nlohmann::ordered_json();
  j["ineligible_authors"] = c.ineligible_authors;
  j["citation_multiplier"] =
      c.citation_multiplier ? nlohmann::ordered_json(*c.citation_multiplier) : nlohmann::ordered_json();
  return j;
}

StageResult finish(const RunConfig& config, std::string stage, std::string summary,
                   const std::vector<fs::path>& inputs, const Outputs& outputs) {
  write_provenance(config.out_dir, {stage, config_json(config), inputs, outputs.paths()});
  return {std::move(stage), std::move(summary), outputs.names()};
}

std::vector<PublicationRecord> load_corpus(const fs::path& path) {
  auto in = open_input(path);
  auto result = ingest_corpus(in);
  if (!result.report.rejects.empty()) {
    throw DataError(path.string() + ": " + result.report.rejects.front().message + "; re-run ingest");
  }
  return std::move(result.records);
}

HistoryMap eligible_from(std::span<const PublicationRecord> records, const RunConfig& config) {
  return filter_eligible_researchers(build_author_histories(records), config.window);
}

std::vector<MobilityEvent> load_events(const fs::path& path) {
  auto in = open_input(path);
  return read_events_csv(in);
}

void write_baselines_csv(std::ostream& out, const BaselineMap& baselines) {
  csv::write_row(out, {"field", "year", "papers", "total_citations", "mean_citations"});
  for (const auto& [key, b] : baselines) {
    csv::write_row(out, {b.field, std::to_string(b.year), std::to_string(b.paper_count),
                         std::to_string(b.total_citations), format_fixed(b.mean_citations(), 6)});
  }
}

void write_eligible_csv(std::ostream& out, const HistoryMap& eligible) {
  csv::write_row(out, {"author_id", "first_year", "last_year", "pub_count"});
  for (const auto& [id, h] : eligible) {
    csv::write_row(out, {id, std::to_string(h.first_year), std::to_string(h.last_year), std::to_string(h.pub_count)});
  }
}

StageResult run_ingest(const RunConfig& config) {
  if (config.inputs.empty()) throw ConfigError("ingest needs at least one --input file");
  std::stringstream all;
  for (const auto& path : config.inputs) {
    auto in = open_input(path);
    all << in.rdbuf();
    // Keep records from different files on separate lines.
    all << '\n';
  }
  const auto aliases = config.aliases ? AliasMap::read_file(*config.aliases) : AliasMap{};
  const auto result = ingest_corpus(all, aliases);
  const auto baselines = compute_field_year_baselines(result.records);

  Outputs out(config.out_dir);
  out.write(kCorpus, [&](std::ostream& o) {
    for (const auto& r : result.records) o << serialize_publication(r) << '\n';
  });
  out.write("validation.csv", [&](std::ostream& o) { write_validation_report(o, result.report); });
  out.write("rejects.csv", [&](std::ostream& o) { write_rejects(o, result.report); });
  out.write("baselines.csv", [&](std::ostream& o) { write_baselines_csv(o, baselines); });

  auto inputs = config.inputs;
  if (config.aliases) inputs.push_back(*config.aliases);
  auto stage = finish(config, "ingest",
                      "ingest: " + std::to_string(result.report.parsed) + " records, " +
                          std::to_string(result.report.rejected) + " rejected",
                      inputs, out);
  if (result.records.empty()) throw DataError("ingest: no valid records in input");
  return stage;
}

StageResult run_classify(const RunConfig& config) {
  const auto corpus = require(config, kCorpus, "ingest");
  const auto records = load_corpus(corpus);
  const auto eligible = eligible_from(records, config);
  const auto events = classify_all(eligible, config.level);
  const auto summary = summarize_profiles(events);
  const auto capacity = compute_capacities(eligible, config.level);

  Outputs out(config.out_dir);
  out.write(kEvents, [&](std::ostream& o) { write_events_csv(o, events); });
  out.write("profiles.csv", [&](std::ostream& o) { write_profiles_csv(o, summary); });
  out.write("label_counts.csv", [&](std::ostream& o) { write_label_counts_csv(o, summary); });
  out.write("eligible.csv", [&](std::ostream& o) { write_eligible_csv(o, eligible); });
  out.write(kCapacity, [&](std::ostream& o) { write_capacity_csv(o, capacity); });
  return finish(config, "classify",
                "classify: " + std::to_string(eligible.size()) + " eligible researchers, " +
                    std::to_string(events.size()) + " events, " + std::to_string(summary.mobile_authors) +
                    " mobile",
                {corpus}, out);
}

StageResult run_network(const RunConfig& config) {
  const auto corpus = require(config, kCorpus, "ingest");
  const auto records = load_corpus(corpus);
  const auto eligible = eligible_from(records, config);
  CoaffilOptions options;
  options.all_pairs = config.all_pairs;
  const auto graph = build_coaffiliation_graph(eligible, config.level, config.scope, options);
  const auto s = graph_summary(graph);

  Outputs out(config.out_dir);
  out.write(kNodes, [&](std::ostream& o) { write_node_list(o, graph); });
  out.write(kEdges, [&](std::ostream& o) { write_edge_list(o, graph); });
  if (config.format == GraphFormat::kGraphml) {
    out.write("network.graphml", [&](std::ostream& o) { write_graphml(o, graph); });
  } else if (config.format == GraphFormat::kPajek) {
    out.write("network.net", [&](std::ostream& o) { write_pajek(o, graph); });
  }
  return finish(config, "network",
                "network: " + std::to_string(s.nodes) + " nodes, " + std::to_string(s.edges) + " edges, " +
                    std::to_string(s.components) + " components",
                {corpus}, out);
}

StageResult run_centrality(const RunConfig& config) {
  const auto nodes_path = require(config, kNodes, "network");
  const auto edges_path = require(config, kEdges, "network");
  auto nodes = open_input(nodes_path);
  auto edges = open_input(edges_path);
  auto graph = read_node_edge_lists(nodes, edges, config.level);
  if (!config.scope.empty()) {
    std::set<std::string, std::less<>> keep;
    for (const auto& [key, weight] : graph.nodes) {
      if (config.scope.contains(country_of_key(key))) keep.insert(key);
    }
    if (keep.empty()) throw DataError("centrality: no network nodes inside the scope");
    graph = region_subgraph(graph, keep);
  }
  if (graph.nodes.empty()) throw DataError("centrality: the network is empty");
  CentralityOptions options;
  options.threshold = config.threshold;
  options.weighted = config.weighted;
  const auto rows = centrality_table(graph, config.top_k, CentralitySortKey::kBetweenness, options);

  Outputs out(config.out_dir);
  out.write("centrality.csv", [&](std::ostream& o) { write_centrality_csv(o, rows); });
  const auto& top = rows.front();
  return finish(config, "centrality",
                "centrality: " + std::to_string(rows.size()) + " rows, top " + top.entity + " (betweenness " +
                    format_fixed(top.betweenness, 4) + ")",
                {nodes_path, edges_path}, out);
}

StageResult run_flows(const RunConfig& config) {
  const auto events_path = require(config, kEvents, "classify");
  const auto capacity_path = require(config, kCapacity, "classify");
  const auto events = load_events(events_path);
  auto capacity_in = open_input(capacity_path);
  const auto capacity = read_capacity_csv(capacity_in);

  FlowOptions options;
  options.scope = config.scope;
  options.scope_mode = config.flow_scope;
  options.dedup_researchers = config.dedup_researchers;
  const auto matrix = build_flow_matrix(events, capacity, options);
  const auto sending = normalized_shares(matrix, FlowDirection::kSending);
  const auto receiving = normalized_shares(matrix, FlowDirection::kReceiving);
  for (const auto* table : {&sending, &receiving}) {
    for (const auto& w : table->warnings) std::cerr << "warning: " << w << '\n';
  }

  Outputs out(config.out_dir);
  out.write("flow_matrix.csv", [&](std::ostream& o) { write_flow_matrix_csv(o, matrix); });
  out.write("shares_sending.csv", [&](std::ostream& o) { write_share_csv(o, sending); });
  out.write("shares_receiving.csv", [&](std::ostream& o) { write_share_csv(o, receiving); });
  out.write("shares_long.csv", [&](std::ostream& o) { write_share_long_csv(o, sending, receiving); });
  return finish(config, "flows",
                "flows: " + std::to_string(matrix.size()) + " entities, " +
                    std::to_string(matrix.contributing_events) + " events, total weight " +
                    format_fixed(matrix.total(), 6),
                {events_path, capacity_path}, out);
}

StageResult run_impact(const RunConfig& config) {
  const auto corpus = require(config, kCorpus, "ingest");
  const auto events_path = require(config, kEvents, "classify");
  const auto records = load_corpus(corpus);
  const auto eligible = eligible_from(records, config);
  const auto events = load_events(events_path);
  const auto baselines = compute_field_year_baselines(records);
  const auto indicators = indicators_by_mobility_class(records, baselines, eligible, events);

  Outputs out(config.out_dir);
  out.write("indicators.csv", [&](std::ostream& o) { write_indicators_csv(o, indicators); });
  return finish(config, "impact",
                "impact: " + std::to_string(indicators.corpus.paper_count) + " papers, corpus MNCS " +
                    format_fixed(indicators.corpus.mncs, 4),
                {corpus, events_path}, out);
}

StageResult run_synth(const RunConfig& config) {
  auto scenario = scenario_preset(config.scenario);
  scenario.seed = config.seed;
  if (config.authors) scenario.n_authors = *config.authors;
  scenario.ineligible_authors = config.ineligible_authors;
  if (config.citation_multiplier) scenario.citations.mobile_multiplier = *config.citation_multiplier;
  const auto corpus = generate_corpus(scenario);

  Outputs out(config.out_dir);
  out.write("synth_corpus.jsonl", [&](std::ostream& o) { write_corpus(o, corpus.records); });
  out.write("synth_truth_events.csv", [&](std::ostream& o) { write_events_csv(o, corpus.truth.events); });
  out.write("synth_truth_flows.csv", [&](std::ostream& o) { write_truth_flows_csv(o, corpus.truth); });
  return finish(config, "synth",
                "synth: " + std::to_string(corpus.records.size()) + " publications, " +
                    std::to_string(corpus.truth.eligible_authors) + " eligible authors, " +
                    std::to_string(corpus.truth.events.size()) + " planted events",
                {}, out);
}

}  // namespace

std::string_view to_string(GraphFormat format) noexcept {
  switch (format) {
    case GraphFormat::kGraphml: return "graphml";
    case GraphFormat::kPajek: return "pajek";
    case GraphFormat::kCsv: break;
  }
  return "csv";
}

GraphFormat parse_format(std::string_view text) {
  if (text == "csv") return GraphFormat::kCsv;
  if (text == "graphml") return GraphFormat::kGraphml;
  if (text == "pajek") return GraphFormat::kPajek;
  throw ConfigError("unknown format \"" + std::string(text) + "\" (expected csv, graphml or pajek)");
}

void RunConfig::validate() const {
  if (window.start > window.end) {
    throw ConfigError("window start " + std::to_string(window.start) + " is after end " + std::to_string(window.end));
  }
  if (top_k <= 0) throw ConfigError("--top-k must be positive");
  if (threshold < 1) throw ConfigError("--threshold must be at least 1");
  if (authors && *authors == 0) throw ConfigError("--authors must be positive");
  if (citation_multiplier && *citation_multiplier < 0.0) throw ConfigError("--citation-multiplier must be >= 0");
}

MissingArtifact::MissingArtifact(const fs::path& file, std::string_view producer)
    : ConfigError("missing " + file.string() + "; run `mobind " + std::string(producer) + "` first") {}

EligibilityWindow parse_window(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("bad window \"" + std::string(text) + "\"; expected START:END, e.g. 2003:2015");
  }
  EligibilityWindow window{parse_year(text.substr(0, colon), text), parse_year(text.substr(colon + 1), text)};
  if (window.start > window.end) throw ConfigError("window start is after its end in \"" + std::string(text) + "\"");
  return window;
}

std::set<std::string, std::less<>> parse_scope(std::string_view text) {
  std::string body(text);
  if (fs::is_regular_file(fs::path(body))) {
    auto in = open_input(body);
    std::string content;
    for (std::string line; std::getline(in, line);) {
      content += line.substr(0, line.find('#'));
      content += '\n';
    }
    body = std::move(content);
  }
  std::set<std::string, std::less<>> scope;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) scope.insert(upper(token));
    token.clear();
  };
  for (char c : body) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  if (scope.empty()) throw ConfigError("empty scope \"" + std::string(text) + "\"");
  return scope;
}

std::vector<StageResult> run_subcommand(std::string_view name, const RunConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());

  using Runner = StageResult (*)(const RunConfig&);
  static const std::pair<std::string_view, Runner> kRunners[] = {
      {"ingest", run_ingest}, {"classify", run_classify}, {"network", run_network}, {"centrality", run_centrality},
      {"flows", run_flows},   {"impact", run_impact},     {"synth", run_synth},
  };
  std::vector<StageResult> results;
  if (name == "all") {
    for (const auto& [stage, runner] : kRunners) {
      if (stage != "synth") results.push_back(runner(config));
    }
    return results;
  }
  for (const auto& [stage, runner] : kRunners) {
    if (stage == name) {
      results.push_back(runner(config));
      return results;
    }
  }
  throw ConfigError("unknown subcommand \"" + std::string(name) + "\"");
}

int exit_code_for(const std::exception& error) noexcept {
  return dynamic_cast<const ConfigError*>(&error) != nullptr ? 1 : 2;
}

}  // namespace mobind::pipeline
