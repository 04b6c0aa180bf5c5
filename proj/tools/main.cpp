#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "pipeline.hpp"

namespace {

using mobind::pipeline::RunConfig;

// Raw option text, converted after parsing so conversion errors map to
// ConfigError like every other configuration problem.
struct RawOptions {
  std::string window = "2003:2015";
  std::string level = "country";
  std::string scope;
  std::string format = "csv";
  std::string flow_scope = "both";
};

void add_common(CLI::App& sub, RunConfig& config, RawOptions& raw) {
  sub.add_option("--out", config.out_dir, "Output directory (default $MOBIND_OUT_DIR or mobind_out)");
  sub.add_option("--window", raw.window, "Eligibility window START:END for the first publication year");
  sub.add_option("--level", raw.level, "Aggregation level: country, city or org");
  sub.add_option("--scope", raw.scope, "Country keys (comma separated) or a file listing them");
}

RunConfig finalize(RunConfig config, const RawOptions& raw) {
  namespace p = mobind::pipeline;
  config.window = p::parse_window(raw.window);
  config.level = mobind::parse_level(raw.level);
  if (!raw.scope.empty()) config.scope = p::parse_scope(raw.scope);
  config.format = p::parse_format(raw.format);
  if (raw.flow_scope == "both") {
    config.flow_scope = mobind::ScopeMode::kBothEndpoints;
  } else if (raw.flow_scope == "either") {
    config.flow_scope = mobind::ScopeMode::kEitherEndpoint;
  } else {
    throw mobind::ConfigError("--flow-scope must be both or either");
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Researcher mobility and co-affiliation indicators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MOBIND_VERSION);

  RunConfig config;
  if (const char* env = std::getenv("MOBIND_OUT_DIR"); env != nullptr && *env != '\0') config.out_dir = env;
  RawOptions raw;

  auto* ingest = app.add_subcommand("ingest", "Parse and validate the corpus");
  ingest->add_option("--input", config.inputs, "Line-delimited JSON corpus file(s)")->required();
  ingest->add_option("--aliases", config.aliases, "CSV alias map raw,canonical");

  auto* classify = app.add_subcommand("classify", "Label mobility events per researcher-year");
  auto* network = app.add_subcommand("network", "Build the co-affiliation network");
  network->add_option("--format", raw.format, "Extra export: csv, graphml or pajek");
  network->add_flag("--all-pairs", config.all_pairs, "Link every pair of a researcher's entities");

  auto* centrality = app.add_subcommand("centrality", "Closeness and betweenness table");
  centrality->add_option("--threshold", config.threshold, "Minimum edge weight");
  centrality->add_option("--top-k", config.top_k, "Rows to report");
  centrality->add_flag("--weighted", config.weighted, "Use 1/weight edge lengths");

  auto* flows = app.add_subcommand("flows", "Flow matrix and capacity-normalized shares");
  flows->add_option("--flow-scope", raw.flow_scope, "Scope rule: both or either endpoint inside");
  flows->add_flag("--dedup-researchers", config.dedup_researchers, "Count each mobile researcher once");

  auto* impact = app.add_subcommand("impact", "Citation indicators by mobility class");

  auto* synth = app.add_subcommand("synth", "Generate a planted synthetic corpus");
  synth->add_option("--scenario", config.scenario, "world, null, two-block or over-sending");
  synth->add_option("--seed", config.seed, "Random seed");
  synth->add_option("--authors", config.authors, "Number of eligible authors");
  synth->add_option("--ineligible", config.ineligible_authors, "Extra authors failing eligibility");
  synth->add_option("--citation-multiplier", config.citation_multiplier, "Citation boost in mobile years");

  auto* all = app.add_subcommand("all", "ingest, classify, network, centrality, flows and impact");
  all->add_option("--input", config.inputs, "Line-delimited JSON corpus file(s)")->required();
  all->add_option("--aliases", config.aliases, "CSV alias map raw,canonical");
  all->add_option("--format", raw.format, "Extra network export: csv, graphml or pajek");
  all->add_flag("--all-pairs", config.all_pairs, "Link every pair of a researcher's entities");
  all->add_option("--threshold", config.threshold, "Minimum edge weight for centrality");
  all->add_option("--top-k", config.top_k, "Centrality rows to report");
  all->add_flag("--weighted", config.weighted, "Use 1/weight edge lengths");
  all->add_option("--flow-scope", raw.flow_scope, "Scope rule: both or either endpoint inside");
  all->add_flag("--dedup-researchers", config.dedup_researchers, "Count each mobile researcher once");

  for (auto* sub : {ingest, classify, network, centrality, flows, impact, synth, all}) add_common(*sub, config, raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto results = mobind::pipeline::run_subcommand(name, finalize(config, raw));
    for (const auto& r : results) std::cout << r.summary << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mobind " << name << ": " << e.what() << '\n';
    return mobind::pipeline::exit_code_for(e);
  }
}
