#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mobind/corpus.hpp"
#include "mobind/error.hpp"
#include "mobind/flows.hpp"

namespace mobind::pipeline {

enum class GraphFormat { kCsv, kGraphml, kPajek };

std::string_view to_string(GraphFormat format) noexcept;
GraphFormat parse_format(std::string_view text);

struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::optional<std::filesystem::path> aliases;
  std::filesystem::path out_dir = "mobind_out";
  EligibilityWindow window;
  Level level = Level::kCountry;
  std::set<std::string, std::less<>> scope;  // country keys
  std::uint64_t threshold = 1;
  int top_k = 20;
  GraphFormat format = GraphFormat::kCsv;

  bool all_pairs = false;
  bool weighted = false;
  bool dedup_researchers = false;
  ScopeMode flow_scope = ScopeMode::kBothEndpoints;

  std::string scenario = "world";
  std::uint64_t seed = 42;
  std::optional<std::size_t> authors;
  std::size_t ineligible_authors = 0;
  std::optional<double> citation_multiplier;

  /// Throws ConfigError.
  void validate() const;
};

/// A prerequisite artifact is absent from the output directory.
class MissingArtifact : public ConfigError {
 public:
  MissingArtifact(const std::filesystem::path& file, std::string_view producer);
};

/// "2003:2015" -> {2003, 2015}. Throws ConfigError.
EligibilityWindow parse_window(std::string_view text);

/// Comma or whitespace separated country keys, or the path of a file holding
/// them ('#' starts a comment). Tokens are upper-cased.
std::set<std::string, std::less<>> parse_scope(std::string_view text);

struct StageResult {
  std::string stage;
  std::string summary;
  std::vector<std::string> artifacts;  // file names inside out_dir
};

inline constexpr std::string_view kStages[] = {"ingest", "classify", "network", "centrality",
                                               "flows",  "impact",   "synth",   "all"};

/// Runs one subcommand, writing its artifacts and a provenance record into
/// config.out_dir. `all` runs ingest through impact in order.
std::vector<StageResult> run_subcommand(std::string_view name, const RunConfig& config);

/// Maps an exception to the process exit status: 1 usage/config, 2 data.
int exit_code_for(const std::exception& error) noexcept;

}  // namespace mobind::pipeline
