#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace mobind::pipeline {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Hex SHA-256 over the file's non-empty lines after sorting, so reordering
/// records leaves it unchanged while any edit changes it.
std::string sha256_sorted_lines(const std::filesystem::path& path);

struct ProvenanceRecord {
  std::string subcommand;
  nlohmann::ordered_json config;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> artifacts;
};

/// Writes <out_dir>/<subcommand>.provenance.json. Only file names are
/// recorded so the record does not depend on where the run happened.
void write_provenance(const std::filesystem::path& out_dir, const ProvenanceRecord& record);

}  // namespace mobind::pipeline
