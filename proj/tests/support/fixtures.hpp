#pragma once

#include <filesystem>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mobind/corpus.hpp"
#include "mobind/mobility.hpp"

namespace mobind::testing {

inline Affiliation aff(std::string country, std::string city = "C", std::string org = "O") {
  return {std::move(org), std::move(city), std::move(country)};
}

inline PublicationRecord pub(std::string id, int year, std::vector<AuthorEntry> authors, std::int64_t citations = 0,
                             std::string field = "F") {
  PublicationRecord r;
  r.pub_id = std::move(id);
  r.year = year;
  r.field = std::move(field);
  r.citations = citations;
  r.authors = std::move(authors);
  return r;
}

/// Single-author records, one per (year, country set) entry, ids "<author>-<n>".
inline std::vector<PublicationRecord> career(const std::string& author,
                                             std::initializer_list<std::pair<int, std::vector<std::string>>> years) {
  std::vector<PublicationRecord> out;
  for (const auto& [year, countries] : years) {
    std::vector<Affiliation> affs;
    for (const auto& c : countries) affs.push_back(aff(c, c + " CITY", c + " UNIV"));
    out.push_back(pub(author + "-" + std::to_string(out.size()), year, {{author, affs}}));
  }
  return out;
}

inline AuthorHistory history_of(const std::string& author,
                                std::initializer_list<std::pair<int, std::vector<std::string>>> years) {
  const auto records = career(author, years);
  return build_author_histories(records).at(author);
}

inline EntitySet set_of(std::initializer_list<const char*> names) {
  EntitySet s;
  for (const auto* n : names) s.insert(n);
  return s;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mobind_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mobind::testing
