#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mobind {

/// Aggregation level for entities (nodes, mobility units).
enum class Level { kCountry, kCity, kOrganization };

std::string_view to_string(Level level) noexcept;

/// Accepts "country", "city", "org" and "organization". Throws ConfigError.
Level parse_level(std::string_view text);

/// One address on a publication. Country is uppercased and trimmed and never
/// empty; organization and city are trimmed and may be empty.
struct Affiliation {
  std::string organization;
  std::string city;
  std::string country;

  bool incomplete() const noexcept { return organization.empty() || city.empty(); }

  auto operator<=>(const Affiliation&) const = default;
};

/// Separator between the country and the local name in city and
/// organization keys. Reserved: input names may not contain it.
inline constexpr char kKeySeparator = '|';

/// Canonical key of an affiliation at `level`:
///   country       -> "SPAIN"
///   city          -> "SPAIN|Valencia"
///   organization  -> "SPAIN|Univ Valencia"
/// Empty when the affiliation lacks the component (no city, no org).
std::string entity_key(const Affiliation& affiliation, Level level);

/// Country part of any entity key.
std::string_view country_of_key(std::string_view key) noexcept;

struct AuthorEntry {
  std::string author_id;
  std::vector<Affiliation> affiliations;

  bool operator==(const AuthorEntry&) const = default;
};

struct PublicationRecord {
  std::string pub_id;
  int year = 0;
  std::string field;
  std::int64_t citations = 0;
  std::vector<AuthorEntry> authors;

  bool operator==(const PublicationRecord&) const = default;
};

/// Bounds for plausible publication years; records outside are rejected.
struct ParseOptions {
  int min_year = 1900;
  int max_year = 2100;
};

/// Parses one JSON line. Throws ParseError, SchemaError or ValidationError,
/// each carrying `line_no`.
PublicationRecord parse_publication_line(std::string_view line, std::size_t line_no = 0,
                                         const ParseOptions& options = {});

/// Canonical single-line JSON form; parse_publication_line inverts it.
std::string serialize_publication(const PublicationRecord& record);

/// Raw -> canonical name mapping for organization and city names. Chains are
/// resolved at construction so lookups always land on a fixed point.
class AliasMap {
 public:
  AliasMap() = default;

  /// Throws ConfigError on a cyclic chain or a raw name with two targets.
  static AliasMap from_pairs(std::span<const std::pair<std::string, std::string>> pairs);

  /// Two-column CSV with header "raw,canonical".
  static AliasMap read(std::istream& in);
  static AliasMap read_file(const std::filesystem::path& path);

  /// Canonical form of `name`; `name` itself when unmapped.
  std::string_view resolve(std::string_view name) const;

  bool empty() const noexcept { return canonical_.empty(); }
  std::size_t size() const noexcept { return canonical_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> canonical_;
};

PublicationRecord apply_alias_map(PublicationRecord record, const AliasMap& aliases);

/// One of an author's publications as seen from that author.
struct AuthorPublication {
  std::string pub_id;
  int year = 0;
  std::vector<Affiliation> affiliations;  // sorted, unique

  bool operator==(const AuthorPublication&) const = default;
};

struct AuthorHistory {
  std::string author_id;
  /// Union of the author's affiliations per publication year. Years whose
  /// publications carry no affiliation are absent.
  std::map<int, std::set<Affiliation>> timeline;
  /// First and last publication year over all publications, with or
  /// without affiliation data.
  int first_year = 0;
  int last_year = 0;
  std::size_t pub_count = 0;
  /// Ordered by (year, pub_id).
  std::vector<AuthorPublication> publications;

  bool operator==(const AuthorHistory&) const = default;
};

using HistoryMap = std::map<std::string, AuthorHistory, std::less<>>;

HistoryMap build_author_histories(std::span<const PublicationRecord> records);

struct EligibilityWindow {
  int start = 2003;
  int end = 2015;
};

/// Authors with at least two publications whose first year lies in the
/// window. Throws ConfigError when start > end.
HistoryMap filter_eligible_researchers(const HistoryMap& histories, EligibilityWindow window);

struct FieldYearBaseline {
  std::string field;
  int year = 0;
  std::uint64_t total_citations = 0;
  std::uint64_t paper_count = 0;
  /// Every member paper's citation count, descending.
  std::vector<std::int64_t> citations_desc;

  double mean_citations() const noexcept {
    return paper_count == 0 ? 0.0
                            : static_cast<double>(total_citations) / static_cast<double>(paper_count);
  }

  /// Number of member papers with strictly more than `citations`.
  std::size_t count_greater(std::int64_t citations) const noexcept;
};

using BaselineKey = std::pair<std::string, int>;
using BaselineMap = std::map<BaselineKey, FieldYearBaseline>;

/// One baseline per (field, year) cell; papers with an empty field are skipped.
BaselineMap compute_field_year_baselines(std::span<const PublicationRecord> records);

struct RejectedLine {
  std::size_t line = 0;
  std::string kind;  // parse | schema | validation | duplicate
  std::string message;
  std::string record;  // the raw line
};

struct ValidationReport {
  std::size_t lines_read = 0;
  std::size_t blank_lines = 0;
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  std::size_t author_entries = 0;
  std::size_t missing_affiliation_authors = 0;
  std::size_t incomplete_affiliations = 0;
  std::vector<RejectedLine> rejects;
};

struct IngestResult {
  std::vector<PublicationRecord> records;  // sorted by pub_id
  ValidationReport report;
};

/// Parses a line-delimited corpus, applying aliases. Bad lines are recorded
/// in the report and skipped; a repeated pub_id keeps its first occurrence.
IngestResult ingest_corpus(std::istream& in, const AliasMap& aliases = {},
                           const ParseOptions& options = {});

/// metric,value table.
void write_validation_report(std::ostream& out, const ValidationReport& report);
/// kind,message,record sorted by content so the table is order-free.
void write_rejects(std::ostream& out, const ValidationReport& report);

}  // namespace mobind
