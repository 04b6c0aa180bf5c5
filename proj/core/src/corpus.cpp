#include "mobind/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>
#include <variant>

#include "json.hpp"
#include "mobind/csv.hpp"
#include "mobind/error.hpp"
#include "mobind/parallel.hpp"

namespace mobind {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return std::string(s.substr(first, last - first + 1));
}

std::string upper_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

// ';' joins entity keys in exports and '|' separates key components.
void check_reserved(const std::string& name, std::string_view what, std::size_t line_no) {
  if (name.find_first_of(";|") != std::string::npos) {
    throw ValidationError(std::string(what) + " \"" + name + "\" contains a reserved character (';' or '|')",
                          line_no);
  }
}

const json& require(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw SchemaError(std::string("missing required field \"") + key + "\"", line_no);
  }
  return *it;
}

std::string describe(const json& value) {
  std::string text = value.dump();
  if (text.size() > 40) text = text.substr(0, 37) + "...";
  return text;
}

std::string string_field(const json& value, const char* name, std::size_t line_no) {
  if (!value.is_string()) {
    throw ParseError(std::string(name) + ": expected string, got " + describe(value), line_no);
  }
  return value.get<std::string>();
}

std::int64_t integer_field(const json& value, const char* name, std::size_t line_no) {
  if (!value.is_number_integer()) {
    throw ParseError(std::string(name) + ": expected integer, got " + describe(value), line_no);
  }
  return value.get<std::int64_t>();
}

std::string optional_name(const json& obj, const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  return trim(string_field(*it, key, line_no));
}

Affiliation parse_affiliation(const json& value, std::size_t line_no) {
  if (!value.is_object()) {
    throw ParseError("affiliations: expected object, got " + describe(value), line_no);
  }
  Affiliation aff;
  aff.organization = optional_name(value, "org", line_no);
  aff.city = optional_name(value, "city", line_no);
  aff.country = upper_ascii(optional_name(value, "country", line_no));
  if (aff.country.empty()) throw ValidationError("affiliation without country", line_no);
  check_reserved(aff.organization, "org", line_no);
  check_reserved(aff.city, "city", line_no);
  check_reserved(aff.country, "country", line_no);
  return aff;
}

void normalize_affiliations(std::vector<Affiliation>& affs) {
  std::sort(affs.begin(), affs.end());
  affs.erase(std::unique(affs.begin(), affs.end()), affs.end());
}

}  // namespace

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::kCountry: return "country";
    case Level::kCity: return "city";
    case Level::kOrganization: return "org";
  }
  return "country";
}

Level parse_level(std::string_view text) {
  if (text == "country") return Level::kCountry;
  if (text == "city") return Level::kCity;
  if (text == "org" || text == "organization") return Level::kOrganization;
  throw ConfigError("unknown aggregation level \"" + std::string(text) +
                    "\" (expected country, city or org)");
}

std::string entity_key(const Affiliation& affiliation, Level level) {
  switch (level) {
    case Level::kCountry:
      return affiliation.country;
    case Level::kCity:
      if (affiliation.city.empty()) return {};
      return affiliation.country + kKeySeparator + affiliation.city;
    case Level::kOrganization:
      if (affiliation.organization.empty()) return {};
      return affiliation.country + kKeySeparator + affiliation.organization;
  }
  return {};
}

std::string_view country_of_key(std::string_view key) noexcept {
  return key.substr(0, key.find(kKeySeparator));
}

PublicationRecord parse_publication_line(std::string_view line, std::size_t line_no,
                                         const ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!doc.is_object()) throw ParseError("record must be a JSON object", line_no);

  PublicationRecord record;
  record.pub_id = trim(string_field(require(doc, "pub_id", line_no), "pub_id", line_no));
  if (record.pub_id.empty()) throw SchemaError("pub_id is empty", line_no);

  const std::int64_t year = integer_field(require(doc, "year", line_no), "year", line_no);
  if (year < options.min_year || year > options.max_year) {
    throw ValidationError("year " + std::to_string(year) + " outside [" +
                              std::to_string(options.min_year) + ", " +
                              std::to_string(options.max_year) + "]",
                          line_no);
  }
  record.year = static_cast<int>(year);

  record.field = trim(string_field(require(doc, "field", line_no), "field", line_no));

  record.citations = integer_field(require(doc, "citations", line_no), "citations", line_no);
  if (record.citations < 0) {
    throw ValidationError("citations must be non-negative, got " + std::to_string(record.citations),
                          line_no);
  }

  const json& authors = require(doc, "authors", line_no);
  if (!authors.is_array()) throw ParseError("authors: expected array, got " + describe(authors), line_no);
  if (authors.empty()) throw SchemaError("authors is empty", line_no);

  for (const json& entry : authors) {
    if (!entry.is_object()) throw ParseError("authors: expected object, got " + describe(entry), line_no);
    std::string id = trim(string_field(require(entry, "author_id", line_no), "author_id", line_no));
    if (id.empty()) throw SchemaError("author_id is empty", line_no);

    std::vector<Affiliation> affs;
    if (auto it = entry.find("affiliations"); it != entry.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError("affiliations: expected array, got " + describe(*it), line_no);
      for (const json& a : *it) affs.push_back(parse_affiliation(a, line_no));
    }

    // The same author listed twice on one paper is one author entry.
    auto existing = std::find_if(record.authors.begin(), record.authors.end(),
                                 [&](const AuthorEntry& e) { return e.author_id == id; });
    if (existing == record.authors.end()) {
      record.authors.push_back({std::move(id), std::move(affs)});
    } else {
      existing->affiliations.insert(existing->affiliations.end(), affs.begin(), affs.end());
    }
  }
  for (auto& entry : record.authors) normalize_affiliations(entry.affiliations);
  return record;
}

std::string serialize_publication(const PublicationRecord& record) {
  ordered_json doc;
  doc["pub_id"] = record.pub_id;
  doc["year"] = record.year;
  doc["field"] = record.field;
  doc["citations"] = record.citations;
  ordered_json authors = ordered_json::array();
  for (const auto& entry : record.authors) {
    ordered_json affs = ordered_json::array();
    for (const auto& a : entry.affiliations) {
      affs.push_back({{"org", a.organization}, {"city", a.city}, {"country", a.country}});
    }
    authors.push_back({{"author_id", entry.author_id}, {"affiliations", std::move(affs)}});
  }
  doc["authors"] = std::move(authors);
  return doc.dump();
}

AliasMap AliasMap::from_pairs(std::span<const std::pair<std::string, std::string>> pairs) {
  std::map<std::string, std::string, std::less<>> direct;
  for (const auto& [raw_in, canonical_in] : pairs) {
    std::string raw = trim(raw_in);
    std::string canonical = trim(canonical_in);
    if (raw.empty() || canonical.empty()) throw ConfigError("alias map: empty raw or canonical name");
    if (canonical.find_first_of(";|") != std::string::npos) {
      throw ConfigError("alias map: canonical name \"" + canonical + "\" contains ';' or '|'");
    }
    if (raw == canonical) continue;
    auto [it, inserted] = direct.emplace(raw, canonical);
    if (!inserted && it->second != canonical) {
      throw ConfigError("alias map: \"" + raw + "\" maps to both \"" + it->second + "\" and \"" +
                        canonical + "\"");
    }
  }

  AliasMap map;
  for (const auto& [raw, target] : direct) {
    std::set<std::string_view> seen{raw};
    std::string_view current = target;
    for (auto it = direct.find(current); it != direct.end(); it = direct.find(current)) {
      if (!seen.insert(current).second) {
        throw ConfigError("alias map: cyclic alias chain through \"" + std::string(current) + "\"");
      }
      current = it->second;
    }
    if (seen.count(current)) {
      throw ConfigError("alias map: cyclic alias chain through \"" + std::string(current) + "\"");
    }
    map.canonical_.emplace(raw, std::string(current));
  }
  return map;
}

AliasMap AliasMap::read(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"raw", "canonical"}, "alias map");
  std::vector<std::pair<std::string, std::string>> pairs;
  while (auto row = reader.next()) {
    if (row->size() == 1 && trim((*row)[0]).empty()) continue;
    if (row->size() != 2) {
      throw ConfigError("alias map line " + std::to_string(reader.line()) + ": expected 2 columns");
    }
    pairs.emplace_back(std::move((*row)[0]), std::move((*row)[1]));
  }
  return from_pairs(pairs);
}

AliasMap AliasMap::read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open alias map " + path.string());
  return read(in);
}

std::string_view AliasMap::resolve(std::string_view name) const {
  auto it = canonical_.find(name);
  return it == canonical_.end() ? name : std::string_view(it->second);
}

PublicationRecord apply_alias_map(PublicationRecord record, const AliasMap& aliases) {
  if (aliases.empty()) return record;
  for (auto& entry : record.authors) {
    for (auto& aff : entry.affiliations) {
      aff.organization = std::string(aliases.resolve(aff.organization));
      aff.city = std::string(aliases.resolve(aff.city));
    }
    normalize_affiliations(entry.affiliations);
  }
  return record;
}

HistoryMap build_author_histories(std::span<const PublicationRecord> records) {
  HistoryMap histories;
  for (const auto& record : records) {
    for (const auto& entry : record.authors) {
      auto it = histories.find(entry.author_id);
      if (it == histories.end()) {
        it = histories.emplace(entry.author_id, AuthorHistory{}).first;
        it->second.author_id = entry.author_id;
      }
      it->second.publications.push_back({record.pub_id, record.year, entry.affiliations});
    }
  }

  for (auto& [id, history] : histories) {
    auto& pubs = history.publications;
    std::sort(pubs.begin(), pubs.end(), [](const AuthorPublication& a, const AuthorPublication& b) {
      return std::tie(a.year, a.pub_id) < std::tie(b.year, b.pub_id);
    });
    // Duplicate pub_ids (only possible through direct API use) are merged.
    std::vector<AuthorPublication> merged;
    for (auto& pub : pubs) {
      if (!merged.empty() && merged.back().pub_id == pub.pub_id && merged.back().year == pub.year) {
        auto& affs = merged.back().affiliations;
        affs.insert(affs.end(), pub.affiliations.begin(), pub.affiliations.end());
        normalize_affiliations(affs);
      } else {
        merged.push_back(std::move(pub));
      }
    }
    pubs = std::move(merged);

    history.pub_count = pubs.size();
    history.first_year = pubs.front().year;
    history.last_year = pubs.back().year;
    for (const auto& pub : pubs) {
      if (pub.affiliations.empty()) continue;
      history.timeline[pub.year].insert(pub.affiliations.begin(), pub.affiliations.end());
    }
  }
  return histories;
}

HistoryMap filter_eligible_researchers(const HistoryMap& histories, EligibilityWindow window) {
  if (window.start > window.end) {
    throw ConfigError("eligibility window start " + std::to_string(window.start) +
                      " is after end " + std::to_string(window.end));
  }
  HistoryMap eligible;
  for (const auto& [id, history] : histories) {
    if (history.pub_count >= 2 && history.first_year >= window.start &&
        history.first_year <= window.end) {
      eligible.emplace(id, history);
    }
  }
  return eligible;
}

std::size_t FieldYearBaseline::count_greater(std::int64_t citations) const noexcept {
  // citations_desc is descending: the prefix holding values > citations.
  auto it = std::partition_point(citations_desc.begin(), citations_desc.end(),
                                 [&](std::int64_t c) { return c > citations; });
  return static_cast<std::size_t>(it - citations_desc.begin());
}

BaselineMap compute_field_year_baselines(std::span<const PublicationRecord> records) {
  BaselineMap baselines;
  for (const auto& record : records) {
    if (record.field.empty()) continue;
    auto& cell = baselines[{record.field, record.year}];
    cell.field = record.field;
    cell.year = record.year;
    cell.total_citations += static_cast<std::uint64_t>(record.citations);
    cell.paper_count += 1;
    cell.citations_desc.push_back(record.citations);
  }
  for (auto& [key, cell] : baselines) {
    std::sort(cell.citations_desc.begin(), cell.citations_desc.end(), std::greater<>());
  }
  return baselines;
}

IngestResult ingest_corpus(std::istream& in, const AliasMap& aliases, const ParseOptions& options) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));

  using Outcome = std::variant<std::monostate, PublicationRecord, RejectedLine>;
  std::vector<Outcome> outcomes(lines.size());
  parallel_chunks(lines.size(), 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (lines[i].find_first_not_of(kWhitespace) == std::string::npos) continue;
      const std::size_t line_no = i + 1;
      // Messages carry no line prefix so the reject table is order-free.
      try {
        outcomes[i] = apply_alias_map(parse_publication_line(lines[i], 0, options), aliases);
      } catch (const SchemaError& e) {
        outcomes[i] = RejectedLine{line_no, "schema", e.what(), lines[i]};
      } catch (const ValidationError& e) {
        outcomes[i] = RejectedLine{line_no, "validation", e.what(), lines[i]};
      } catch (const ParseError& e) {
        outcomes[i] = RejectedLine{line_no, "parse", e.what(), lines[i]};
      }
    }
  });

  IngestResult result;
  auto& report = result.report;
  report.lines_read = lines.size();
  // Among records sharing a pub_id the one with the smallest serialization
  // wins, which does not depend on input order.
  std::map<std::string, std::pair<std::string, std::size_t>, std::less<>> winner;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (std::holds_alternative<std::monostate>(outcomes[i])) {
      ++report.blank_lines;
    } else if (auto* rejected = std::get_if<RejectedLine>(&outcomes[i])) {
      report.rejects.push_back(std::move(*rejected));
    } else {
      const auto& record = std::get<PublicationRecord>(outcomes[i]);
      auto text = serialize_publication(record);
      auto [it, inserted] = winner.try_emplace(record.pub_id, text, i);
      if (!inserted && text < it->second.first) it->second = {std::move(text), i};
    }
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto* slot = std::get_if<PublicationRecord>(&outcomes[i]);
    if (slot == nullptr) continue;
    auto& record = *slot;
    if (winner.at(record.pub_id).second != i) {
      report.rejects.push_back({i + 1, "duplicate", "duplicate pub_id \"" + record.pub_id + "\"", lines[i]});
      continue;
    }
    {
      for (const auto& entry : record.authors) {
        ++report.author_entries;
        if (entry.affiliations.empty()) ++report.missing_affiliation_authors;
        for (const auto& aff : entry.affiliations) {
          if (aff.incomplete()) ++report.incomplete_affiliations;
        }
      }
      result.records.push_back(std::move(record));
    }
  }
  report.parsed = result.records.size();
  report.rejected = report.rejects.size();
  std::sort(result.records.begin(), result.records.end(),
            [](const PublicationRecord& a, const PublicationRecord& b) { return a.pub_id < b.pub_id; });
  return result;
}

void write_validation_report(std::ostream& out, const ValidationReport& report) {
  csv::write_row(out, {"metric", "value"});
  auto row = [&](const char* name, std::size_t value) {
    csv::write_row(out, {name, std::to_string(value)});
  };
  row("lines_read", report.lines_read);
  row("blank_lines", report.blank_lines);
  row("parsed", report.parsed);
  row("rejected", report.rejected);
  row("author_entries", report.author_entries);
  row("missing_affiliation_authors", report.missing_affiliation_authors);
  row("incomplete_affiliations", report.incomplete_affiliations);
}

void write_rejects(std::ostream& out, const ValidationReport& report) {
  std::vector<const RejectedLine*> rows;
  for (const auto& r : report.rejects) rows.push_back(&r);
  std::sort(rows.begin(), rows.end(), [](const RejectedLine* a, const RejectedLine* b) {
    return std::tie(a->kind, a->message, a->record) < std::tie(b->kind, b->message, b->record);
  });
  csv::write_row(out, {"kind", "message", "record"});
  for (const auto* r : rows) csv::write_row(out, {r->kind, r->message, r->record});
}

}  // namespace mobind
