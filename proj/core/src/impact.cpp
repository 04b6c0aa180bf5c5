#include "mobind/impact.hpp"

#include <string>
#include <unordered_map>

#include "mobind/csv.hpp"
#include "mobind/error.hpp"
#include "mobind/format.hpp"

namespace mobind {

namespace {

struct Accumulator {
  std::uint64_t papers = 0;
  std::uint64_t citations = 0;
  std::uint64_t top10 = 0;
  double ncs_sum = 0.0;

  void add(std::int64_t cites, const FieldYearBaseline& baseline) {
    ++papers;
    citations += static_cast<std::uint64_t>(cites);
    ncs_sum += normalized_citation_score(cites, baseline);
    top10 += is_top10(cites, baseline);
  }

  CitationIndicators finish() const {
    CitationIndicators out;
    out.paper_count = papers;
    out.total_citations = citations;
    if (papers > 0) {
      const auto n = static_cast<double>(papers);
      out.mean_citations = static_cast<double>(citations) / n;
      out.mncs = ncs_sum / n;
      out.pp_top10 = static_cast<double>(top10) / n;
    }
    return out;
  }
};

void write_row(std::ostream& out, std::string label, const CitationIndicators& c) {
  csv::write_row(out, {std::move(label), std::to_string(c.paper_count), std::to_string(c.total_citations),
                       format_fixed(c.mean_citations, 4), format_fixed(c.mncs, 4), format_fixed(c.pp_top10, 4)});
}

}  // namespace

double normalized_citation_score(std::int64_t citations, const FieldYearBaseline& baseline) {
  if (baseline.paper_count == 0) throw ContractViolation("normalized_citation_score: empty baseline cell");
  if (baseline.total_citations == 0) {
    if (citations == 0) return 0.0;
    throw DataError("paper with " + std::to_string(citations) + " citations in a zero-mean cell (" + baseline.field +
                    ", " + std::to_string(baseline.year) + ")");
  }
  return static_cast<double>(citations) / baseline.mean_citations();
}

double normalized_citation_score(const PublicationRecord& paper, const FieldYearBaseline& baseline) {
  if (paper.field != baseline.field || paper.year != baseline.year) {
    throw ContractViolation("normalized_citation_score: paper " + paper.pub_id + " is not in cell (" +
                            baseline.field + ", " + std::to_string(baseline.year) + ")");
  }
  return normalized_citation_score(paper.citations, baseline);
}

double mncs(std::span<const double> scores) {
  if (scores.empty()) throw DataError("empty stratum");
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

bool is_top10(std::int64_t citations, const FieldYearBaseline& baseline) {
  // greater / count < 0.10, kept in integers
  return baseline.count_greater(citations) * 10 < baseline.paper_count;
}

StratifiedIndicators indicators_by_mobility_class(std::span<const PublicationRecord> records,
                                                  const BaselineMap& baselines, const HistoryMap& eligible,
                                                  std::span<const MobilityEvent> events) {
  std::unordered_map<std::string_view, const PublicationRecord*> papers;
  papers.reserve(records.size());
  for (const auto& r : records) papers.emplace(r.pub_id, &r);

  std::map<std::pair<std::string_view, int>, MobilityLabel> labels;
  for (const auto& e : events) labels.emplace(std::pair<std::string_view, int>{e.author_id, e.year}, e.label);

  auto baseline_of = [&](const PublicationRecord& r) -> const FieldYearBaseline* {
    if (r.field.empty()) return nullptr;
    auto it = baselines.find({r.field, r.year});
    return it == baselines.end() ? nullptr : &it->second;
  };

  StratifiedIndicators result;
  std::map<MobilityLabel, Accumulator> strata;
  for (const auto& [id, history] : eligible) {
    for (const auto& pub : history.publications) {
      auto label = labels.find({std::string_view(id), pub.year});
      if (label == labels.end()) {
        ++result.unclassified_pairs;
        continue;
      }
      auto paper = papers.find(pub.pub_id);
      if (paper == papers.end()) throw DataError("publication " + pub.pub_id + " missing from the corpus");
      const auto* baseline = baseline_of(*paper->second);
      if (baseline == nullptr) {
        ++result.unbaselined_pairs;
        continue;
      }
      strata[label->second].add(paper->second->citations, *baseline);
    }
  }
  for (const auto& [label, acc] : strata) result.strata.emplace(label, acc.finish());

  Accumulator corpus;
  for (const auto& r : records) {
    if (const auto* baseline = baseline_of(r)) corpus.add(r.citations, *baseline);
  }
  result.corpus = corpus.finish();
  return result;
}

void write_indicators_csv(std::ostream& out, const StratifiedIndicators& indicators) {
  csv::write_row(out, {"label", "paper_count", "total_citations", "mean_citations", "mncs", "pp_top10"});
  for (const auto& [label, c] : indicators.strata) write_row(out, std::string(to_string(label)), c);
  write_row(out, "CORPUS", indicators.corpus);
}

}  // namespace mobind
