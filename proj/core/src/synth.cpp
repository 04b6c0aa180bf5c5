#include "mobind/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <set>

#include "mobind/csv.hpp"
#include "mobind/error.hpp"
#include "mobind/format.hpp"
#include "mobind/parallel.hpp"
#include "mobind/rng.hpp"

namespace mobind {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string author_id(std::size_t index) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "A%07zu", index + 1);
  return buffer;
}

std::string pub_id(std::size_t author, std::size_t seq) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "P%07zu-%03zu", author + 1, seq + 1);
  return buffer;
}

// Immutable lookup tables derived from a validated config.
class World {
 public:
  explicit World(const ScenarioConfig& config) : config_(config) {
    for (std::size_t i = 0; i < config.countries.size(); ++i) {
      weights_.push_back(config.countries[i].weight);
      index_[config.countries[i].name] = i;
    }
    double total = 0.0;
    for (double w : weights_) total += w;
    cumulative_.push_back(0.0);
    for (double w : weights_) cumulative_.push_back(cumulative_.back() + w / total);
    cumulative_.back() = 1.0;

    for (const auto& block : config.blocks) {
      std::vector<std::size_t> members;
      for (const auto& name : block) members.push_back(index_.at(name));
      blocks_.push_back(std::move(members));
    }
    if (!config.bridge.empty()) bridge_ = index_.at(config.bridge);
  }

  std::size_t size() const { return weights_.size(); }
  const std::string& name(std::size_t i) const { return config_.countries[i].name; }
  std::span<const double> weights() const { return weights_; }

  // Country whose slice of the unit circle contains u.
  std::size_t on_circle(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto index = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(index == 0 ? 0 : index - 1, size() - 1);
  }

  // Countries a researcher from `origin` may be affiliated with.
  std::vector<std::size_t> allowed(std::size_t origin, Rng& rng) const {
    if (blocks_.empty()) {
      std::vector<std::size_t> all(size());
      for (std::size_t i = 0; i < size(); ++i) all[i] = i;
      return all;
    }
    std::size_t block = blocks_.size();
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (std::find(blocks_[b].begin(), blocks_[b].end(), origin) != blocks_[b].end()) block = b;
    }
    if (block == blocks_.size()) block = rng.below(blocks_.size());  // origin is the bridge
    auto members = blocks_[block];
    if (bridge_) members.push_back(*bridge_);
    return members;
  }

  // Weighted draw from `candidates` excluding `exclude`.
  std::size_t draw_other(const std::vector<std::size_t>& candidates, std::size_t exclude, Rng& rng) const {
    std::vector<std::size_t> pool;
    std::vector<double> w;
    for (auto c : candidates) {
      if (c == exclude) continue;
      pool.push_back(c);
      w.push_back(weights_[c]);
    }
    return pool[rng.weighted(w)];
  }

 private:
  const ScenarioConfig& config_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::optional<std::size_t> bridge_;
};

struct PlannedYear {
  int year = 0;
  EntitySet current;
  EntitySet prior;
  EntitySet added;
  MobilityLabel label = MobilityLabel::kNonMobile;
  bool is_return = false;
};

std::vector<int> draw_active_years(const ScenarioConfig& config, Rng& rng) {
  const int span = config.last_year - config.first_year;  // >= 1
  const int start = config.first_year + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
  std::vector<int> years{start};
  for (int y = start + 1; y <= config.last_year; ++y) {
    if (rng.bernoulli(config.year_activity)) years.push_back(y);
  }
  if (years.size() < 2) {
    const int remaining = config.last_year - start;
    years.push_back(start + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(remaining))));
  }
  return years;
}

// Plants one career and returns its per-year sets and labels.
std::vector<PlannedYear> plan_career(const ScenarioConfig& config, const World& world, Rng& rng) {
  std::size_t origin = 0;
  std::optional<std::size_t> shifted;
  if (config.destinations == DestinationModel::kCapacityShift) {
    const double u = rng.uniform();
    origin = world.on_circle(u);
    shifted = world.on_circle(std::fmod(u + 0.5, 1.0));
  } else {
    origin = rng.weighted(world.weights());
  }
  const auto allowed = world.allowed(origin, rng);
  const auto years = draw_active_years(config, rng);

  const double move_p = std::min(1.0, config.mobility_rate * config.countries[origin].send_multiplier);
  const bool mover = rng.bernoulli(move_p);
  const bool multi = rng.bernoulli(config.multi_rate);

  const EntitySet home{world.name(origin)};
  std::vector<EntitySet> sets(years.size(), home);
  std::vector<MobilityLabel> labels(years.size(), MobilityLabel::kNonMobile);
  std::vector<bool> returns(years.size(), false);

  if (mover) {
    const std::size_t dest = shifted && *shifted != origin ? *shifted : world.draw_other(allowed, origin, rng);
    const auto move = 1 + static_cast<std::size_t>(rng.below(years.size() - 1));
    if (multi) {
      for (std::size_t i = move; i < years.size(); ++i) {
        sets[i] = {world.name(origin), world.name(dest)};
        labels[i] = i == move ? MobilityLabel::kMobileAndMulti : MobilityLabel::kMultiAffiliation;
      }
    } else {
      for (std::size_t i = move; i < years.size(); ++i) sets[i] = {world.name(dest)};
      labels[move] = MobilityLabel::kMobile;
      const bool can_return = move + 1 < years.size();
      if (can_return && rng.bernoulli(config.return_rate)) {
        const auto back = move + 1 + static_cast<std::size_t>(rng.below(years.size() - move - 1));
        for (std::size_t i = back; i < years.size(); ++i) sets[i] = home;
        labels[back] = MobilityLabel::kMobile;
        returns[back] = true;
      }
    }
  } else if (multi) {
    const std::size_t partner = world.draw_other(allowed, origin, rng);
    for (auto& s : sets) s = {world.name(origin), world.name(partner)};
    labels.assign(years.size(), MobilityLabel::kMultiAffiliation);
  }

  std::vector<PlannedYear> plan(years.size());
  for (std::size_t i = 0; i < years.size(); ++i) {
    auto& p = plan[i];
    p.year = years[i];
    p.current = sets[i];
    p.label = labels[i];
    p.is_return = returns[i];
    if (i > 0) {
      p.prior = sets[i - 1];
      // The planted addition: what this year brings in over the previous one.
      if (is_mobile(p.label)) {
        for (const auto& c : p.current) {
          if (!p.prior.contains(c)) p.added.insert(c);
        }
      }
    }
  }
  return plan;
}

struct Site {
  std::string organization;
  std::string city;
};

Site site_for(const std::string& country, Rng& rng) {
  const auto org = 1 + rng.below(4);
  const auto city = 1 + (org - 1) / 2;  // two organizations per city
  return {country + " UNIVERSITY " + std::to_string(org), country + " CITY " + std::to_string(city)};
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_authors < 1) throw ConfigError("scenario: n_authors must be at least 1");
  if (last_year <= first_year) throw ConfigError("scenario: year range needs at least two years");
  for (double p : {mobility_rate, multi_rate, return_rate, year_activity}) {
    if (!is_probability(p)) throw ConfigError("scenario: probabilities must lie in [0, 1]");
  }
  if (countries.empty()) throw ConfigError("scenario: no countries");
  if (max_papers_per_year < 1) throw ConfigError("scenario: max_papers_per_year must be at least 1");
  std::set<std::string> names;
  double total = 0.0;
  for (const auto& c : countries) {
    if (c.name.empty() || c.name.find_first_of(";|") != std::string::npos) {
      throw ConfigError("scenario: bad country name \"" + c.name + "\"");
    }
    if (!(c.weight > 0.0)) throw ConfigError("scenario: country weights must be positive");
    if (c.send_multiplier < 0.0) throw ConfigError("scenario: send multipliers must be non-negative");
    if (!names.insert(c.name).second) throw ConfigError("scenario: duplicate country " + c.name);
    total += c.weight;
  }
  if ((mobility_rate > 0.0 || multi_rate > 0.0) && countries.size() < 2) {
    throw ConfigError("scenario: mobility or multiple affiliation needs at least two countries");
  }
  if (!blocks.empty()) {
    std::set<std::string> seen;
    for (const auto& block : blocks) {
      if (block.empty()) throw ConfigError("scenario: empty block");
      for (const auto& name : block) {
        if (!names.contains(name)) throw ConfigError("scenario: block lists unknown country " + name);
        if (name == bridge) throw ConfigError("scenario: the bridge may not belong to a block");
        if (!seen.insert(name).second) throw ConfigError("scenario: country " + name + " in two blocks");
      }
      if (block.size() + (bridge.empty() ? 0 : 1) < 2 && (mobility_rate > 0.0 || multi_rate > 0.0)) {
        throw ConfigError("scenario: a block needs two reachable countries for mobility");
      }
    }
    for (const auto& name : names) {
      if (!seen.contains(name) && name != bridge) throw ConfigError("scenario: country " + name + " is in no block");
    }
  }
  if (!bridge.empty() && !names.contains(bridge)) throw ConfigError("scenario: unknown bridge " + bridge);
  if (!bridge.empty() && blocks.empty()) throw ConfigError("scenario: a bridge needs blocks");
  if (destinations == DestinationModel::kCapacityShift) {
    if (!blocks.empty()) throw ConfigError("scenario: capacity-shift destinations do not support blocks");
    for (const auto& c : countries) {
      if (c.weight / total > 0.5) {
        throw ConfigError("scenario: capacity-shift destinations need every weight share <= 1/2");
      }
    }
  }
  if (citations.fields.empty()) throw ConfigError("scenario: no fields");
  if (citations.base_mean < 0.0 || citations.mobile_multiplier < 0.0) {
    throw ConfigError("scenario: citation parameters must be non-negative");
  }
}

ScenarioConfig scenario_preset(std::string_view name) {
  ScenarioConfig config;
  if (name == "world") {
    config.countries = {{"US", 6.0}, {"CN", 4.0}, {"GB", 2.0}, {"DE", 2.0}, {"FR", 1.5}, {"ES", 1.2},
                        {"NL", 0.8}, {"IT", 1.2}, {"PL", 0.8}, {"RO", 0.5}, {"ZA", 0.4}, {"BR", 1.0}};
    return config;
  }
  if (name == "null") {
    config.n_authors = 10000;
    config.countries = {{"US", 2.5}, {"DE", 2.0}, {"GB", 1.5}, {"FR", 1.5}, {"ES", 1.5}, {"NL", 1.0}};
    config.destinations = DestinationModel::kCapacityShift;
    config.mobility_rate = 1.0;
    config.multi_rate = 0.0;
    config.return_rate = 0.0;
    return config;
  }
  if (name == "two-block") {
    config.n_authors = 2000;
    config.countries = {{"FR"}, {"DE"}, {"IT"}, {"ES"}, {"GB"}, {"ZA"}, {"NG"}, {"KE"}, {"GH"}};
    config.blocks = {{"FR", "DE", "IT", "ES"}, {"ZA", "NG", "KE", "GH"}};
    config.bridge = "GB";
    config.mobility_rate = 0.4;
    return config;
  }
  if (name == "over-sending") {
    config.n_authors = 5000;
    config.countries = {{"FR"}, {"DE"}, {"NL"}, {"ES"}, {"IT"}, {"PL", 1.0, 3.0}, {"RO", 1.0, 3.0}, {"HU", 1.0, 3.0}};
    config.mobility_rate = 0.2;
    config.return_rate = 0.0;
    return config;
  }
  throw ConfigError("unknown scenario preset \"" + std::string(name) +
                    "\" (expected world, null, two-block or over-sending)");
}

SyntheticCorpus generate_corpus(const ScenarioConfig& config) {
  config.validate();
  const World world(config);
  SyntheticCorpus out;

  // Each author draws from its own stream, so chunks can run in parallel and
  // be concatenated in author order.
  struct Career {
    std::vector<PublicationRecord> records;
    std::vector<MobilityEvent> events;
  };
  std::vector<Career> careers(config.n_authors);
  parallel_chunks(config.n_authors, 256, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      auto& career = careers[a];
      Rng rng(derive_seed(config.seed, a));
      const auto plan = plan_career(config, world, rng);
      const auto id = author_id(a);
      const auto& field = config.citations.fields[rng.below(config.citations.fields.size())];

      std::map<std::string, Site> sites;
      std::size_t seq = 0;
      for (const auto& year : plan) {
        std::vector<Affiliation> affs;
        for (const auto& country : year.current) {
          auto it = sites.find(country);
          if (it == sites.end()) it = sites.emplace(country, site_for(country, rng)).first;
          affs.push_back({it->second.organization, it->second.city, country});
        }
        std::sort(affs.begin(), affs.end());
        const double mean = config.citations.base_mean *
                            (year.label == MobilityLabel::kNonMobile ? 1.0 : config.citations.mobile_multiplier);
        const auto papers = 1 + rng.below(static_cast<std::uint64_t>(config.max_papers_per_year));
        for (std::uint64_t p = 0; p < papers; ++p) {
          PublicationRecord record;
          record.pub_id = pub_id(a, seq++);
          record.year = year.year;
          record.field = field;
          record.citations = static_cast<std::int64_t>(rng.geometric(mean));
          record.authors.push_back({id, affs});
          career.records.push_back(std::move(record));
        }

        MobilityEvent event;
        event.author_id = id;
        event.year = year.year;
        event.label = year.label;
        event.prior_entities = year.prior;
        event.current_entities = year.current;
        event.new_entities = year.added;
        event.is_return = year.is_return;
        career.events.push_back(std::move(event));
      }
    }
  });

  for (auto& career : careers) {
    for (auto& event : career.events) {
      if (is_mobile(event.label)) {
        for (const auto& edge : flow_edges_from_event(event)) out.truth.flows[{edge.from, edge.to}] += edge.weight;
      }
      out.truth.events.push_back(std::move(event));
    }
    std::move(career.records.begin(), career.records.end(), std::back_inserter(out.records));
  }
  out.truth.eligible_authors = config.n_authors;

  // Authors that the eligibility rule must drop.
  for (std::size_t k = 0; k < config.ineligible_authors; ++k) {
    const std::size_t a = config.n_authors + k;
    Rng rng(derive_seed(config.seed, a));
    const auto country = world.name(rng.weighted(world.weights()));
    const auto site = site_for(country, rng);
    const Affiliation aff{site.organization, site.city, country};
    const auto& field = config.citations.fields[rng.below(config.citations.fields.size())];
    std::vector<int> years;
    if (k % 2 == 0) {
      years = {config.first_year + static_cast<int>(rng.below(
                                       static_cast<std::uint64_t>(config.last_year - config.first_year + 1)))};
    } else {
      years = {config.first_year - 1, config.first_year + 1};
    }
    for (std::size_t p = 0; p < years.size(); ++p) {
      PublicationRecord record;
      record.pub_id = pub_id(a, p);
      record.year = years[p];
      record.field = field;
      record.citations = static_cast<std::int64_t>(rng.geometric(config.citations.base_mean));
      record.authors.push_back({author_id(a), {aff}});
      out.records.push_back(std::move(record));
    }
  }

  std::sort(out.records.begin(), out.records.end(),
            [](const PublicationRecord& x, const PublicationRecord& y) { return x.pub_id < y.pub_id; });
  return out;
}

VerificationReport verify_against_truth(std::span<const MobilityEvent> events, const GroundTruth& truth,
                                        const FlowMatrix* flows) {
  VerificationReport report;
  auto where = [](const MobilityEvent& e) { return e.author_id + "/" + std::to_string(e.year); };

  std::map<std::pair<std::string_view, int>, const MobilityEvent*> expected;
  for (const auto& e : truth.events) expected.emplace(std::pair<std::string_view, int>{e.author_id, e.year}, &e);

  std::set<std::pair<std::string_view, int>> matched;
  for (const auto& e : events) {
    const std::pair<std::string_view, int> key{e.author_id, e.year};
    auto it = expected.find(key);
    if (it == expected.end()) {
      report.mismatches.push_back("unexpected event " + where(e));
      continue;
    }
    matched.insert(key);
    ++report.events_compared;
    const auto& t = *it->second;
    if (t.label != e.label) {
      report.mismatches.push_back("label " + where(e) + ": expected " + std::string(to_string(t.label)) + ", got " +
                                  std::string(to_string(e.label)));
    }
    if (t.is_return != e.is_return) {
      report.mismatches.push_back("return flag " + where(e) + ": expected " + (t.is_return ? "true" : "false"));
    }
  }
  for (const auto& e : truth.events) {
    if (!matched.contains({e.author_id, e.year})) report.mismatches.push_back("missing event " + where(e));
  }

  if (flows != nullptr) {
    for (const auto& [pair, weight] : truth.flows) {
      ++report.flow_cells_compared;
      const double got = flows->at(pair.first, pair.second);
      if (std::abs(got - weight) > 1e-9) {
        report.mismatches.push_back("flow " + pair.first + "->" + pair.second + ": expected " +
                                    format_fixed(weight, 6) + ", got " + format_fixed(got, 6));
      }
    }
    for (std::size_t i = 0; i < flows->size(); ++i) {
      for (std::size_t j = 0; j < flows->size(); ++j) {
        const double got = flows->at(i, j);
        if (got > 1e-9 && !truth.flows.contains({flows->entities[i], flows->entities[j]})) {
          report.mismatches.push_back("flow " + flows->entities[i] + "->" + flows->entities[j] +
                                      ": not planted, got " + format_fixed(got, 6));
        }
      }
    }
  }
  return report;
}

void write_corpus(std::ostream& out, std::span<const PublicationRecord> records) {
  for (const auto& r : records) out << serialize_publication(r) << '\n';
}

void write_truth_flows_csv(std::ostream& out, const GroundTruth& truth) {
  csv::write_row(out, {"from", "to", "weight"});
  for (const auto& [pair, weight] : truth.flows) {
    csv::write_row(out, {pair.first, pair.second, format_fixed(weight, 6)});
  }
}

}  // namespace mobind
