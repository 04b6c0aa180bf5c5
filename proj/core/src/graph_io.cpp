#include "mobind/graph_io.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <map>
#include <string>
#include <vector>

#include "mobind/csv.hpp"
#include "mobind/error.hpp"

namespace mobind {

namespace pt = boost::property_tree;

namespace {

std::uint64_t parse_weight(const std::string& text, std::size_t line, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
    throw ParseError(std::string(what) + ": weight must be a positive integer, got \"" + text + "\"", line);
  }
  return value;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::map<std::string_view, std::size_t> node_numbers(const CoAffiliationGraph& graph) {
  std::map<std::string_view, std::size_t> numbers;
  for (const auto& [key, weight] : graph.nodes) numbers.emplace(key, numbers.size());
  return numbers;
}

}  // namespace

void write_edge_list(std::ostream& out, const CoAffiliationGraph& graph, std::uint64_t min_weight) {
  csv::write_row(out, {"source", "target", "weight"});
  for (const auto& [pair, weight] : graph.edges) {
    if (weight < min_weight) continue;
    csv::write_row(out, {pair.first, pair.second, std::to_string(weight)});
  }
}

void write_node_list(std::ostream& out, const CoAffiliationGraph& graph) {
  csv::write_row(out, {"id", "weight"});
  for (const auto& [key, weight] : graph.nodes) csv::write_row(out, {key, std::to_string(weight)});
}

CoAffiliationGraph read_node_edge_lists(std::istream& nodes, std::istream& edges, Level level) {
  CoAffiliationGraph graph;
  graph.level = level;
  graph.researchers.reset();

  csv::Reader node_reader(nodes);
  csv::expect_header(node_reader, {"id", "weight"}, "node list");
  while (auto row = node_reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 2 || (*row)[0].empty()) throw ParseError("node list: expected id,weight", node_reader.line());
    if (!graph.nodes.emplace((*row)[0], parse_weight((*row)[1], node_reader.line(), "node list")).second) {
      throw ParseError("node list: duplicate node \"" + (*row)[0] + "\"", node_reader.line());
    }
  }

  csv::Reader edge_reader(edges);
  csv::expect_header(edge_reader, {"source", "target", "weight"}, "edge list");
  while (auto row = edge_reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != 3) throw ParseError("edge list: expected source,target,weight", edge_reader.line());
    const auto& r = *row;
    if (!graph.nodes.contains(r[0]) || !graph.nodes.contains(r[1])) {
      throw ParseError("edge list: endpoint not in node list", edge_reader.line());
    }
    if (r[0] == r[1]) throw ParseError("edge list: self-loop on \"" + r[0] + "\"", edge_reader.line());
    graph.add_edge(r[0], r[1], parse_weight(r[2], edge_reader.line(), "edge list"));
  }
  return graph;
}

void write_graphml(std::ostream& out, const CoAffiliationGraph& graph, std::uint64_t min_weight) {
  const auto numbers = node_numbers(graph);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"level\" for=\"graph\" attr.name=\"level\" attr.type=\"string\"/>\n"
      << "  <key id=\"researchers\" for=\"graph\" attr.name=\"researchers\" attr.type=\"long\"/>\n"
      << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      << "  <key id=\"nweight\" for=\"node\" attr.name=\"weight\" attr.type=\"long\"/>\n"
      << "  <key id=\"eweight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
      << "  <graph id=\"G\" edgedefault=\"undirected\">\n"
      << "    <data key=\"level\">" << to_string(graph.level) << "</data>\n";
  if (graph.researchers) out << "    <data key=\"researchers\">" << *graph.researchers << "</data>\n";
  for (const auto& [key, weight] : graph.nodes) {
    out << "    <node id=\"n" << numbers.at(key) << "\">"
        << "<data key=\"label\">" << xml_escape(key) << "</data>"
        << "<data key=\"nweight\">" << weight << "</data></node>\n";
  }
  for (const auto& [pair, weight] : graph.edges) {
    if (weight < min_weight) continue;
    out << "    <edge source=\"n" << numbers.at(pair.first) << "\" target=\"n" << numbers.at(pair.second)
        << "\"><data key=\"eweight\">" << weight << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

CoAffiliationGraph read_graphml(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("GraphML: ") + e.what(), e.line());
  }
  const auto root = tree.get_child_optional("graphml");
  if (!root) throw ParseError("GraphML: missing <graphml> root", 0);

  // key id -> attribute name, per domain
  std::map<std::string, std::string> node_keys, edge_keys, graph_keys;
  for (const auto& [tag, child] : *root) {
    if (tag != "key") continue;
    const auto id = child.get<std::string>("<xmlattr>.id", "");
    const auto domain = child.get<std::string>("<xmlattr>.for", "");
    // '/' separator: the attribute name itself contains a dot.
    const auto name = child.get<std::string>(pt::ptree::path_type("<xmlattr>/attr.name", '/'), id);
    if (domain == "node") node_keys[id] = name;
    if (domain == "edge") edge_keys[id] = name;
    if (domain == "graph") graph_keys[id] = name;
  }
  const auto graph_node = root->get_child_optional("graph");
  if (!graph_node) throw ParseError("GraphML: missing <graph>", 0);

  auto data_of = [](const pt::ptree& element, const std::map<std::string, std::string>& keys) {
    std::map<std::string, std::string> values;
    for (const auto& [tag, child] : element) {
      if (tag != "data") continue;
      auto it = keys.find(child.get<std::string>("<xmlattr>.key", ""));
      if (it != keys.end()) values[it->second] = child.data();
    }
    return values;
  };

  CoAffiliationGraph graph;
  graph.researchers.reset();
  const auto graph_data = data_of(*graph_node, graph_keys);
  if (auto it = graph_data.find("level"); it != graph_data.end()) {
    try {
      graph.level = parse_level(it->second);
    } catch (const ConfigError& e) {
      throw ParseError(std::string("GraphML: ") + e.what(), 0);
    }
  }
  if (auto it = graph_data.find("researchers"); it != graph_data.end()) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), value);
    if (ec != std::errc{}) throw ParseError("GraphML: bad researchers value", 0);
    graph.researchers = value;
  }

  std::map<std::string, std::string> label_by_id;
  for (const auto& [tag, child] : *graph_node) {
    if (tag != "node") continue;
    const auto id = child.get<std::string>("<xmlattr>.id", "");
    auto data = data_of(child, node_keys);
    const std::string label = data.contains("label") ? data["label"] : id;
    if (label.empty()) throw ParseError("GraphML: node without id", 0);
    const auto weight = parse_weight(data.contains("weight") ? data["weight"] : "1", 0, "GraphML node");
    label_by_id[id] = label;
    if (!graph.nodes.emplace(label, weight).second) {
      throw ParseError("GraphML: duplicate node \"" + label + "\"", 0);
    }
  }
  for (const auto& [tag, child] : *graph_node) {
    if (tag != "edge") continue;
    auto source = label_by_id.find(child.get<std::string>("<xmlattr>.source", ""));
    auto target = label_by_id.find(child.get<std::string>("<xmlattr>.target", ""));
    if (source == label_by_id.end() || target == label_by_id.end()) {
      throw ParseError("GraphML: edge endpoint is not a declared node", 0);
    }
    auto data = data_of(child, edge_keys);
    graph.add_edge(source->second, target->second,
                   parse_weight(data.contains("weight") ? data["weight"] : "1", 0, "GraphML edge"));
  }
  return graph;
}

void write_pajek(std::ostream& out, const CoAffiliationGraph& graph, std::uint64_t min_weight) {
  const auto numbers = node_numbers(graph);
  out << "*Vertices " << graph.nodes.size() << "\n";
  for (const auto& [key, weight] : graph.nodes) {
    std::string label = key;
    for (char& c : label) {
      if (c == '"') c = '\'';
    }
    out << numbers.at(key) + 1 << " \"" << label << "\"\n";
  }
  out << "*Edges\n";
  for (const auto& [pair, weight] : graph.edges) {
    if (weight < min_weight) continue;
    out << numbers.at(pair.first) + 1 << " " << numbers.at(pair.second) + 1 << " " << weight << "\n";
  }
}

}  // namespace mobind
