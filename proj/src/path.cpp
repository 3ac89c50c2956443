#include <dagpath/path.hpp>

#include <dagpath/error.hpp>

#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

namespace dagpath {

namespace {

using nlohmann::json;

json to_json(const SolutionPath& path, bool timing) {
  json doc;
  doc["kind"] = to_string(path.kind);
  doc["n"] = path.n;
  doc["p"] = path.p;
  doc["nodes"] = path.nodes;
  json estimates = json::array();
  for (const auto& est : path.estimates) {
    json e;
    e["lambda"] = est.lambda;
    e["nedge"] = est.nedge;
    e["seconds"] = timing ? std::round(est.seconds * 1000.0) / 1000.0 : 0.0;
    e["converged"] = est.converged;
    e["iterations"] = est.iterations;
    json edges = json::array();
    for (const Edge& edge : est.dag.edges()) edges.push_back({path.nodes[edge.parent], path.nodes[edge.child]});
    e["edges"] = std::move(edges);
    estimates.push_back(std::move(e));
  }
  doc["estimates"] = std::move(estimates);
  return doc;
}

}  // namespace

std::string path_to_json(const SolutionPath& path, int indent) { return to_json(path, true).dump(indent); }

std::string path_to_json_without_timing(const SolutionPath& path) { return to_json(path, false).dump(1); }

SolutionPath path_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("path file is not valid JSON: ") + e.what());
  }
  try {
    SolutionPath path;
    path.kind = parse_data_kind(doc.at("kind").get<std::string>());
    path.n = doc.at("n").get<std::size_t>();
    path.nodes = doc.at("nodes").get<std::vector<std::string>>();
    path.p = doc.at("p").get<std::size_t>();
    if (path.p != path.nodes.size()) throw InputError("path file: 'p' does not match the node list");
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < path.nodes.size(); ++i) index.emplace(path.nodes[i], static_cast<int>(i));
    for (const auto& e : doc.at("estimates")) {
      PathEstimate est;
      est.dag = Dag(path.nodes);
      est.lambda = e.at("lambda").get<double>();
      est.seconds = e.value("seconds", 0.0);
      est.converged = e.value("converged", true);
      est.iterations = e.value("iterations", std::size_t{0});
      est.pp = path.p;
      est.nn = path.n;
      for (const auto& pair : e.at("edges")) {
        const auto parent = pair.at(0).get<std::string>();
        const auto child = pair.at(1).get<std::string>();
        auto pi = index.find(parent);
        auto ci = index.find(child);
        if (pi == index.end() || ci == index.end())
          throw InputError("path file: edge refers to unknown node '" + (pi == index.end() ? parent : child) + "'");
        if (est.dag.add_edge_checked(pi->second, ci->second) == EdgeOutcome::would_cycle)
          throw InputError("path file: estimate contains a cycle");
      }
      est.nedge = est.dag.num_edges();
      if (e.contains("nedge") && e.at("nedge").get<std::size_t>() != est.nedge)
        throw InputError("path file: 'nedge' does not match the edge list");
      path.estimates.push_back(std::move(est));
    }
    return path;
  } catch (const json::exception& e) {
    throw InputError(std::string("path file has an unexpected layout: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("path file: ") + e.what());
  }
}

void write_path_json(std::ostream& out, const SolutionPath& path) { out << path_to_json(path) << '\n'; }

SolutionPath read_path_json(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return path_from_json(text);
}

}  // namespace dagpath
