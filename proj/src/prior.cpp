#include <dagpath/prior.hpp>

#include <dagpath/error.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

namespace dagpath {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::unordered_map<std::string, int> index_of(const std::vector<std::string>& nodes) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], static_cast<int>(i));
  return index;
}

std::vector<Edge> resolve(const std::vector<NamedEdge>& edges, const std::unordered_map<std::string, int>& index,
                          const char* which) {
  std::vector<Edge> out;
  for (const auto& e : edges) {
    auto pi = index.find(e.parent);
    auto ci = index.find(e.child);
    if (pi == index.end() || ci == index.end())
      throw InputError(std::string(which) + " names unknown node '" + (pi == index.end() ? e.parent : e.child) + "'");
    out.push_back({pi->second, ci->second});
  }
  return out;
}

}  // namespace

PriorKnowledge validate_prior(const std::vector<NamedEdge>& whitelist, const std::vector<NamedEdge>& blacklist,
                              const std::vector<std::string>& nodes) {
  const auto index = index_of(nodes);
  return validate_prior(PriorKnowledge{resolve(whitelist, index, "whitelist"), resolve(blacklist, index, "blacklist")},
                        nodes);
}

PriorKnowledge validate_prior(const PriorKnowledge& prior, const std::vector<std::string>& nodes) {
  const int p = static_cast<int>(nodes.size());
  PriorKnowledge out = prior;
  for (auto* list : {&out.whitelist, &out.blacklist}) {
    const char* which = list == &out.whitelist ? "whitelist" : "blacklist";
    for (const Edge& e : *list) {
      if (e.parent < 0 || e.parent >= p || e.child < 0 || e.child >= p)
        throw InputError(std::string(which) + " refers to a node index outside the graph");
      if (e.parent == e.child) throw InputError(std::string(which) + " contains a self-loop on '" + nodes[e.parent] + "'");
    }
    std::sort(list->begin(), list->end());
    list->erase(std::unique(list->begin(), list->end()), list->end());
  }
  for (const Edge& e : out.whitelist) {
    if (std::binary_search(out.blacklist.begin(), out.blacklist.end(), e))
      throw InputError("edge " + nodes[e.parent] + " -> " + nodes[e.child] +
                       " appears in both the whitelist and the blacklist");
  }
  Dag check(nodes);
  for (const Edge& e : out.whitelist) {
    if (check.add_edge_checked(e.parent, e.child) == EdgeOutcome::would_cycle)
      throw InputError("whitelist is cyclic: edge " + nodes[e.parent] + " -> " + nodes[e.child] + " closes a cycle");
  }
  return out;
}

std::vector<NamedEdge> specify_prior(const std::vector<std::string>& roots, const std::vector<std::string>& leaves,
                                     const std::vector<std::string>& nodes) {
  const std::set<std::string> known(nodes.begin(), nodes.end());
  for (const auto* list : {&roots, &leaves}) {
    for (const auto& v : *list) {
      if (!known.count(v)) throw InputError("unknown node '" + v + "' in root/leaf specification");
    }
  }
  if (nodes.size() > 1) {
    for (const auto& r : roots) {
      if (std::find(leaves.begin(), leaves.end(), r) != leaves.end())
        throw InputError("node '" + r + "' cannot be both a root and a leaf");
    }
  }
  std::set<NamedEdge> out;
  for (const auto& r : roots) {
    for (const auto& v : nodes) {
      if (v != r) out.insert({v, r});
    }
  }
  for (const auto& l : leaves) {
    for (const auto& v : nodes) {
      if (v != l) out.insert({l, v});
    }
  }
  return {out.begin(), out.end()};
}

std::vector<NamedEdge> read_edge_pairs_csv(std::istream& in, const std::vector<std::string>& nodes) {
  const std::set<std::string> known(nodes.begin(), nodes.end());
  std::vector<NamedEdge> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw InputError("edge file line " + std::to_string(lineno) + ": expected 'parent,child'");
    NamedEdge e{trim(line.substr(0, comma)), trim(line.substr(comma + 1))};
    const bool first_row = out.empty() && lineno == 1;
    if (first_row) {
      const bool header = known.empty() ? (e.parent == "parent" && e.child == "child")
                                        : (!known.count(e.parent) && !known.count(e.child));
      if (header) continue;
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_edge_pairs_csv(std::ostream& out, const std::vector<NamedEdge>& edges) {
  out << "parent,child\n";
  for (const auto& e : edges) out << e.parent << ',' << e.child << '\n';
}

PriorMask::PriorMask(const PriorKnowledge& prior, std::size_t p) : p_(p), cells_(p * p, kFree) {
  for (const Edge& e : prior.blacklist) cells_[static_cast<std::size_t>(e.parent) * p + e.child] = kForbidden;
  for (const Edge& e : prior.whitelist) {
    cells_[static_cast<std::size_t>(e.parent) * p + e.child] = kRequired;
    cells_[static_cast<std::size_t>(e.child) * p + e.parent] = kForbidden;
  }
}

}  // namespace dagpath
