#include <dagpath/graph.hpp>

#include <dagpath/error.hpp>

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace dagpath {

namespace {

bool sorted_contains(const std::vector<int>& v, int x) {
  return std::binary_search(v.begin(), v.end(), x);
}

void sorted_insert(std::vector<int>& v, int x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

bool sorted_erase(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return false;
  v.erase(it);
  return true;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Dag::Dag(std::vector<std::string> names)
    : names_(std::move(names)), parents_(names_.size()), children_(names_.size()) {
  std::unordered_map<std::string, int> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!seen.emplace(names_[i], static_cast<int>(i)).second)
      throw InputError("duplicate node name '" + names_[i] + "'");
  }
}

Dag Dag::with_size(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t i = 0; i < p; ++i) names.push_back("V" + std::to_string(i + 1));
  return Dag(std::move(names));
}

void Dag::check_index(int v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= names_.size())
    throw std::out_of_range("node index " + std::to_string(v) + " out of range for graph with " +
                            std::to_string(names_.size()) + " nodes");
}

const std::string& Dag::name(int v) const {
  check_index(v);
  return names_[v];
}

std::optional<int> Dag::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

const std::vector<int>& Dag::parents(int child) const {
  check_index(child);
  return parents_[child];
}

const std::vector<int>& Dag::children(int parent) const {
  check_index(parent);
  return children_[parent];
}

bool Dag::has_edge(int parent, int child) const {
  check_index(parent);
  check_index(child);
  return sorted_contains(parents_[child], parent);
}

bool Dag::has_path(int from, int to) const {
  check_index(from);
  check_index(to);
  if (from == to) return true;
  // Epoch-stamped scratch avoids clearing or allocating per query.
  thread_local std::vector<unsigned> mark;
  thread_local std::vector<int> stack;
  thread_local unsigned epoch = 0;
  if (mark.size() < names_.size()) mark.assign(names_.size(), 0);
  if (++epoch == 0) {
    std::fill(mark.begin(), mark.end(), 0);
    epoch = 1;
  }
  stack.clear();
  stack.push_back(from);
  mark[from] = epoch;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int c : children_[v]) {
      if (c == to) return true;
      if (mark[c] != epoch) {
        mark[c] = epoch;
        stack.push_back(c);
      }
    }
  }
  return false;
}

EdgeOutcome Dag::add_edge_checked(int parent, int child) {
  check_index(parent);
  check_index(child);
  if (parent == child)
    throw std::invalid_argument("self-loop on node '" + names_[parent] + "' is not allowed");
  if (sorted_contains(parents_[child], parent)) return EdgeOutcome::exists;
  if (has_path(child, parent)) return EdgeOutcome::would_cycle;
  insert_edge(parent, child);
  return EdgeOutcome::added;
}

void Dag::insert_edge(int parent, int child) {
  sorted_insert(parents_[child], parent);
  sorted_insert(children_[parent], child);
  ++nedge_;
}

bool Dag::remove_edge(int parent, int child) {
  check_index(parent);
  check_index(child);
  if (!sorted_erase(parents_[child], parent)) return false;
  sorted_erase(children_[parent], child);
  --nedge_;
  return true;
}

void Dag::clear_edges() {
  for (auto& v : parents_) v.clear();
  for (auto& v : children_) v.clear();
  nedge_ = 0;
}

std::vector<int> Dag::topological_sort() const {
  const std::size_t p = names_.size();
  std::vector<std::size_t> indegree(p);
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t j = 0; j < p; ++j) {
    indegree[j] = parents_[j].size();
    if (indegree[j] == 0) ready.push(static_cast<int>(j));
  }
  std::vector<int> order;
  order.reserve(p);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children_[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != p) throw std::logic_error("graph invariant violated: cycle detected");
  return order;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(nedge_);
  for (std::size_t j = 0; j < parents_.size(); ++j) {
    for (int i : parents_[j]) out.push_back({i, static_cast<int>(j)});
  }
  return out;
}

Eigen::SparseMatrix<int> adjacency_matrix(const Dag& dag) {
  const auto p = static_cast<Eigen::Index>(dag.size());
  std::vector<Eigen::Triplet<int>> triplets;
  for (const Edge& e : dag.edges()) triplets.emplace_back(e.parent, e.child, 1);
  Eigen::SparseMatrix<int> adj(p, p);
  adj.setFromTriplets(triplets.begin(), triplets.end());
  return adj;
}

Dag dag_from_adjacency(std::vector<std::string> names, const Eigen::SparseMatrix<int>& adj) {
  Dag dag(std::move(names));
  const auto p = static_cast<Eigen::Index>(dag.size());
  if (adj.rows() != p || adj.cols() != p) throw InputError("adjacency matrix has wrong dimensions");
  for (Eigen::Index col = 0; col < adj.outerSize(); ++col) {
    for (Eigen::SparseMatrix<int>::InnerIterator it(adj, col); it; ++it) {
      if (it.value() == 0) continue;
      const int parent = static_cast<int>(it.row());
      const int child = static_cast<int>(it.col());
      if (parent == child) throw InputError("adjacency matrix has a nonzero diagonal entry");
      if (dag.add_edge_checked(parent, child) == EdgeOutcome::would_cycle)
        throw InputError("adjacency matrix encodes a cycle");
    }
  }
  return dag;
}

void write_edge_list(std::ostream& out, const Dag& dag) {
  for (const Edge& e : dag.edges()) out << dag.name(e.parent) << '\t' << dag.name(e.child) << '\n';
}

Dag read_edge_list(std::istream& in, std::vector<std::string> names) {
  Dag dag(std::move(names));
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < dag.size(); ++i) index.emplace(dag.names()[i], static_cast<int>(i));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw InputError("edge list line " + std::to_string(lineno) + ": expected 'parent<TAB>child'");
    const std::string parent = line.substr(0, tab);
    const std::string child = line.substr(tab + 1);
    auto pi = index.find(parent);
    auto ci = index.find(child);
    if (pi == index.end() || ci == index.end())
      throw InputError("edge list line " + std::to_string(lineno) + ": unknown node '" +
                       (pi == index.end() ? parent : child) + "'");
    if (pi->second == ci->second)
      throw InputError("edge list line " + std::to_string(lineno) + ": self-loop");
    if (dag.add_edge_checked(pi->second, ci->second) == EdgeOutcome::would_cycle)
      throw InputError("edge list line " + std::to_string(lineno) + ": edge closes a cycle");
  }
  return dag;
}

void write_dot(std::ostream& out, const Dag& dag) {
  out << "digraph {\n";
  for (const auto& name : dag.names()) out << "  " << dot_quote(name) << ";\n";
  for (const Edge& e : dag.edges())
    out << "  " << dot_quote(dag.name(e.parent)) << " -> " << dot_quote(dag.name(e.child)) << ";\n";
  out << "}\n";
}

void write_adjacency_csv(std::ostream& out, const Dag& dag) {
  for (const auto& name : dag.names()) out << ',' << name;
  out << '\n';
  const int p = static_cast<int>(dag.size());
  for (int i = 0; i < p; ++i) {
    out << dag.name(i);
    const auto& ch = dag.children(i);
    for (int j = 0; j < p; ++j) out << ',' << (std::binary_search(ch.begin(), ch.end(), j) ? 1 : 0);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') out.emplace_back();
    else out.back() += c;
  }
  return out;
}

}  // namespace

Dag read_adjacency_csv(std::istream& in) {
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_commas(line));
  }
  if (rows.empty() || !rows[0][0].empty()) throw InputError("adjacency CSV: header must start with an empty cell");
  std::vector<std::string> names(rows[0].begin() + 1, rows[0].end());
  const std::size_t p = names.size();
  if (rows.size() != p + 1) throw InputError("adjacency CSV: expected " + std::to_string(p) + " rows");
  std::vector<Eigen::Triplet<int>> cells;
  for (std::size_t i = 0; i < p; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != p + 1 || row[0] != names[i])
      throw InputError("adjacency CSV row " + std::to_string(i + 1) + ": expected '" + names[i] + "' and " +
                       std::to_string(p) + " entries");
    for (std::size_t j = 0; j < p; ++j) {
      if (row[j + 1] == "1") cells.emplace_back(static_cast<int>(i), static_cast<int>(j), 1);
      else if (row[j + 1] != "0") throw InputError("adjacency CSV row " + std::to_string(i + 1) + ": entries must be 0 or 1");
    }
  }
  Eigen::SparseMatrix<int> adj(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  adj.setFromTriplets(cells.begin(), cells.end());
  return dag_from_adjacency(std::move(names), adj);
}

ReachabilityIndex::ReachabilityIndex(std::size_t p) : p_(p), words_((p + 63) / 64), reach_(p * words_, 0) {}

void ReachabilityIndex::rebuild(const Dag& dag) {
  if (dag.size() != p_) throw std::invalid_argument("reachability index and graph differ in size");
  std::fill(reach_.begin(), reach_.end(), 0);
  const std::vector<int> order = dag.topological_sort();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::uint64_t* row = &reach_[static_cast<std::size_t>(*it) * words_];
    for (int c : dag.children(*it)) {
      const std::uint64_t* sub = &reach_[static_cast<std::size_t>(c) * words_];
      for (std::size_t w = 0; w < words_; ++w) row[w] |= sub[w];
      row[static_cast<std::size_t>(c) / 64] |= std::uint64_t{1} << (c % 64);
    }
  }
  built_ = true;
  exact_ = true;
}

bool ReachabilityIndex::has_path(const Dag& dag, int from, int to) {
  dag.check_index(from);
  dag.check_index(to);
  if (from == to) return true;
  if (!built_) rebuild(dag);
  if (!bit(from, to)) return false;
  return exact_ || dag.has_path(from, to);
}

EdgeOutcome ReachabilityIndex::add_edge(Dag& dag, int parent, int child) {
  dag.check_index(parent);
  dag.check_index(child);
  if (parent == child)
    throw std::invalid_argument("self-loop on node '" + dag.name(parent) + "' is not allowed");
  if (dag.has_edge(parent, child)) return EdgeOutcome::exists;
  if (has_path(dag, child, parent)) return EdgeOutcome::would_cycle;
  dag.insert_edge(parent, child);
  // Everything that reached `parent` (and parent itself) now reaches child
  // and all of child's descendants.
  // Rows are only ever OR-ed into, so child's row can be read in place
  // (child is not an ancestor of parent).
  const std::uint64_t* gained = &reach_[static_cast<std::size_t>(child) * words_];
  const std::size_t child_word = static_cast<std::size_t>(child) / 64;
  const std::uint64_t child_bit = std::uint64_t{1} << (child % 64);
  for (std::size_t u = 0; u < p_; ++u) {
    if (static_cast<int>(u) != parent && !bit(static_cast<int>(u), parent)) continue;
    std::uint64_t* row = &reach_[u * words_];
    for (std::size_t w = 0; w < words_; ++w) row[w] |= gained[w];
    row[child_word] |= child_bit;
  }
  return EdgeOutcome::added;
}

bool ReachabilityIndex::remove_edge(Dag& dag, int parent, int child) {
  const bool removed = dag.remove_edge(parent, child);
  if (removed) exact_ = false;
  return removed;
}

}  // namespace dagpath
