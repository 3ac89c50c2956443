#include <dagpath/cli.hpp>

#include <dagpath/dataset.hpp>
#include <dagpath/discrete.hpp>
#include <dagpath/error.hpp>
#include <dagpath/fit.hpp>
#include <dagpath/gaussian.hpp>
#include <dagpath/graph.hpp>
#include <dagpath/path.hpp>
#include <dagpath/prior.hpp>
#include <dagpath/selection.hpp>
#include <dagpath/simulate.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace dagpath::cli {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open '" + file + "' for reading");
  return in;
}

// "-" writes to stdout.
void write_file(const std::string& file, const std::string& text) {
  if (file == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot open '" + file + "' for writing");
  out << text;
  if (!out) throw InputError("failed writing '" + file + "'");
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

// Context prefix for errors raised while parsing a given file.
template <typename Fn>
auto with_file(const std::string& file, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(file + ": " + e.what());
  }
}

struct DataArgs {
  std::string data;
  std::string ivn;
  std::string levels;
};

void add_data_args(CLI::App* cmd, DataArgs& args, bool required) {
  auto* opt = cmd->add_option("--data", args.data, "Data CSV with a header row of node names");
  if (required) opt->required();
  cmd->add_option("--ivn", args.ivn, "Intervention file, one line per observation");
  cmd->add_option("--levels", args.levels, "Levels file for discrete data (node,level0,level1,...)");
}

Dataset load_dataset(const DataArgs& args, DataKind kind) {
  std::map<std::string, std::vector<std::string>> levels;
  if (!args.levels.empty()) {
    auto in = open_in(args.levels);
    levels = with_file(args.levels, [&] { return read_levels(in); });
  }
  auto in = open_in(args.data);
  Dataset ds = with_file(args.data, [&] { return read_data_csv(in, kind, levels); });
  if (args.ivn.empty()) return ds;
  auto ivn_in = open_in(args.ivn);
  InterventionList ivn = with_file(args.ivn, [&] { return read_interventions(ivn_in, ds.names(), ds.rows()); });
  std::optional<LevelLabels> labels;
  if (kind == DataKind::discrete) labels = ds.levels();
  return Dataset::create(ds.values(), kind, ds.names(), labels, std::move(ivn));
}

SolutionPath load_path(const std::string& file) {
  auto in = open_in(file);
  return with_file(file, [&] { return read_path_json(in); });
}

// 1-based index check at the CLI boundary.
std::size_t checked_index(const SolutionPath& path, std::size_t index) {
  if (index < 1 || index > path.size())
    throw InputError("index " + std::to_string(index) + " is outside 1.." + std::to_string(path.size()));
  return index - 1;
}

std::vector<std::size_t> requested_positions(const SolutionPath& path, const std::optional<std::size_t>& index) {
  std::vector<std::size_t> out;
  if (index) {
    out.push_back(checked_index(path, *index));
  } else {
    for (std::size_t m = 0; m < path.size(); ++m) out.push_back(m);
  }
  return out;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& names) {
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << names[i];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
}

std::string matrix_output_name(const std::string& out, std::size_t index, bool single) {
  if (single) return out;
  std::string stem = out;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem.resize(stem.size() - 4);
  return stem + "_" + std::to_string(index) + ".csv";
}

json gaussian_params_json(const GaussianParams& params, const std::vector<std::string>& names) {
  json j;
  j["intercepts"] = std::vector<double>(params.intercepts.data(), params.intercepts.data() + params.intercepts.size());
  j["vars"] = std::vector<double>(params.vars.data(), params.vars.data() + params.vars.size());
  json coefs = json::array();
  for (Eigen::Index c = 0; c < params.coefs.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(params.coefs, c); it; ++it)
      coefs.push_back({names[it.row()], names[it.col()], it.value()});
  }
  j["coefs"] = std::move(coefs);
  return j;
}

json discrete_params_json(const DiscreteParams& params, const std::vector<std::string>& names) {
  json j;
  json intercepts = json::object();
  json separated = json::array();
  for (std::size_t v = 0; v < params.size(); ++v) {
    const auto& b = params.intercepts[v];
    intercepts[names[v]] = std::vector<double>(b.data(), b.data() + b.size());
    if (params.separated[v]) separated.push_back(names[v]);
  }
  json blocks = json::array();
  const int p = static_cast<int>(params.size());
  for (int c = 0; c < p; ++c) {
    for (int r = 0; r < p; ++r) {
      const auto& b = params.block(r, c);
      if (b.size() == 0) continue;
      json rows = json::array();
      for (Eigen::Index k = 0; k < b.rows(); ++k) {
        std::vector<double> row(static_cast<std::size_t>(b.cols()));
        for (Eigen::Index u = 0; u < b.cols(); ++u) row[u] = b(k, u);
        rows.push_back(row);
      }
      blocks.push_back({{"parent", names[r]}, {"child", names[c]}, {"values", std::move(rows)}});
    }
  }
  j["intercepts"] = std::move(intercepts);
  j["blocks"] = std::move(blocks);
  j["separated"] = std::move(separated);
  return j;
}

SolutionPath single_estimate(const SolutionPath& path, std::size_t position) {
  SolutionPath out = path;
  out.estimates = {path.estimates.at(position)};
  return out;
}

// ---------------------------------------------------------------------------

struct LearnArgs {
  std::string type;
  DataArgs data;
  std::vector<double> lambdas;
  std::size_t lambdas_length = 20;
  std::optional<double> lambda_max;
  double lambda_ratio = 0.01;
  std::string scale = "log";
  std::string penalty = "mcp";
  double concavity = 2.0;
  double weight_scale = 1.0;
  double upperbound = 100.0;
  std::optional<std::size_t> edge_threshold;
  std::optional<std::size_t> max_iters;
  double tol = 1e-4;
  double var_floor = 0.01;
  std::string whitelist;
  std::string blacklist;
  std::vector<std::string> roots;
  std::vector<std::string> leaves;
  bool verbose = false;
  std::string out;
};

void run_learn(const LearnArgs& a) {
  const DataKind kind = parse_data_kind(a.type);
  const Dataset ds = load_dataset(a.data, kind);

  LearnOptions opts;
  opts.lambdas = a.lambdas;
  opts.lambdas_length = a.lambdas_length;
  opts.lambda_max = a.lambda_max;
  opts.lambda_ratio = a.lambda_ratio;
  opts.scale = a.scale == "linear" ? GridScale::linear : GridScale::log;
  opts.penalty = parse_penalty_kind(a.penalty);
  if (kind == DataKind::continuous && opts.penalty == PenaltyKind::group_lasso)
    throw UsageError("--penalty group applies to discrete data only");
  opts.concavity = a.concavity;
  opts.weight_scale = a.weight_scale;
  opts.upperbound = a.upperbound;
  opts.edge_threshold = a.edge_threshold;
  opts.max_iters = a.max_iters;
  opts.error_tol = a.tol;
  opts.var_floor = a.var_floor;
  opts.verbose = a.verbose;

  std::vector<NamedEdge> white, black;
  if (!a.whitelist.empty()) {
    auto in = open_in(a.whitelist);
    white = with_file(a.whitelist, [&] { return read_edge_pairs_csv(in, ds.names()); });
  }
  if (!a.blacklist.empty()) {
    auto in = open_in(a.blacklist);
    black = with_file(a.blacklist, [&] { return read_edge_pairs_csv(in, ds.names()); });
  }
  if (!a.roots.empty() || !a.leaves.empty()) {
    for (auto& e : specify_prior(a.roots, a.leaves, ds.names())) black.push_back(std::move(e));
  }
  const PriorKnowledge prior = validate_prior(white, black, ds.names());

  const SolutionPath path = estimate_dag(ds, opts, prior);
  for (const auto& est : path.estimates) {
    if (!est.converged) std::cerr << "warning: lambda " << est.lambda << " hit the iteration cap\n";
  }
  write_file(a.out, path_to_json(path) + "\n");
}

struct ParamsArgs {
  std::string path;
  DataArgs data;
  std::optional<std::size_t> index;
  std::size_t threads = 1;
  std::string out;
};

void run_params(const ParamsArgs& a) {
  const SolutionPath path = load_path(a.path);
  const Dataset ds = load_dataset(a.data, path.kind);
  SolutionPath subset = path;
  subset.estimates.clear();
  const auto positions = requested_positions(path, a.index);
  for (std::size_t m : positions) subset.estimates.push_back(path[m]);

  json doc;
  doc["kind"] = to_string(path.kind);
  doc["nodes"] = path.nodes;
  json estimates = json::array();
  if (path.kind == DataKind::continuous) {
    const auto params = estimate_parameters_gaussian(subset, ds, a.threads);
    for (std::size_t k = 0; k < params.size(); ++k) {
      json e = gaussian_params_json(params[k], path.nodes);
      e["index"] = positions[k] + 1;
      e["lambda"] = subset[k].lambda;
      estimates.push_back(std::move(e));
    }
  } else {
    const auto params = estimate_parameters_discrete(subset, ds, a.threads);
    for (std::size_t k = 0; k < params.size(); ++k) {
      json e = discrete_params_json(params[k], path.nodes);
      for (const auto& name : e["separated"])
        std::cerr << "warning: estimate " << positions[k] + 1 << ": node " << name.get<std::string>()
                  << " looks perfectly separated; coefficients were clamped\n";
      e["index"] = positions[k] + 1;
      e["lambda"] = subset[k].lambda;
      estimates.push_back(std::move(e));
    }
  }
  doc["estimates"] = std::move(estimates);
  write_file(a.out, doc.dump(1) + "\n");
}

struct SelectArgs {
  std::string path;
  std::optional<std::size_t> edges;
  std::optional<double> lambda;
  std::optional<std::size_t> index;
  bool automatic = false;
  DataArgs data;
  double threshold = 0.5;
  std::size_t threads = 1;
  std::string out;
};

void run_select(const SelectArgs& a) {
  const int given = (a.edges ? 1 : 0) + (a.lambda ? 1 : 0) + (a.index ? 1 : 0) + (a.automatic ? 1 : 0);
  if (given != 1) throw UsageError("select needs exactly one of --edges, --lambda, --index, --auto");
  const SolutionPath path = load_path(a.path);
  if (path.size() == 0) throw InputError(a.path + ": path has no estimates");
  std::size_t position = 0;
  if (a.automatic) {
    if (a.data.data.empty()) throw UsageError("--auto needs --data");
    const Dataset ds = load_dataset(a.data, path.kind);
    position = select_parameter(path, ds, a.threshold, a.threads) - 1;
  } else if (a.edges) {
    position = select_position(path, ByEdges{*a.edges});
  } else if (a.lambda) {
    position = select_position(path, ByLambda{*a.lambda});
  } else {
    position = checked_index(path, *a.index);
  }
  json doc = json::parse(path_to_json(single_estimate(path, position)));
  doc["selected_index"] = position + 1;
  write_file(a.out, doc.dump(1) + "\n");
  std::cout << position + 1 << '\n';
}

struct MatrixArgs {
  std::string path;
  DataArgs data;
  std::optional<std::size_t> index;
  std::size_t threads = 1;
  std::string out;
};

void run_matrix(const MatrixArgs& a, bool precision) {
  const SolutionPath path = load_path(a.path);
  if (path.kind != DataKind::continuous) throw InputError(a.path + ": covariance and precision need continuous data");
  const Dataset ds = load_dataset(a.data, path.kind);
  const auto positions = requested_positions(path, a.index);
  SolutionPath subset = path;
  subset.estimates.clear();
  for (std::size_t m : positions) subset.estimates.push_back(path[m]);
  const auto params = estimate_parameters_gaussian(subset, ds, a.threads);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Eigen::MatrixXd m = precision ? implied_precision(params[k]) : implied_covariance(params[k]);
    const std::string file = matrix_output_name(a.out, positions[k] + 1, a.index.has_value());
    write_file(file, render([&](std::ostream& os) { write_matrix_csv(os, m, path.nodes); }));
  }
}

struct SimulateArgs {
  std::string family = "polytree";
  std::size_t p = 10;
  std::optional<std::size_t> edges;
  std::size_t tile = 1;
  std::size_t n = 100;
  std::size_t ivn_per_node = 0;
  std::uint64_t seed = 1;
  std::string type = "continuous";
  int levels = 2;
  double effect = 3.0;
  double coef_min = 0.5;
  double coef_max = 2.0;
  double ivn_sd = 1.0;
  std::string out;
  std::string out_ivn;
  std::string out_truth;
  std::string out_levels;
};

void run_simulate(const SimulateArgs& a) {
  const DataKind kind = parse_data_kind(a.type);
  Dag base;
  try {
    if (a.family == "pathfinder") {
      base = pathfinder_analog();
    } else {
      const GraphFamily family = parse_graph_family(a.family);
      base = random_dag(family, a.p, a.edges.value_or(a.p - 1), a.seed);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Dag truth = a.tile > 1 ? tile_network(base, a.tile) : base;
  const std::size_t p = truth.size();
  InterventionList plan;
  try {
    plan = per_node_interventions(p, a.n, a.ivn_per_node);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Dataset ds;
  if (kind == DataKind::continuous) {
    const GaussianParams params = random_gaussian_params(truth, a.seed + 1, a.coef_min, a.coef_max);
    ds = simulate_gaussian(params, truth.names(), a.n, plan, a.seed + 2, SimulationOptions{0.0, a.ivn_sd});
  } else {
    if (a.levels < 2) throw UsageError("--levels must be at least 2");
    const DiscreteParams params =
        random_discrete_params(truth, std::vector<int>(p, a.levels), a.seed + 1, a.effect);
    ds = simulate_discrete(params, truth.names(), a.n, plan, a.seed + 2);
  }
  write_file(a.out, render([&](std::ostream& os) { write_data_csv(os, ds); }));
  if (!a.out_ivn.empty()) write_file(a.out_ivn, render([&](std::ostream& os) { write_interventions(os, ds); }));
  if (!a.out_truth.empty()) write_file(a.out_truth, render([&](std::ostream& os) { write_edge_list(os, truth); }));
  if (!a.out_levels.empty()) write_file(a.out_levels, render([&](std::ostream& os) { write_levels(os, ds); }));
}

struct ExportArgs {
  std::string path;
  std::optional<std::size_t> index;
  std::string graph;
  std::string data;
  std::string edges;
  std::string dot;
  std::string adj_csv;
  std::string json_out;
};

void run_export(const ExportArgs& a) {
  if (a.path.empty() == a.graph.empty()) throw UsageError("export needs exactly one of --path or --graph");
  if (a.edges.empty() && a.dot.empty() && a.adj_csv.empty() && a.json_out.empty())
    throw UsageError("export needs at least one of --edges, --dot, --adj-csv, --json");
  SolutionPath single;
  if (!a.path.empty()) {
    if (!a.index) throw UsageError("--path needs --index");
    const SolutionPath path = load_path(a.path);
    single = single_estimate(path, checked_index(path, *a.index));
  } else {
    if (a.data.empty()) throw UsageError("--graph needs --data to supply the node names");
    std::vector<std::string> names;
    {
      auto in = open_in(a.data);
      std::string header;
      if (!std::getline(in, header)) throw InputError(a.data + ": data file is empty");
      std::string line;
      std::istringstream hdr(header);
      while (std::getline(hdr, line, ',')) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.size() >= 2 && line.front() == '"' && line.back() == '"') line = line.substr(1, line.size() - 2);
        names.push_back(line);
      }
    }
    auto in = open_in(a.graph);
    PathEstimate est;
    est.dag = with_file(a.graph, [&] { return read_edge_list(in, names); });
    est.nedge = est.dag.num_edges();
    est.pp = names.size();
    single.nodes = names;
    single.p = names.size();
    single.estimates = {est};
  }
  const Dag& dag = single.estimates.front().dag;
  if (!a.edges.empty()) write_file(a.edges, render([&](std::ostream& os) { write_edge_list(os, dag); }));
  if (!a.dot.empty()) write_file(a.dot, render([&](std::ostream& os) { write_dot(os, dag); }));
  if (!a.adj_csv.empty()) write_file(a.adj_csv, render([&](std::ostream& os) { write_adjacency_csv(os, dag); }));
  if (!a.json_out.empty()) write_file(a.json_out, path_to_json(single) + "\n");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Sparse Bayesian network structure learning"};
  app.require_subcommand(1);

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "Estimate a solution path of DAGs");
  learn_cmd->add_option("--type", learn.type, "continuous or discrete")->required();
  add_data_args(learn_cmd, learn.data, true);
  learn_cmd->add_option("--lambdas", learn.lambdas, "Explicit decreasing lambda grid")->delimiter(',');
  learn_cmd->add_option("--lambdas-length", learn.lambdas_length, "Grid length")->check(CLI::Range(2, 100000));
  learn_cmd->add_option("--lambda-max", learn.lambda_max, "Largest lambda (default: data-driven)");
  learn_cmd->add_option("--lambda-ratio", learn.lambda_ratio, "lambda_min / lambda_max");
  learn_cmd->add_option("--scale", learn.scale, "Grid spacing")->check(CLI::IsMember({"log", "linear"}));
  learn_cmd->add_option("--penalty", learn.penalty, "l1 or mcp (continuous)")->check(CLI::IsMember({"l1", "mcp"}));
  learn_cmd->add_option("--concavity", learn.concavity, "MCP concavity");
  learn_cmd->add_option("--weight-scale", learn.weight_scale, "Group weight scale (discrete)");
  learn_cmd->add_option("--upperbound", learn.upperbound, "Coefficient magnitude cap (discrete)");
  learn_cmd->add_option("--edge-threshold", learn.edge_threshold, "Stop after an estimate with more edges");
  learn_cmd->add_option("--max-iters", learn.max_iters, "Outer sweeps per lambda");
  learn_cmd->add_option("--tol", learn.tol, "Convergence tolerance");
  learn_cmd->add_option("--var-floor", learn.var_floor, "Lower bound on conditional variances");
  learn_cmd->add_option("--whitelist", learn.whitelist, "CSV of required parent,child edges");
  learn_cmd->add_option("--blacklist", learn.blacklist, "CSV of forbidden parent,child edges");
  learn_cmd->add_option("--roots", learn.roots, "Nodes without parents")->delimiter(',');
  learn_cmd->add_option("--leaves", learn.leaves, "Nodes without children")->delimiter(',');
  learn_cmd->add_flag("--verbose", learn.verbose, "Report progress on stderr");
  learn_cmd->add_option("--out", learn.out, "Output path JSON ('-' for stdout)")->required();

  ParamsArgs params;
  auto* params_cmd = app.add_subcommand("params", "Refit parameters for path estimates");
  params_cmd->add_option("--path", params.path, "Path JSON")->required();
  add_data_args(params_cmd, params.data, true);
  params_cmd->add_option("--index", params.index, "1-based estimate (default: all)");
  params_cmd->add_option("--threads", params.threads, "Worker threads")->check(CLI::PositiveNumber);
  params_cmd->add_option("--out", params.out, "Output parameter JSON")->required();

  SelectArgs sel;
  auto* select_cmd = app.add_subcommand("select", "Pick one estimate from a path");
  select_cmd->add_option("--path", sel.path, "Path JSON")->required();
  select_cmd->add_option("--edges", sel.edges, "Closest edge count");
  select_cmd->add_option("--lambda", sel.lambda, "Closest lambda");
  select_cmd->add_option("--index", sel.index, "1-based index");
  select_cmd->add_flag("--auto", sel.automatic, "Likelihood/complexity trade-off rule (needs --data)");
  add_data_args(select_cmd, sel.data, false);
  select_cmd->add_option("--select-threshold", sel.threshold, "Fraction of the largest gain")
      ->check(CLI::Range(0.0, 1.0));
  select_cmd->add_option("--threads", sel.threads, "Worker threads")->check(CLI::PositiveNumber);
  select_cmd->add_option("--out", sel.out, "Output JSON")->required();

  MatrixArgs cov, prec;
  for (auto [name, args] : {std::pair{"cov", &cov}, std::pair{"prec", &prec}}) {
    auto* cmd = app.add_subcommand(name, std::string(name) == "cov" ? "Implied covariance matrices"
                                                                     : "Implied precision matrices");
    cmd->add_option("--path", args->path, "Path JSON")->required();
    add_data_args(cmd, args->data, true);
    cmd->add_option("--index", args->index, "1-based estimate (default: all, as <out>_<index>.csv)");
    cmd->add_option("--threads", args->threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", args->out, "Output CSV or file stem")->required();
  }

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate data from a random DAG");
  sim_cmd->add_option("--family", sim.family, "scale-free, small-world, polytree, bipartite, erdos, or pathfinder");
  sim_cmd->add_option("--p", sim.p, "Number of nodes")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--edges", sim.edges, "Number of edges (default p - 1)");
  sim_cmd->add_option("--tile", sim.tile, "Independent copies of the graph")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--n", sim.n, "Observations")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--ivn-per-node", sim.ivn_per_node, "Single-node interventions per node");
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--type", sim.type, "continuous or discrete");
  sim_cmd->add_option("--levels", sim.levels, "Levels per discrete node");
  sim_cmd->add_option("--effect", sim.effect, "Discrete effect size");
  sim_cmd->add_option("--coef-min", sim.coef_min, "Smallest continuous coefficient magnitude");
  sim_cmd->add_option("--coef-max", sim.coef_max, "Largest continuous coefficient magnitude");
  sim_cmd->add_option("--ivn-sd", sim.ivn_sd, "Standard deviation of intervened continuous values");
  sim_cmd->add_option("--out", sim.out, "Output data CSV")->required();
  sim_cmd->add_option("--out-ivn", sim.out_ivn, "Output intervention file");
  sim_cmd->add_option("--out-truth", sim.out_truth, "Output true edge list");
  sim_cmd->add_option("--out-levels", sim.out_levels, "Output levels file");

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Write one graph as edges, DOT, adjacency CSV, or JSON");
  export_cmd->add_option("--path", exp.path, "Path JSON");
  export_cmd->add_option("--index", exp.index, "1-based estimate");
  export_cmd->add_option("--graph", exp.graph, "Edge list (parent<TAB>child)");
  export_cmd->add_option("--data", exp.data, "Data CSV supplying node names for --graph");
  export_cmd->add_option("--edges", exp.edges, "Edge list output");
  export_cmd->add_option("--dot", exp.dot, "DOT output");
  export_cmd->add_option("--adj-csv", exp.adj_csv, "Adjacency CSV output");
  export_cmd->add_option("--json", exp.json_out, "Single-estimate path JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (learn_cmd->parsed()) run_learn(learn);
    if (params_cmd->parsed()) run_params(params);
    if (select_cmd->parsed()) run_select(sel);
    if (app.got_subcommand("cov")) run_matrix(cov, false);
    if (app.got_subcommand("prec")) run_matrix(prec, true);
    if (sim_cmd->parsed()) run_simulate(sim);
    if (export_cmd->parsed()) run_export(exp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace dagpath::cli
