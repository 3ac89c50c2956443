#include <dagpath/dataset.hpp>

#include <dagpath/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

namespace dagpath {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Comma-separated fields; double quotes protect embedded commas.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double x = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "NULL";
}

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < p; ++i) names.push_back("V" + std::to_string(i + 1));
  return names;
}

}  // namespace

std::string to_string(DataKind kind) { return kind == DataKind::continuous ? "continuous" : "discrete"; }

DataKind parse_data_kind(const std::string& s) {
  if (s == "continuous" || s == "c") return DataKind::continuous;
  if (s == "discrete" || s == "d") return DataKind::discrete;
  throw InputError("unknown data type '" + s + "' (expected continuous or discrete)");
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

Dataset Dataset::create(Eigen::MatrixXd values, DataKind kind, std::vector<std::string> names,
                        std::optional<LevelLabels> levels, std::optional<InterventionList> interventions) {
  const auto n = static_cast<std::size_t>(values.rows());
  const auto p = static_cast<std::size_t>(values.cols());
  Dataset ds;
  ds.kind_ = kind;

  if (names.empty()) names = default_names(p);
  if (names.size() != p)
    throw InputError("expected " + std::to_string(p) + " node names, got " + std::to_string(names.size()));
  {
    std::set<std::string> seen;
    for (const auto& nm : names) {
      if (nm.empty()) throw InputError("empty node name");
      if (!seen.insert(nm).second) throw InputError("duplicate node name '" + nm + "'");
    }
  }

  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t h = 0; h < n; ++h) {
      if (!std::isfinite(values(h, j)))
        throw InputError("missing or non-finite value at row " + std::to_string(h + 1) + ", column '" +
                         names[j] + "'; impute missing values before structure learning");
    }
  }

  if (kind == DataKind::discrete) {
    if (levels) {
      if (levels->size() != p)
        throw InputError("expected levels for " + std::to_string(p) + " variables, got " +
                         std::to_string(levels->size()));
      for (std::size_t j = 0; j < p; ++j) {
        const auto r = static_cast<double>((*levels)[j].size());
        for (std::size_t h = 0; h < n; ++h) {
          const double v = values(h, j);
          if (v != std::floor(v) || v < 0 || v >= r)
            throw InputError("value " + format_double(v) + " at row " + std::to_string(h + 1) + ", column '" +
                             names[j] + "' lies outside the declared levels");
        }
      }
      ds.levels_ = std::move(*levels);
    } else {
      ds.levels_.resize(p);
      for (std::size_t j = 0; j < p; ++j) {
        std::set<double> distinct(values.col(j).data(), values.col(j).data() + n);
        std::vector<double> sorted(distinct.begin(), distinct.end());
        for (double v : sorted) ds.levels_[j].push_back(format_double(v));
        for (std::size_t h = 0; h < n; ++h) {
          auto it = std::lower_bound(sorted.begin(), sorted.end(), values(h, j));
          values(h, j) = static_cast<double>(it - sorted.begin());
        }
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (ds.levels_[j].size() < 2)
        throw InputError("discrete variable '" + names[j] + "' needs at least 2 levels");
    }
  } else if (levels && !levels->empty()) {
    throw InputError("levels are only meaningful for discrete data");
  }

  if (interventions) {
    if (interventions->size() != n)
      throw InputError("intervention list has " + std::to_string(interventions->size()) + " entries but data has " +
                       std::to_string(n) + " rows");
    for (std::size_t h = 0; h < n; ++h) {
      auto& row = (*interventions)[h];
      for (int v : row) {
        if (v < 0 || static_cast<std::size_t>(v) >= p)
          throw InputError("intervention index " + std::to_string(v) + " in row " + std::to_string(h + 1) +
                           " is out of range");
      }
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    ds.interventions_ = std::move(*interventions);
  } else {
    ds.interventions_.assign(n, {});
  }

  ds.values_ = std::move(values);
  ds.names_ = std::move(names);
  return ds;
}

std::size_t Dataset::num_intervened_rows() const {
  return static_cast<std::size_t>(
      std::count_if(interventions_.begin(), interventions_.end(), [](const auto& r) { return !r.empty(); }));
}

RowPartition row_partition(const Dataset& ds) {
  const std::size_t p = ds.cols();
  const std::size_t n = ds.rows();
  RowPartition part;
  part.observed.resize(p);
  part.intervened.resize(p);
  std::vector<char> hit(p);
  for (std::size_t h = 0; h < n; ++h) {
    std::fill(hit.begin(), hit.end(), 0);
    for (int v : ds.interventions()[h]) hit[v] = 1;
    for (std::size_t j = 0; j < p; ++j) (hit[j] ? part.intervened[j] : part.observed[j]).push_back(static_cast<int>(h));
  }
  return part;
}

Standardization standardize(const Dataset& ds) {
  if (ds.kind() != DataKind::continuous) throw InputError("standardization requires continuous data");
  const auto n = static_cast<Eigen::Index>(ds.rows());
  if (n < 2) throw InputError("standardization requires at least 2 observations");
  Eigen::MatrixXd x = ds.values();
  Eigen::VectorXd centers = x.colwise().mean();
  Eigen::VectorXd scales(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    x.col(j).array() -= centers(j);
    const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0)) throw InputError("column '" + ds.names()[j] + "' is constant and cannot be standardized");
    scales(j) = sd;
    x.col(j) /= sd;
  }
  return {Dataset::create(std::move(x), DataKind::continuous, ds.names(), std::nullopt, ds.interventions()),
          std::move(centers), std::move(scales)};
}

Dataset read_data_csv(std::istream& in, DataKind kind, const std::map<std::string, std::vector<std::string>>& levels,
                      std::optional<InterventionList> interventions) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("data file is empty");
  std::vector<std::string> names = split_csv(line);
  const std::size_t p = names.size();
  for (const auto& [node, labels] : levels) {
    if (std::find(names.begin(), names.end(), node) == names.end())
      throw InputError("levels given for unknown node '" + node + "'");
  }

  std::vector<std::vector<std::string>> cells;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != p)
      throw InputError("data line " + std::to_string(lineno) + ": expected " + std::to_string(p) + " fields, got " +
                       std::to_string(fields.size()));
    for (std::size_t j = 0; j < p; ++j) {
      if (is_missing(fields[j]))
        throw InputError("data line " + std::to_string(lineno) + ": missing value in column '" + names[j] +
                         "'; impute missing values before structure learning");
    }
    cells.push_back(std::move(fields));
  }
  const std::size_t n = cells.size();
  Eigen::MatrixXd values(n, p);

  if (kind == DataKind::continuous) {
    for (std::size_t h = 0; h < n; ++h) {
      for (std::size_t j = 0; j < p; ++j) {
        auto v = parse_double(cells[h][j]);
        if (!v)
          throw InputError("data row " + std::to_string(h + 1) + ": cannot parse '" + cells[h][j] + "' in column '" +
                           names[j] + "' as a number");
        values(h, j) = *v;
      }
    }
    return Dataset::create(std::move(values), kind, std::move(names), std::nullopt, std::move(interventions));
  }

  LevelLabels labels(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (auto it = levels.find(names[j]); it != levels.end()) {
      labels[j] = it->second;
    } else {
      std::set<std::string> distinct;
      for (std::size_t h = 0; h < n; ++h) distinct.insert(cells[h][j]);
      labels[j].assign(distinct.begin(), distinct.end());
      const bool numeric =
          std::all_of(labels[j].begin(), labels[j].end(), [](const std::string& s) { return parse_double(s).has_value(); });
      if (numeric) {
        std::stable_sort(labels[j].begin(), labels[j].end(),
                         [](const std::string& a, const std::string& b) { return *parse_double(a) < *parse_double(b); });
      }
    }
    std::unordered_map<std::string, int> code;
    for (std::size_t k = 0; k < labels[j].size(); ++k) code.emplace(labels[j][k], static_cast<int>(k));
    for (std::size_t h = 0; h < n; ++h) {
      auto it = code.find(cells[h][j]);
      if (it == code.end())
        throw InputError("data row " + std::to_string(h + 1) + ": value '" + cells[h][j] + "' of column '" + names[j] +
                         "' is not among its declared levels");
      values(h, j) = it->second;
    }
  }
  return Dataset::create(std::move(values), kind, std::move(names), std::move(labels), std::move(interventions));
}

void write_data_csv(std::ostream& out, const Dataset& ds) {
  const std::size_t p = ds.cols();
  for (std::size_t j = 0; j < p; ++j) out << (j ? "," : "") << csv_field(ds.names()[j]);
  out << '\n';
  for (std::size_t h = 0; h < ds.rows(); ++h) {
    for (std::size_t j = 0; j < p; ++j) {
      if (j) out << ',';
      if (ds.kind() == DataKind::discrete)
        out << csv_field(ds.levels()[j][ds.level(h, j)]);
      else
        out << format_double(ds.values()(h, j));
    }
    out << '\n';
  }
}

InterventionList read_interventions(std::istream& in, const std::vector<std::string>& names, std::size_t n) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], static_cast<int>(i));
  InterventionList out;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t lineno = out.size() + 1;
    std::vector<int> row;
    if (!trim(line).empty()) {
      for (const auto& field : split_csv(line)) {
        if (field.empty()) continue;
        auto it = index.find(field);
        if (it == index.end())
          throw InputError("intervention file line " + std::to_string(lineno) + ": unknown node '" + field + "'");
        row.push_back(it->second);
      }
    }
    out.push_back(std::move(row));
    if (out.size() > n)
      throw InputError("intervention file line " + std::to_string(out.size()) + ": more lines than the " +
                       std::to_string(n) + " data rows");
  }
  if (out.size() != n)
    throw InputError("intervention file line " + std::to_string(out.size() + 1) + ": expected " + std::to_string(n) +
                     " lines, found " + std::to_string(out.size()));
  return out;
}

void write_interventions(std::ostream& out, const Dataset& ds) {
  for (const auto& row : ds.interventions()) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_field(ds.names()[row[k]]);
    out << '\n';
  }
}

std::map<std::string, std::vector<std::string>> read_levels(std::istream& in) {
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() < 3)
      throw InputError("levels file line " + std::to_string(lineno) + ": expected 'node,level0,level1,...'");
    std::string node = fields.front();
    fields.erase(fields.begin());
    if (!out.emplace(node, std::move(fields)).second)
      throw InputError("levels file line " + std::to_string(lineno) + ": duplicate node '" + node + "'");
  }
  return out;
}

void write_levels(std::ostream& out, const Dataset& ds) {
  if (ds.kind() != DataKind::discrete) return;
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    out << csv_field(ds.names()[j]);
    for (const auto& l : ds.levels()[j]) out << ',' << csv_field(l);
    out << '\n';
  }
}

}  // namespace dagpath
