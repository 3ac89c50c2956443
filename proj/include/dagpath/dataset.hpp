#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dagpath {

enum class DataKind { continuous, discrete };

std::string to_string(DataKind kind);
DataKind parse_data_kind(const std::string& s);

using LevelLabels = std::vector<std::vector<std::string>>;
using InterventionList = std::vector<std::vector<int>>;

/// An n x p observation matrix with its data type, discrete levels, and the
/// set of intervened variables for every row.
///
/// Discrete columns hold 0-based level indices stored as doubles. The last
/// level of every discrete variable is the reference category. Instances are
/// validated on construction and immutable afterwards.
class Dataset {
 public:
  // Validates and builds a dataset. When `levels` is omitted for discrete
  // data, each column's levels are inferred as its sorted distinct values
  // and the column is re-coded to indices into that list. Missing values
  // (NaN) are rejected; impute them upstream.
  static Dataset create(Eigen::MatrixXd values, DataKind kind, std::vector<std::string> names = {},
                        std::optional<LevelLabels> levels = std::nullopt,
                        std::optional<InterventionList> interventions = std::nullopt);

  Dataset() = default;

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  DataKind kind() const { return kind_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }
  const LevelLabels& levels() const { return levels_; }
  int num_levels(std::size_t j) const { return static_cast<int>(levels_.at(j).size()); }
  int level(std::size_t row, std::size_t col) const { return static_cast<int>(values_(row, col)); }
  const InterventionList& interventions() const { return interventions_; }
  std::size_t num_intervened_rows() const;

  bool operator==(const Dataset&) const = default;

 private:
  Eigen::MatrixXd values_;
  DataKind kind_ = DataKind::continuous;
  std::vector<std::string> names_;
  LevelLabels levels_;
  InterventionList interventions_;
};

/// Rows where each node is observed (O_j) or under intervention (I_j).
struct RowPartition {
  std::vector<std::vector<int>> observed;
  std::vector<std::vector<int>> intervened;
};

RowPartition row_partition(const Dataset& ds);

struct Standardization {
  Dataset data;
  Eigen::VectorXd centers;
  Eigen::VectorXd scales;
};

// Centers each column and scales it to unit sample standard deviation
// (divisor n - 1). Throws InputError naming the first constant column.
Standardization standardize(const Dataset& ds);

// Data CSV: header of node names, one observation per row. Discrete cells are
// level labels; `levels` maps node name to its declared labels (others are
// inferred). Missing cells ("", "NA", "NaN") are rejected.
Dataset read_data_csv(std::istream& in, DataKind kind,
                      const std::map<std::string, std::vector<std::string>>& levels = {},
                      std::optional<InterventionList> interventions = std::nullopt);
void write_data_csv(std::ostream& out, const Dataset& ds);

// One line per observation listing the intervened node names separated by
// commas; a blank line is an observational row. The line count must equal n.
InterventionList read_interventions(std::istream& in, const std::vector<std::string>& names, std::size_t n);
void write_interventions(std::ostream& out, const Dataset& ds);

// `node,level0,level1,...` lines. Continuous data writes nothing.
std::map<std::string, std::vector<std::string>> read_levels(std::istream& in);
void write_levels(std::ostream& out, const Dataset& ds);

// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace dagpath
