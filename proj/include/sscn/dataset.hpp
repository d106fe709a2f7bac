#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sscn {

struct FeatureEntry {
  std::size_t index;  // 0-based
  double value;
  bool operator==(const FeatureEntry&) const = default;
};

/// Row-sparse design matrix with +1/-1 labels, one row per sample.
struct SparseDataset {
  std::size_t n_features = 0;
  std::vector<std::vector<FeatureEntry>> rows;
  std::vector<int> labels;

  std::size_t n_samples() const { return rows.size(); }
  bool operator==(const SparseDataset&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Malformed, IndexOrder, Label, Empty };

  ParseError(Kind kind, std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

struct ParseInfo {
  std::size_t zero_labels_remapped = 0;
  std::size_t lines_skipped = 0;
};

/// Reads LibSVM text. File indices are 1-based and must increase strictly
/// within a line; labels 0/1/-1/+1 are accepted and 0 becomes -1. Blank
/// lines and lines starting with '#' are skipped.
SparseDataset parse_libsvm(std::istream& in, std::optional<std::size_t> n_features_hint = std::nullopt,
                           ParseInfo* info = nullptr);
SparseDataset parse_libsvm(std::string_view text, std::optional<std::size_t> n_features_hint = std::nullopt,
                           ParseInfo* info = nullptr);
SparseDataset load_libsvm(const std::filesystem::path& path,
                          std::optional<std::size_t> n_features_hint = std::nullopt, ParseInfo* info = nullptr);

/// Writes values with round-trip precision so that parsing the output
/// reproduces the dataset exactly.
std::string serialize_libsvm(const SparseDataset& d);

struct DatasetStats {
  std::size_t n_features;
  std::size_t n_samples;
  std::size_t nnz;
  double label_balance;  // fraction of +1 labels
};

DatasetStats dataset_stats(const SparseDataset& d);

/// Directory named by SSCN_DATA_DIR, or "./data".
std::filesystem::path data_directory();

}  // namespace sscn
