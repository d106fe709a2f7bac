#include "sscn/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace sscn {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_index(std::string_view token, std::size_t& out) {
  if (token.empty()) return false;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in, std::optional<std::size_t> n_features_hint, ParseInfo* info) {
  SparseDataset d;
  ParseInfo local;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().front() == '#') {
      ++local.lines_skipped;
      continue;
    }

    double label_value = 0.0;
    if (!parse_double(tokens.front(), label_value)) {
      throw ParseError(ParseError::Kind::Label, line_no, "unreadable label '" + std::string(tokens.front()) + "'");
    }
    int label;
    if (label_value == 1.0) {
      label = 1;
    } else if (label_value == -1.0) {
      label = -1;
    } else if (label_value == 0.0) {
      label = -1;
      ++local.zero_labels_remapped;
    } else {
      throw ParseError(ParseError::Kind::Label, line_no, "unsupported label '" + std::string(tokens.front()) + "'");
    }

    std::vector<FeatureEntry> row;
    row.reserve(tokens.size() - 1);
    std::size_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      auto tok = tokens[t];
      if (tok.front() == '#') break;  // trailing comment
      auto colon = tok.find(':');
      std::size_t idx = 0;
      double value = 0.0;
      if (colon == std::string_view::npos || !parse_index(tok.substr(0, colon), idx) ||
          !parse_double(tok.substr(colon + 1), value)) {
        throw ParseError(ParseError::Kind::Malformed, line_no, "malformed feature '" + std::string(tok) + "'");
      }
      if (idx == 0) {
        throw ParseError(ParseError::Kind::Malformed, line_no, "feature indices are 1-based");
      }
      if (idx <= prev) {
        throw ParseError(ParseError::Kind::IndexOrder, line_no,
                         "feature index " + std::to_string(idx) + " does not increase");
      }
      prev = idx;
      max_index = std::max(max_index, idx);
      row.push_back({idx - 1, value});
    }
    d.rows.push_back(std::move(row));
    d.labels.push_back(label);
  }

  if (d.rows.empty()) throw ParseError(ParseError::Kind::Empty, line_no, "no samples");
  d.n_features = std::max<std::size_t>({max_index, n_features_hint.value_or(0), 1});
  if (info) *info = local;
  return d;
}

SparseDataset parse_libsvm(std::string_view text, std::optional<std::size_t> n_features_hint, ParseInfo* info) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in, n_features_hint, info);
}

SparseDataset load_libsvm(const std::filesystem::path& path, std::optional<std::size_t> n_features_hint,
                          ParseInfo* info) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  return parse_libsvm(in, n_features_hint, info);
}

std::string serialize_libsvm(const SparseDataset& d) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    out += d.labels[i] > 0 ? "+1" : "-1";
    for (const auto& e : d.rows[i]) {
      std::snprintf(buf, sizeof buf, " %zu:%.17g", e.index + 1, e.value);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

DatasetStats dataset_stats(const SparseDataset& d) {
  std::size_t nnz = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    nnz += d.rows[i].size();
    positives += d.labels[i] > 0 ? 1 : 0;
  }
  double balance = d.rows.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(d.rows.size());
  return {d.n_features, d.rows.size(), nnz, balance};
}

std::filesystem::path data_directory() {
  if (const char* dir = std::getenv("SSCN_DATA_DIR"); dir && *dir) return dir;
  return "./data";
}

}  // namespace sscn
