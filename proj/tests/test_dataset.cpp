#include "sscn/dataset.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sscn;

TEST_CASE("single line with gaps in the index set") {
  const auto d = parse_libsvm("+1 1:0.5 3:2.0\n");
  REQUIRE(d.n_samples() == 1);
  CHECK(d.labels[0] == 1);
  CHECK(d.n_features == 3);
  REQUIRE(d.rows[0].size() == 2);
  CHECK(d.rows[0][0] == FeatureEntry{0, 0.5});
  CHECK(d.rows[0][1] == FeatureEntry{2, 2.0});
}

TEST_CASE("label-only line gives an empty row") {
  const auto d = parse_libsvm("-1\n");
  REQUIRE(d.n_samples() == 1);
  CHECK(d.labels[0] == -1);
  CHECK(d.rows[0].empty());
}

TEST_CASE("zero labels map to -1; matches a reference LibSVM reader") {
  // Reference reader output for this fixture: shape (2, 2), labels (0, 1),
  // rows [(1, 1.0)] and [(0, 1.0)].
  ParseInfo info;
  const auto d = parse_libsvm("0 2:1\n+1 1:1\n", std::nullopt, &info);
  REQUIRE(d.n_samples() == 2);
  CHECK(d.labels == std::vector<int>{-1, 1});
  CHECK(d.n_features == 2);
  CHECK(d.rows[0] == std::vector<FeatureEntry>{{1, 1.0}});
  CHECK(d.rows[1] == std::vector<FeatureEntry>{{0, 1.0}});
  CHECK(info.zero_labels_remapped == 1);
}

TEST_CASE("stats") {
  const auto one = dataset_stats(parse_libsvm("+1 1:1\n"));
  CHECK(one.n_features == 1);
  CHECK(one.n_samples == 1);
  CHECK(one.nnz == 1);
  CHECK(one.label_balance == 1.0);
  const auto two = dataset_stats(parse_libsvm("0 2:1\n+1 1:1\n"));
  CHECK(two.n_features == 2);
  CHECK(two.n_samples == 2);
  CHECK(two.nnz == 2);
  CHECK(two.label_balance == 0.5);
}

TEST_CASE("comments, blank lines and trailing comments") {
  ParseInfo info;
  const auto d = parse_libsvm("# header\n\n+1 1:1 # note\n   \n-1 2:3\n", std::nullopt, &info);
  CHECK(d.n_samples() == 2);
  CHECK(d.rows[0].size() == 1);
  CHECK(info.lines_skipped == 3);
}

TEST_CASE("feature count hint widens the dimension") {
  CHECK(parse_libsvm("+1 1:1\n", 10).n_features == 10);
  CHECK(parse_libsvm("+1 4:1\n", 2).n_features == 4);
}

TEST_CASE("errors carry kind and line") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_libsvm(text);
    } catch (const ParseError& e) {
      return std::make_pair(e.kind(), e.line());
    }
    FAIL("no error");
    return std::make_pair(ParseError::Kind::Empty, std::size_t{0});
  };
  CHECK(kind_of("+1 1:1\n+1 3:1 2:1\n") == std::make_pair(ParseError::Kind::IndexOrder, std::size_t{2}));
  CHECK(kind_of("+1 1:1 1:2\n").first == ParseError::Kind::IndexOrder);
  CHECK(kind_of("2 1:1\n").first == ParseError::Kind::Label);
  CHECK(kind_of("+1 1:abc\n").first == ParseError::Kind::Malformed);
  CHECK(kind_of("+1 0:1\n").first == ParseError::Kind::Malformed);
  CHECK(kind_of("+1 1\n").first == ParseError::Kind::Malformed);
  CHECK(kind_of("x 1:1\n").first == ParseError::Kind::Label);
}

TEST_CASE("round trip through serialize") {
  const char* fixtures[] = {
      "+1 1:0.5 3:2.0\n",
      "-1\n+1 2:1e-300 7:-3.25\n",
      "0 2:1\n+1 1:0.1\n-1 1:0.30000000000000004 2:123456789.123\n",
  };
  for (const char* text : fixtures) {
    const auto d = parse_libsvm(text);
    CHECK(parse_libsvm(serialize_libsvm(d), d.n_features) == d);
  }
}

TEST_CASE("row order is file order") {
  const auto d = parse_libsvm("+1 1:1\n-1 1:2\n+1 1:3\n");
  for (std::size_t i = 0; i < 3; ++i) CHECK(d.rows[i][0].value == static_cast<double>(i + 1));
}

TEST_CASE("load from disk and data directory") {
  const auto dir = std::filesystem::temp_directory_path() / "sscn_dataset_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "tiny.svm";
  {
    std::ofstream out(path);
    out << "+1 1:0.5\n-1 2:1\n";
  }
  const auto d = load_libsvm(path);
  CHECK(d.n_samples() == 2);
  CHECK_THROWS(load_libsvm(dir / "missing.svm"));

  ::setenv("SSCN_DATA_DIR", dir.c_str(), 1);
  CHECK(data_directory() == dir);
  ::unsetenv("SSCN_DATA_DIR");
  CHECK(data_directory() == std::filesystem::path("./data"));
}
