#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "mlpinit/data.hpp"
#include "mlpinit/errors.hpp"
#include "mlpinit/network.hpp"

using namespace mlpinit;
namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

std::string header_line() { return join(csv_header()) + "\n"; }

std::string data_row(int participant, const std::string& label, std::size_t features) {
  std::string row = std::to_string(participant) + "," + label;
  for (std::size_t j = 0; j < features; ++j) row += "," + std::to_string(0.5 * static_cast<double>(j));
  return row + "\n";
}

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "test");
}

template <class E>
std::string error_text(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const E& e) {
    return e.what();
  }
  FAIL("expected an exception");
  return {};
}

Dataset tiny(const std::vector<int>& labels) {
  Dataset d;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    d.samples.push_back({static_cast<int>(i), std::vector<double>(kFeatureCount, double(i)),
                         labels[i], i});
  }
  return d;
}

}  // namespace

TEST_CASE("labels") {
  CHECK(parse_label("Mild") == DepressionLevel::Mild);
  CHECK(parse_label("None") == DepressionLevel::None);
  CHECK(parse_label("3") == DepressionLevel::Severe);
  CHECK(parse_label("0") == DepressionLevel::None);
  CHECK_THROWS_AS((void)parse_label("mildish"), ParseError);
  CHECK_THROWS_AS((void)parse_label("4"), ParseError);
  CHECK_THROWS_AS((void)parse_label(""), ParseError);
  CHECK(to_string(DepressionLevel::Moderate) == "Moderate");
}

TEST_CASE("csv header layout") {
  const auto h = csv_header();
  REQUIRE(h.size() == 2 + kFeatureCount);
  CHECK(kGsrFeatures + kPdFeatures + kStFeatures == kFeatureCount);
  CHECK(h[0] == "participant");
  CHECK(h[1] == "label");
  CHECK(h[2] == "gsr_00");
  CHECK(h[2 + kGsrFeatures] == "pd_00");
  CHECK(h[2 + kGsrFeatures + kPdFeatures] == "st_00");
  CHECK(h.back() == "st_22");
}

TEST_CASE("csv parsing") {
  SUBCASE("well-formed rows") {
    const Dataset d = parse(header_line() + data_row(3, "Mild", 85) + data_row(4, "2", 85));
    REQUIRE(d.size() == 2);
    CHECK(d.samples[0].participant == 3);
    CHECK(d.samples[0].label == 1);
    CHECK(d.samples[1].label == 2);
    CHECK(d.samples[1].index == 1);
    CHECK(d.samples[0].features[84] == 42.0);
    CHECK(d.provenance == "test");
  }

  SUBCASE("84 feature columns are rejected with the expected count") {
    const auto msg = error_text<FormatError>(header_line() + data_row(0, "None", 84));
    CHECK(msg.find("85") != std::string::npos);
    CHECK(msg.find("84") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }

  SUBCASE("unparseable tokens") {
    std::string bad = data_row(0, "None", 85);
    bad.replace(bad.find(",1.000000"), 9, ",abc");
    const auto msg = error_text<ParseError>(header_line() + bad);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("abc") != std::string::npos);

    CHECK_THROWS_AS((void)parse(header_line() + data_row(0, "Sad", 85)), ParseError);
    CHECK_THROWS_AS((void)parse(header_line() + data_row(0, "None", 85).replace(0, 1, "x")),
                    ParseError);
  }

  SUBCASE("structural problems") {
    CHECK_THROWS_AS((void)parse(""), FormatError);
    CHECK_THROWS_AS((void)parse(header_line()), FormatError);
    std::string wrong_header = header_line();
    wrong_header.replace(0, 11, "subject_id_");
    CHECK_THROWS_AS((void)parse(wrong_header + data_row(0, "None", 85)), FormatError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)load_csv("/nonexistent/cohort.csv"), IoError);
  }
}

TEST_CASE("synthetic cohort") {
  const Dataset d = synthesize_dataset({});
  CHECK(d.size() == 192);
  CHECK(d.class_counts() == std::vector<std::size_t>{48, 48, 48, 48});
  std::set<int> ids;
  for (const auto& s : d.samples) {
    ids.insert(s.participant);
    CHECK(s.features.size() == kFeatureCount);
  }
  CHECK(ids.size() == 16);
  CHECK(d.provenance == "synthetic:seed=0");

  CHECK(synthesize_dataset({5}) == synthesize_dataset({5}));
  CHECK(synthesize_dataset({5}).samples != synthesize_dataset({6}).samples);

  const Matrix x = d.features();
  CHECK(x.rows() == 192);
  CHECK(x.cols() == kFeatureCount);
  CHECK(d.labels().size() == 192);

  CHECK_THROWS_AS((void)synthesize_dataset({0, 1, 12, 2.0}), ValidationError);
  CHECK_THROWS_AS((void)synthesize_dataset({0, 16, 12, -1.0}), ValidationError);
}

TEST_CASE("csv round trip through a file") {
  const Dataset d = synthesize_dataset({11});
  const fs::path path = fs::temp_directory_path() / "mlpinit_test_data_roundtrip.csv";
  save_csv(d, path);
  const Dataset back = load_csv(path);
  fs::remove(path);
  REQUIRE(back.size() == 192);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.samples[i].features == d.samples[i].features);
    CHECK(back.samples[i].label == d.samples[i].label);
    CHECK(back.samples[i].participant == d.samples[i].participant);
  }
}

TEST_CASE("standardization uses training statistics only") {
  const Dataset d = synthesize_dataset({2});
  const auto split = holdout_split(d, 0.2, 2);
  Dataset train = split.trainval;
  for (auto& s : train.samples) s.features[10] = 7.0;  // constant column
  const auto z = standardize(train, {split.test});

  const Matrix zx = z.train.features();
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    std::vector<double> col(zx.rows());
    for (std::size_t i = 0; i < zx.rows(); ++i) col[i] = zx(i, j);
    CHECK(std::abs(mean(col)) <= 1e-12);
    if (j == 10) {
      for (double v : col) CHECK(v == 0.0);
    } else {
      CHECK(std::sqrt(variance(col)) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(z.stats.stddev[10] == kStdFloor);

  // Test rows are transformed with train stats, so their means are not pinned to 0.
  const Matrix tx = z.others.at(0).features();
  double worst = 0.0;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    std::vector<double> col(tx.rows());
    for (std::size_t i = 0; i < tx.rows(); ++i) col[i] = tx(i, j);
    worst = std::max(worst, std::abs(mean(col)));
  }
  CHECK(worst > 1e-6);

  CHECK_THROWS_AS((void)standardize(Dataset{}), ValidationError);
}

TEST_CASE("stratified holdout") {
  const Dataset d = synthesize_dataset({3});
  const auto split = holdout_split(d, 0.2, 99);
  CHECK(split.test.size() == 36);
  CHECK(split.trainval.size() == 156);
  CHECK(split.test.class_counts() == std::vector<std::size_t>{9, 9, 9, 9});
  CHECK(split.warnings.empty());

  std::set<std::size_t> seen;
  for (const auto& s : split.test.samples) seen.insert(s.index);
  for (const auto& s : split.trainval.samples) CHECK(seen.insert(s.index).second);
  CHECK(seen.size() == 192);

  auto ordered = [](const Dataset& part) {
    return std::is_sorted(part.samples.begin(), part.samples.end(),
                          [](const Sample& a, const Sample& b) { return a.index < b.index; });
  };
  CHECK(ordered(split.test));
  CHECK(ordered(split.trainval));

  CHECK(holdout_split(d, 0.2, 99).test == split.test);
  CHECK(holdout_split(d, 0.2, 100).test != split.test);

  CHECK_THROWS_AS((void)holdout_split(d, 0.0, 1), ValidationError);
  CHECK_THROWS_AS((void)holdout_split(d, 1.0, 1), ValidationError);
  CHECK_THROWS_AS((void)holdout_split(tiny({0, 1, 2, 2}), 0.2, 1), ValidationError);
}

TEST_CASE("holdout on one sample per class leaves the test set empty with a warning") {
  const auto split = holdout_split(tiny({0, 1, 2, 3}), 0.5, 1);
  CHECK(split.test.empty());
  CHECK(split.trainval.size() == 4);
  REQUIRE(split.warnings.size() == 1);
  CHECK(split.warnings[0].find("empty") != std::string::npos);
}

TEST_CASE("leave-one-out folds") {
  const auto split = holdout_split(synthesize_dataset({4}), 0.2, 4);
  const auto folds = loo_splits(split.trainval);
  REQUIRE(folds.size() == 156);
  std::set<std::size_t> held;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    CHECK(folds[k].train.size() == 155);
    CHECK(folds[k].validation == split.trainval.samples[k]);
    held.insert(folds[k].validation.index);
    for (const auto& s : folds[k].train.samples) REQUIRE(s.index != folds[k].validation.index);
  }
  CHECK(held.size() == 156);

  const auto pair = loo_splits(tiny({0, 1}));
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].train.samples.at(0).index == 1);
  CHECK(pair[1].train.samples.at(0).index == 0);

  CHECK_THROWS_AS((void)loo_splits(tiny({0})), ValidationError);
}
