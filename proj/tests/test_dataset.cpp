#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "fsel/dataset.hpp"
#include "fsel/rng.hpp"

using namespace fsel;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("load_csv reads a small labeled file") {
  const std::string path = temp_path("fsel_small.csv");
  write_file(path, "g1,g2,class\n1,2,A\n3,4,A\n5,6,B\n");
  const Dataset d = load_csv(path, "class");
  CHECK(d.n_samples() == 3);
  CHECK(d.n_features() == 2);
  CHECK(d.feature_names() == std::vector<std::string>{"g1", "g2"});
  CHECK(d.class_names() == std::vector<std::string>{"A", "B"});
  CHECK(d.label(0) == 0);
  CHECK(d.label(2) == 1);
  CHECK(d.value(1, 0) == 3.0);
  CHECK(d.value(2, 1) == 6.0);
  std::remove(path.c_str());
}

TEST_CASE("load_csv rejects single-class data") {
  const std::string path = temp_path("fsel_oneclass.csv");
  write_file(path, "g1,class\n1,A\n2,A\n");
  CHECK_THROWS_AS(load_csv(path, "class"), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("load_csv names the malformed row") {
  const std::string path = temp_path("fsel_badrow.csv");
  write_file(path, "g1,g2,class\n1,2,A\n3,B\n5,6,B\n");
  try {
    load_csv(path, "class");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("load_csv names the non-numeric cell") {
  const std::string path = temp_path("fsel_badcell.csv");
  write_file(path, "g1,g2,class\n1,2,A\n3,oops,B\n");
  try {
    load_csv(path, "class");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("load_csv without a header generates names and takes an index selector") {
  const std::string path = temp_path("fsel_nohdr.csv");
  // Headerless files need numeric class codes: any non-numeric cell in the
  // first line would flip it into a header.
  write_file(path, "1,2,0\n3,4,0\n5,6,1\n7,8,1\n");
  const Dataset d = load_csv(path, "2");
  CHECK(d.n_features() == 2);
  CHECK(d.feature_names() == std::vector<std::string>{"f0", "f1"});
  CHECK(d.n_samples() == 4);
  CHECK(d.class_names() == std::vector<std::string>{"0", "1"});
  std::remove(path.c_str());
}

TEST_CASE("csv round trip is exact") {
  const SyntheticSpec spec{.n_samples = 30, .n_informative = 2, .n_noise = 3,
                           .class_separation = 1.5, .seed = 7};
  const Dataset d = generate_synthetic(spec);
  const std::string path = temp_path("fsel_roundtrip.csv");
  write_csv(d, path);
  const Dataset back = load_csv(path, "class");
  REQUIRE(back.n_samples() == d.n_samples());
  REQUIRE(back.n_features() == d.n_features());
  for (int r = 0; r < d.n_samples(); ++r) {
    CHECK(back.label(r) == d.label(r));
    for (int c = 0; c < d.n_features(); ++c) CHECK(back.value(r, c) == d.value(r, c));
  }
  CHECK(back.feature_names() == d.feature_names());
  CHECK(back.class_names() == d.class_names());
  std::remove(path.c_str());
}

TEST_CASE("synthetic generator shape, balance, determinism") {
  const SyntheticSpec spec{.n_samples = 100, .n_informative = 3, .n_noise = 17,
                           .class_separation = 2.0, .seed = 42};
  const Dataset a = generate_synthetic(spec);
  CHECK(a.n_samples() == 100);
  CHECK(a.n_features() == 20);
  const std::vector<int> counts = a.class_counts();
  CHECK(counts[0] == 50);
  CHECK(counts[1] == 50);

  const Dataset b = generate_synthetic(spec);
  for (int r = 0; r < a.n_samples(); ++r)
    for (int c = 0; c < a.n_features(); ++c) REQUIRE(a.value(r, c) == b.value(r, c));

  SUBCASE("odd sample counts stay balanced to within one") {
    SyntheticSpec odd = spec;
    odd.n_samples = 101;
    const std::vector<int> oc = generate_synthetic(odd).class_counts();
    CHECK(std::abs(oc[0] - oc[1]) == 1);
  }
}

TEST_CASE("zero separation makes informative columns plain noise draws") {
  SyntheticSpec with{.n_samples = 40, .n_informative = 3, .n_noise = 5,
                     .class_separation = 0.0, .seed = 11};
  SyntheticSpec none{.n_samples = 40, .n_informative = 0, .n_noise = 8,
                     .class_separation = 4.0, .seed = 11};
  const Dataset a = generate_synthetic(with);
  const Dataset b = generate_synthetic(none);
  for (int r = 0; r < a.n_samples(); ++r)
    for (int c = 0; c < a.n_features(); ++c) REQUIRE(a.value(r, c) == b.value(r, c));
}

TEST_CASE("synthetic generator validates the spec") {
  CHECK_THROWS_AS(generate_synthetic({.n_samples = 10, .n_informative = 0, .n_noise = 0,
                                      .class_separation = 1.0, .seed = 0}),
                  ValidationError);
  CHECK_THROWS_AS(generate_synthetic({.n_samples = 3, .n_informative = 1, .n_noise = 0,
                                      .class_separation = 1.0, .seed = 0}),
                  ValidationError);
}

TEST_CASE("5x2 plan on 2+2 labels puts one of each class per fold") {
  const Dataset d({0, 1, 2, 3}, 1, {0, 0, 1, 1}, {"A", "B"}, {"f0"});
  const SplitPlan plan = make_5x2_plan(d, 123);
  REQUIRE(plan.repetitions.size() == 5);
  for (const auto& rep : plan.repetitions) {
    REQUIRE(rep.fold_a.size() == 2);
    REQUIRE(rep.fold_b.size() == 2);
    for (const auto* fold : {&rep.fold_a, &rep.fold_b}) {
      int a = 0, b = 0;
      for (int r : *fold) (d.label(r) == 0 ? a : b)++;
      CHECK(a == 1);
      CHECK(b == 1);
    }
  }
}

TEST_CASE("5x2 plan splits a 3+2 class mix as {2,1} and {1,1}") {
  const Dataset d({0, 1, 2, 3, 4}, 1, {0, 0, 0, 1, 1}, {"A", "B"}, {"f0"});
  const SplitPlan plan = make_5x2_plan(d, 9);
  for (const auto& rep : plan.repetitions) {
    int a_in_a = 0, b_in_a = 0;
    for (int r : rep.fold_a) (d.label(r) == 0 ? a_in_a : b_in_a)++;
    int a_in_b = 0, b_in_b = 0;
    for (int r : rep.fold_b) (d.label(r) == 0 ? a_in_b : b_in_b)++;
    CHECK(a_in_a + a_in_b == 3);
    CHECK(b_in_a + b_in_b == 2);
    CHECK(std::abs(a_in_a - a_in_b) == 1);
    CHECK(b_in_a == 1);
    CHECK(b_in_b == 1);
    CHECK(rep.fold_a.size() + rep.fold_b.size() == 5);
  }
}

TEST_CASE("5x2 plan stratification property over random label mixes") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int n_classes = 2 + static_cast<int>(rng.below(3));
    std::vector<int> labels;
    for (int c = 0; c < n_classes; ++c) {
      const int count = 2 + static_cast<int>(rng.below(9));
      for (int i = 0; i < count; ++i) labels.push_back(c);
    }
    rng.shuffle(labels);
    std::vector<double> values(labels.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
    std::vector<std::string> class_names;
    for (int c = 0; c < n_classes; ++c) class_names.push_back(std::string(1, static_cast<char>('a' + c)));
    const Dataset d(values, 1, labels, class_names, {"f0"});

    const SplitPlan plan = make_5x2_plan(d, rng.next_u64());
    for (const auto& rep : plan.repetitions) {
      std::vector<int> seen(labels.size(), 0);
      for (int r : rep.fold_a) seen[static_cast<std::size_t>(r)]++;
      for (int r : rep.fold_b) seen[static_cast<std::size_t>(r)]++;
      for (int s : seen) CHECK(s == 1);  // disjoint and covering
      for (int c = 0; c < n_classes; ++c) {
        int in_a = 0, in_b = 0;
        for (int r : rep.fold_a)
          if (d.label(r) == c) ++in_a;
        for (int r : rep.fold_b)
          if (d.label(r) == c) ++in_b;
        CHECK(std::abs(in_a - in_b) <= 1);
      }
    }
  }
}

TEST_CASE("5x2 plan is deterministic and varies across repetitions") {
  const SyntheticSpec spec{.n_samples = 24, .n_informative = 1, .n_noise = 1,
                           .class_separation = 1.0, .seed = 3};
  const Dataset d = generate_synthetic(spec);
  const SplitPlan p1 = make_5x2_plan(d, 5);
  const SplitPlan p2 = make_5x2_plan(d, 5);
  for (int rep = 0; rep < 5; ++rep) {
    CHECK(p1.repetitions[rep].fold_a == p2.repetitions[rep].fold_a);
    CHECK(p1.repetitions[rep].fold_b == p2.repetitions[rep].fold_b);
  }
  bool any_differ = false;
  for (int rep = 1; rep < 5; ++rep)
    if (p1.repetitions[rep].fold_a != p1.repetitions[0].fold_a) any_differ = true;
  CHECK(any_differ);
}

TEST_CASE("row access log sees original row ids through restricted copies") {
  const Dataset d({0, 1, 2, 3, 4, 5, 6, 7}, 2, {0, 0, 1, 1}, {"A", "B"}, {"f0", "f1"});
  RowAccessLog log(d.n_samples());
  Dataset tracked = d;
  tracked.attach_access_log(&log);

  const std::vector<int> keep{1, 3};
  const Dataset sub = tracked.subset_rows(keep);
  log.begin_phase("probe");
  (void)sub.value(0, 0);
  (void)sub.value(1, 1);
  const int phase = log.find_phase("probe");
  REQUIRE(phase >= 0);
  CHECK(log.rows_touched(phase) == std::vector<int>{1, 3});
}

TEST_CASE("dataset invariants are validated") {
  CHECK_THROWS_AS(Dataset({1, 2, 3}, 2, {0, 1}, {"A", "B"}, {"f0", "f1"}), ValidationError);
  CHECK_THROWS_AS(Dataset({1, 2, 3, 4}, 2, {0, 0}, {"A"}, {"f0", "f1"}), ValidationError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset({1, nan, 3, 4}, 2, {0, 1}, {"A", "B"}, {"f0", "f1"}), ValidationError);
}

TEST_CASE("a single-sample class constructs but cannot be split") {
  const Dataset d({1, 2, 3, 4, 5, 6}, 2, {0, 0, 1}, {"A", "B"}, {"f0", "f1"});
  CHECK(d.n_samples() == 3);
  CHECK_THROWS_AS(make_5x2_plan(d, 0), ValidationError);
}
