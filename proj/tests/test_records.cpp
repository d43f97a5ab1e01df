#include "selgen/records.hpp"

#include <sstream>

#include <doctest.h>

using namespace selgen;

namespace {

Dataset parse(const std::string& text, SchemaMode mode = SchemaMode::Calibration) {
  std::istringstream in(text);
  return parse_dataset(in, mode, "test");
}

}  // namespace

TEST_SUITE("records") {

TEST_CASE("loads labeled and unlabeled records into the right partitions") {
  const Dataset ds = parse(
      R"({"id":"a","f_m1":0.9,"f_e":0.8,"e":1,"v":1})"
      "\n"
      R"({"id":"b","f_m1":0.4,"f_e":0.2,"v":0})"
      "\n");
  REQUIRE(ds.records.size() == 2);
  CHECK(labeled_refs(ds).size() == 1);
  CHECK(unlabeled_refs(ds).size() == 1);
  CHECK(labeled_refs(ds)[0]->id == "a");
  CHECK(unlabeled_refs(ds)[0]->id == "b");
  CHECK(labeled_refs(ds).size() + unlabeled_refs(ds).size() ==
        ds.records.size());
}

TEST_CASE("score out of range is rejected with the line number") {
  try {
    parse(R"({"id":"c","f_m1":1.3,"f_e":0.2,"v":0})" "\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 1") != std::string::npos);
    CHECK(msg.find("f_m1 out of range") != std::string::npos);
  }
}

TEST_CASE("malformed JSON reports its line") {
  try {
    parse("{\"id\":\"a\",\"f_m1\":0.9,\"f_e\":0.8,\"e\":1,\"v\":1}\n{oops\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("v=1 without e is rejected") {
  CHECK_THROWS_AS(parse(R"({"id":"a","f_m1":0.5,"f_e":0.5,"v":1})" "\n"),
                  ValidationError);
}

TEST_CASE("duplicate ids are rejected") {
  CHECK_THROWS_AS(
      parse(R"({"id":"a","f_m1":0.5,"f_e":0.5,"v":0})" "\n"
            R"({"id":"a","f_m1":0.6,"f_e":0.5,"v":0})" "\n"),
      ValidationError);
}

TEST_CASE("test mode requires labels and defaults v to 1") {
  const Dataset ds =
      parse(R"({"id":"a","f_m1":0.5,"f_e":0.5,"e":0})" "\n", SchemaMode::Test);
  CHECK(ds.records[0].v == 1);
  CHECK_THROWS_AS(
      parse(R"({"id":"a","f_m1":0.5,"f_e":0.5})" "\n", SchemaMode::Test),
      ValidationError);
}

TEST_CASE("round-trip preserves every field including unknown ones") {
  const std::string lines =
      R"({"id":"a","f_m1":0.9,"f_m2":0.25,"f_e":0.8,"e":1,"em":0,"v":1,"note":"x","k":3})"
      "\n"
      R"({"id":"b","f_m1":0.4,"f_e":0.2,"v":0,"nested":{"deep":[1,2]}})"
      "\n";
  const Dataset ds = parse(lines);
  const std::string out = to_jsonl(ds);
  std::istringstream expected(lines), actual(out);
  std::string le, la;
  while (std::getline(expected, le)) {
    REQUIRE(std::getline(actual, la));
    CHECK(nlohmann::json::parse(le) == nlohmann::json::parse(la));
  }
}

TEST_CASE("split_labeled_fraction basics") {
  std::ostringstream text;
  for (int i = 0; i < 100; ++i) {
    text << R"({"id":"r)" << i << R"(","f_m1":0.5,"f_e":0.5,"e":1,"v":1})"
         << "\n";
  }
  for (int i = 100; i < 130; ++i) {
    text << R"({"id":"r)" << i << R"(","f_m1":0.5,"f_e":0.5,"v":0})" << "\n";
  }
  const Dataset ds = parse(text.str());

  SUBCASE("fraction 1 is the identity") {
    const Dataset out = split_labeled_fraction(ds, 1.0, 7);
    CHECK(labeled_refs(out).size() == 100);
  }
  SUBCASE("fraction 0 hides every label") {
    const Dataset out = split_labeled_fraction(ds, 0.0, 7);
    CHECK(labeled_refs(out).empty());
    CHECK(unlabeled_refs(out).size() == 130);
  }
  SUBCASE("exact count and determinism") {
    const Dataset a = split_labeled_fraction(ds, 0.75, 7);
    const Dataset b = split_labeled_fraction(ds, 0.75, 7);
    CHECK(labeled_refs(a).size() == 75);
    CHECK(to_jsonl(a) == to_jsonl(b));
    const Dataset c = split_labeled_fraction(ds, 0.75, 8);
    CHECK(labeled_refs(c).size() == 75);
    CHECK(to_jsonl(a) != to_jsonl(c));  // different mask
  }
}

TEST_CASE("budget validation and the default mapping") {
  const RiskBudget b = default_budget(0.25, 0.02);
  CHECK(b.eps_s == 0.25);
  CHECK(b.delta_w == 1e-5);
  CHECK(b.delta_s == doctest::Approx((0.02 - 1e-5) / 2).epsilon(1e-15));
  CHECK(b.delta_e == b.delta_s);
  CHECK(b.q == 5);

  RiskBudget bad = b;
  bad.delta_s = 0.6;
  bad.delta_e = 0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

}  // TEST_SUITE
