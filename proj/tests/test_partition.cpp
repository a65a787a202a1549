#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccopt/partition.hpp"
#include "doctest.h"

using namespace ccopt;

namespace {

Partition make(std::size_t n, std::vector<std::vector<int>> groups) {
  Partition p;
  p.n = n;
  p.groups = std::move(groups);
  return p;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("count_partitions matches Bell numbers minus one") {
  CHECK(count_partitions(1) == 0);
  CHECK(count_partitions(2) == 1);
  CHECK(count_partitions(3) == 4);
  CHECK(count_partitions(4) == 14);
  CHECK(count_partitions(5) == 51);
  CHECK(count_partitions(10) == 115974);
  CHECK(count_partitions(25) == BigInt("4638590332229999352"));
  CHECK(count_partitions(64) > BigInt("1000000000000000000"));
  CHECK_THROWS_AS(count_partitions(0), std::invalid_argument);
  CHECK_THROWS_AS(count_partitions(65), std::invalid_argument);
  CHECK_THROWS_AS(count_partitions(-3), std::invalid_argument);
}

TEST_CASE("validate accepts disjoint covers and explains failures") {
  auto good = validate(make(4, {{0, 1}, {2, 3}}));
  CHECK(good.ok);
  CHECK_FALSE(good.trivial);
  CHECK(good.diagnostic.empty());

  auto trivial = validate(make(3, {{0, 1, 2}}));
  CHECK(trivial.ok);
  CHECK(trivial.trivial);
  CHECK(trivial.diagnostic == "trivial single-group partition");

  CHECK_FALSE(validate(make(0, {})).ok);
  CHECK(validate(make(0, {})).diagnostic == "dimension is zero");

  auto empty_group = validate(make(2, {{0, 1}, {}}));
  CHECK_FALSE(empty_group.ok);
  CHECK(empty_group.diagnostic == "group 2 is empty");

  auto out_of_range = validate(make(2, {{0, 2}}));
  CHECK_FALSE(out_of_range.ok);
  CHECK(out_of_range.diagnostic == "index 3 out of range");

  auto duplicate = validate(make(3, {{0, 1}, {1, 2}}));
  CHECK_FALSE(duplicate.ok);
  CHECK(duplicate.diagnostic == "index 2 appears in two groups");

  auto uncovered = validate(make(3, {{0}, {2}}));
  CHECK_FALSE(uncovered.ok);
  CHECK(uncovered.diagnostic == "index 2 not covered");
}

TEST_CASE("canonicalize sorts inside groups and orders groups by least element") {
  auto p = make(5, {{4, 2}, {3, 0, 1}});
  canonicalize(p);
  CHECK(p.groups == std::vector<std::vector<int>>{{0, 1, 3}, {2, 4}});
  canonicalize(p);
  CHECK(p.groups == std::vector<std::vector<int>>{{0, 1, 3}, {2, 4}});
}

TEST_CASE("refine splits one group and rejects malformed splits") {
  auto p = make(4, {{0, 1, 2}, {3}});
  auto q = refine(p, 0, {0, 2}, {1});
  CHECK(q.n == 4);
  CHECK(q.groups == std::vector<std::vector<int>>{{0, 2}, {1}, {3}});
  CHECK(is_refinement(p, q));
  CHECK_FALSE(is_refinement(q, p));

  CHECK_THROWS_AS(refine(p, 2, {0}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(refine(p, 0, {}, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(refine(p, 0, {0, 1}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(refine(p, 0, {0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(refine(p, 0, {0, 3}, {1, 2}), std::invalid_argument);
}

TEST_CASE("is_refinement recognizes containment") {
  auto coarse = make(4, {{0, 1}, {2, 3}});
  CHECK(is_refinement(coarse, coarse));
  CHECK(is_refinement(coarse, make(4, {{0}, {1}, {2, 3}})));
  CHECK(is_refinement(coarse, make(4, {{0}, {1}, {2}, {3}})));
  CHECK_FALSE(is_refinement(coarse, make(4, {{0, 2}, {1}, {3}})));
  CHECK_FALSE(is_refinement(make(4, {{0}, {1}, {2}, {3}}), coarse));
  CHECK_FALSE(is_refinement(coarse, make(3, {{0}, {1}, {2}})));
}

TEST_CASE("enumerate_all(3) yields exactly the four non-trivial partitions") {
  auto all = enumerate_all(3);
  REQUIRE(all.size() == 4);
  std::set<std::vector<std::vector<int>>> got;
  for (const auto& p : all) {
    CHECK(p.n == 3);
    CHECK(validate(p).ok);
    CHECK_FALSE(p.trivial());
    got.insert(p.groups);
  }
  std::set<std::vector<std::vector<int>>> expect = {
      {{0}, {1}, {2}}, {{0, 1}, {2}}, {{0, 2}, {1}}, {{0}, {1, 2}}};
  CHECK(got == expect);
}

TEST_CASE("enumerate_all sizes match count_partitions for n up to 8") {
  for (int n = 2; n <= 8; ++n) {
    auto all = enumerate_all(n);
    CHECK(BigInt(all.size()) == count_partitions(n));
    std::set<std::vector<std::vector<int>>> distinct;
    for (const auto& p : all) distinct.insert(p.groups);
    CHECK(distinct.size() == all.size());
  }
  CHECK_THROWS_AS(enumerate_all(0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_all(11), std::invalid_argument);
}

TEST_CASE("default_decompose balances sizes, covers everything, is seeded") {
  auto p = default_decompose(10, 3, 7);
  CHECK(validate(p).ok);
  REQUIRE(p.group_count() == 3);
  std::multiset<std::size_t> sizes;
  for (const auto& g : p.groups) sizes.insert(g.size());
  CHECK(sizes == std::multiset<std::size_t>{4, 3, 3});

  auto q = default_decompose(10, 3, 7);
  CHECK(p.groups == q.groups);
  bool found_different = false;
  for (std::uint64_t s = 8; s < 16 && !found_different; ++s)
    found_different = default_decompose(10, 3, s).groups != p.groups;
  CHECK(found_different);

  auto even = default_decompose(32, 4, 1);
  for (const auto& g : even.groups) CHECK(g.size() == 8);

  CHECK_THROWS_AS(default_decompose(10, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(default_decompose(10, 11, 0), std::invalid_argument);
}

TEST_CASE("partition literals parse 1-based and round-trip through format") {
  auto p = parse_partition("[[1,2],[3]]", 3);
  CHECK(p.groups == std::vector<std::vector<int>>{{0, 1}, {2}});
  CHECK(format_partition(p) == "[[1,2],[3]]");

  auto scrambled = parse_partition(" [ [3] , [2 , 1] ] ", 3);
  CHECK(format_partition(scrambled) == "[[1,2],[3]]");

  for (const auto& lit : {"[[1,2],[3]]", "[[1],[2],[3]]", "[[1,3],[2]]"}) {
    auto rt = parse_partition(lit, 3);
    CHECK(format_partition(rt) == lit);
  }

  CHECK_THROWS_AS(parse_partition("[[1,1],[2]]", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_partition("[[1,2]]extra", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_partition("[[0,1]]", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_partition("[[1,3]]", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_partition("[[1]]", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_partition("[1,2]", 2), std::invalid_argument);
}

}  // TEST_SUITE
