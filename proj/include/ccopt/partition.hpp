#pragma once
// Coordinate decompositions: disjoint covering index groups over {0..n-1}.
// CLI literals use 1-based indices, e.g. "[[1,2],[3]]".
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ccopt {

struct Partition {
  std::size_t n = 0;
  std::vector<std::vector<int>> groups;

  std::size_t group_count() const { return groups.size(); }
  bool trivial() const { return groups.size() == 1; }
};

struct PartitionCheck {
  bool ok = false;
  bool trivial = false;
  std::string diagnostic;
};

// sorts indices inside groups and groups by least element
void canonicalize(Partition& p);

PartitionCheck validate(const Partition& p);

using BigInt = boost::multiprecision::cpp_int;

// Bell(n) - 1: every set partition except the single-group one
BigInt count_partitions(int n);

Partition refine(const Partition& p, std::size_t group_index, const std::vector<int>& first,
                 const std::vector<int>& second);

// every group of `fine` contained in some group of `coarse`
bool is_refinement(const Partition& coarse, const Partition& fine);

std::vector<Partition> enumerate_all(int n);

Partition default_decompose(std::size_t n, std::size_t k, std::uint64_t seed);

Partition parse_partition(const std::string& literal, std::size_t n);
std::string format_partition(const Partition& p);

}  // namespace ccopt
