#include "ccopt/partition.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "ccopt/rng.hpp"

namespace ccopt {

void canonicalize(Partition& p) {
  for (auto& g : p.groups) std::sort(g.begin(), g.end());
  std::sort(p.groups.begin(), p.groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

PartitionCheck validate(const Partition& p) {
  PartitionCheck r;
  if (p.n == 0) {
    r.diagnostic = "dimension is zero";
    return r;
  }
  std::vector<int> seen(p.n, 0);
  for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
    if (p.groups[gi].empty()) {
      r.diagnostic = "group " + std::to_string(gi + 1) + " is empty";
      return r;
    }
    for (int idx : p.groups[gi]) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= p.n) {
        r.diagnostic = "index " + std::to_string(idx + 1) + " out of range";
        return r;
      }
      if (seen[static_cast<std::size_t>(idx)]++) {
        r.diagnostic = "index " + std::to_string(idx + 1) + " appears in two groups";
        return r;
      }
    }
  }
  for (std::size_t i = 0; i < p.n; ++i)
    if (!seen[i]) {
      r.diagnostic = "index " + std::to_string(i + 1) + " not covered";
      return r;
    }
  r.ok = true;
  r.trivial = p.groups.size() == 1;
  if (r.trivial) r.diagnostic = "trivial single-group partition";
  return r;
}

BigInt count_partitions(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("count_partitions: n must be in [1, 64]");
  // Bell triangle: row[0] = previous row's last entry, row[i] = row[i-1] + prev[i-1]
  std::vector<BigInt> prev = {1};
  for (int row = 1; row < n; ++row) {
    std::vector<BigInt> cur(row + 1);
    cur[0] = prev.back();
    for (int i = 1; i <= row; ++i) cur[i] = cur[i - 1] + prev[i - 1];
    prev = std::move(cur);
  }
  return prev.back() - 1;
}

Partition refine(const Partition& p, std::size_t group_index, const std::vector<int>& first,
                 const std::vector<int>& second) {
  if (group_index >= p.groups.size()) throw std::invalid_argument("refine: group index out of range");
  if (first.empty() || second.empty())
    throw std::invalid_argument("refine: both split parts must be nonempty");
  std::vector<int> merged = first;
  merged.insert(merged.end(), second.begin(), second.end());
  std::sort(merged.begin(), merged.end());
  if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
    throw std::invalid_argument("refine: split parts overlap");
  std::vector<int> target = p.groups[group_index];
  std::sort(target.begin(), target.end());
  if (merged != target)
    throw std::invalid_argument("refine: split does not cover the group exactly");
  Partition out;
  out.n = p.n;
  for (std::size_t i = 0; i < p.groups.size(); ++i) {
    if (i == group_index) {
      out.groups.push_back(first);
      out.groups.push_back(second);
    } else {
      out.groups.push_back(p.groups[i]);
    }
  }
  canonicalize(out);
  return out;
}

bool is_refinement(const Partition& coarse, const Partition& fine) {
  if (coarse.n != fine.n) return false;
  std::vector<int> owner(coarse.n, -1);
  for (std::size_t gi = 0; gi < coarse.groups.size(); ++gi)
    for (int idx : coarse.groups[gi]) owner[static_cast<std::size_t>(idx)] = static_cast<int>(gi);
  for (const auto& g : fine.groups) {
    if (g.empty()) return false;
    int o = owner[static_cast<std::size_t>(g.front())];
    for (int idx : g)
      if (owner[static_cast<std::size_t>(idx)] != o) return false;
  }
  return true;
}

std::vector<Partition> enumerate_all(int n) {
  if (n < 1) throw std::invalid_argument("enumerate_all: n must be >= 1");
  if (n > 10) throw std::invalid_argument("enumerate_all: n capped at 10");
  std::vector<Partition> out;
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  // restricted growth strings: assign[i] <= 1 + max(assign[0..i-1])
  auto emit = [&]() {
    int m = *std::max_element(assign.begin(), assign.end()) + 1;
    if (m < 2) return;
    Partition p;
    p.n = static_cast<std::size_t>(n);
    p.groups.assign(static_cast<std::size_t>(m), {});
    for (int i = 0; i < n; ++i) p.groups[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].push_back(i);
    canonicalize(p);
    out.push_back(std::move(p));
  };
  auto rec = [&](auto&& self, int pos, int max_used) -> void {
    if (pos == n) {
      emit();
      return;
    }
    for (int v = 0; v <= max_used + 1; ++v) {
      assign[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, std::max(max_used, v));
    }
  };
  rec(rec, 1, 0);  // assign[0] fixed to 0
  return out;
}

Partition default_decompose(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw std::invalid_argument("default_decompose: need 2 <= k <= n");
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  Partition p;
  p.n = n;
  std::size_t start = 0;
  for (std::size_t g = 0; g < k; ++g) {
    std::size_t sz = n / k + (g < n % k ? 1 : 0);
    p.groups.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                          perm.begin() + static_cast<std::ptrdiff_t>(start + sz));
    start += sz;
  }
  canonicalize(p);
  return p;
}

Partition parse_partition(const std::string& literal, std::size_t n) {
  Partition p;
  p.n = n;
  std::size_t i = 0;
  auto skip_ws = [&]() {
    while (i < literal.size() && std::isspace(static_cast<unsigned char>(literal[i]))) ++i;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (i >= literal.size() || literal[i] != c)
      throw std::invalid_argument("partition literal: expected '" + std::string(1, c) + "' at position " +
                                  std::to_string(i));
    ++i;
  };
  expect('[');
  skip_ws();
  while (i < literal.size() && literal[i] != ']') {
    expect('[');
    std::vector<int> group;
    skip_ws();
    while (i < literal.size() && literal[i] != ']') {
      std::size_t consumed = 0;
      int v = std::stoi(literal.substr(i), &consumed);
      i += consumed;
      if (v < 1 || static_cast<std::size_t>(v) > n)
        throw std::invalid_argument("partition literal: index " + std::to_string(v) + " out of range");
      group.push_back(v - 1);
      skip_ws();
      if (i < literal.size() && literal[i] == ',') {
        ++i;
        skip_ws();
      }
    }
    expect(']');
    p.groups.push_back(std::move(group));
    skip_ws();
    if (i < literal.size() && literal[i] == ',') {
      ++i;
      skip_ws();
    }
  }
  expect(']');
  skip_ws();
  if (i != literal.size()) throw std::invalid_argument("partition literal: trailing characters");
  canonicalize(p);
  auto check = validate(p);
  if (!check.ok) throw std::invalid_argument("partition literal: " + check.diagnostic);
  return p;
}

std::string format_partition(const Partition& p) {
  std::string s = "[";
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    if (g) s += ",";
    s += "[";
    for (std::size_t i = 0; i < p.groups[g].size(); ++i) {
      if (i) s += ",";
      s += std::to_string(p.groups[g][i] + 1);
    }
    s += "]";
  }
  s += "]";
  return s;
}

}  // namespace ccopt
