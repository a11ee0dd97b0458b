#include "lcslab/error.hpp"
#include "lcslab/lcs_kernels.hpp"
#include "lcslab/partitions.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace lcslab;

namespace {

RPartition make(int k, int n, std::vector<int> nu, std::vector<int> tau) {
  RPartition p;
  p.k = k;
  p.n = n;
  p.r = static_cast<int>(nu.size()) - 1;
  p.nu = std::move(nu);
  p.tau = std::move(tau);
  return p;
}

bool endpoint_less(const RPartition& a, const RPartition& b) {
  if (a.r != b.r) return a.r < b.r;
  for (int j = 1; j < a.r; ++j) {
    if (a.nu[j] != b.nu[j]) return a.nu[j] < b.nu[j];
    if (a.tau[j] != b.tau[j]) return a.tau[j] < b.tau[j];
  }
  return false;
}

}  // namespace

TEST(Validate, SpecShapes) {
  EXPECT_FALSE(validate(make(2, 2, {1, 5, 9}, {1, 5, 9})));
  EXPECT_FALSE(validate(make(2, 2, {1, 3, 5}, {1, 3, 5})));
  EXPECT_FALSE(validate(make(2, 2, {1, 3, 5}, {1, 4, 5})));
  // Blocks of combined size 4, 4 and a final block of size 0.
  EXPECT_TRUE(validate(make(2, 2, {1, 3, 5, 5}, {1, 3, 5, 5})));
  PartitionOptions strict;
  strict.allow_empty_final = false;
  EXPECT_FALSE(validate(make(2, 2, {1, 3, 5, 5}, {1, 3, 5, 5}), strict));
}

TEST(Validate, RejectsMalformed) {
  EXPECT_FALSE(validate(make(2, 2, {1, 3, 5, 5}, {1, 3, 5})));
  EXPECT_FALSE(validate(make(2, 2, {2, 3, 5, 5}, {1, 3, 5, 5})));
  EXPECT_FALSE(validate(make(2, 2, {1, 4, 3, 5}, {1, 1, 4, 5})));
}

TEST(MaxBlocks, Formula) {
  EXPECT_EQ(max_blocks(2, 2), 3);
  EXPECT_EQ(max_blocks(1, 1), 2);
  EXPECT_EQ(max_blocks(3, 2), 4);
  EXPECT_EQ(max_blocks(12, 1), 24);
}

TEST(Enumerate, SmallestShape) {
  // k = n = 1: full blocks of size 1 or 2; the r = 1 partition of size 2 is
  // never admissible.
  EXPECT_EQ(enumerate_partitions(1, 1).size(), 3u);
  PartitionOptions strict;
  strict.allow_empty_final = false;
  EXPECT_EQ(enumerate_partitions(1, 1, strict).size(), 2u);
  for (const auto& p : enumerate_partitions(1, 1)) EXPECT_EQ(p.r, 2);
}

TEST(Enumerate, MatchesCompositionOracle) {
  for (bool empty : {true, false}) {
    PartitionOptions opts;
    opts.allow_empty_final = empty;
    for (auto [k, n] : {std::pair{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}, {2, 3}, {3, 2}, {1, 4}}) {
      auto got = enumerate_partitions(k, n, opts);
      auto want = oracle::brute_partitions(k, n, empty);
      for (const auto& p : got) EXPECT_TRUE(validate(p, opts));
      EXPECT_TRUE(std::is_sorted(got.begin(), got.end(), endpoint_less)) << k << "," << n;
      std::sort(want.begin(), want.end(), endpoint_less);
      EXPECT_EQ(got, want) << "k=" << k << " n=" << n << " empty=" << empty;
    }
  }
}

TEST(Count, MatchesEnumeration) {
  for (int k = 1; k <= 4; ++k)
    for (int n = 1; k * n <= 6; ++n) {
      const auto counts = count_partitions(k, n);
      std::vector<std::uint64_t> seen(counts.size(), 0);
      for_each_partition(k, n, [&](const RPartition& p) { ++seen[static_cast<std::size_t>(p.r - k)]; });
      EXPECT_EQ(counts, seen) << k << "," << n;
    }
}

TEST(Count, CapRefusesBeforeVisiting) {
  PartitionOptions opts;
  opts.cap = 10;
  std::size_t visited = 0;
  try {
    for_each_partition(2, 2, [&](const RPartition&) { ++visited; }, opts);
    FAIL();
  } catch (const LabError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EnumerationCapExceeded);
  }
  EXPECT_EQ(visited, 0u);
}

TEST(Count, BadShape) { EXPECT_THROW(count_partitions(0, 2), LabError); }

TEST(Identity, EqualWords) {
  const Word u{0, 1, 1, 0, 1, 0};
  const auto r = partition_max_identity(u, u, 2, 3);
  EXPECT_EQ(r.lhs, 6u);
  EXPECT_EQ(r.rhs, 6u);
  EXPECT_TRUE(r.equal);
}

TEST(Identity, DisjointAlphabets) {
  const Word u(6, 0), v(6, 1);
  const auto r = partition_max_identity(u, v, 2, 3);
  EXPECT_EQ(r.lhs, 0u);
  EXPECT_EQ(r.rhs, 0u);
}

TEST(Identity, AllBinaryPairsTwoTwo) {
  const auto parts = enumerate_partitions(2, 2);
  std::size_t pairs = 0;
  for (std::size_t cu = 0; cu < 16; ++cu)
    for (std::size_t cv = 0; cv < 16; ++cv) {
      const Word u = oracle::decode(cu, 4, 2), v = oracle::decode(cv, 4, 2);
      const auto r = partition_max_identity(u, v, parts);
      ASSERT_TRUE(r.equal) << cu << " " << cv;
      ASSERT_EQ(r.lhs, oracle::brute_lcs(u, v));
      ++pairs;
    }
  EXPECT_EQ(pairs, 256u);
}

TEST(Identity, LengthMismatch) {
  const Word u(3, 0), v(4, 0);
  try {
    partition_max_identity(u, v, 2, 2);
    FAIL();
  } catch (const LabError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}

TEST(Bound, TwoTwoRows) {
  const auto rep = count_bound_check(2, 2);
  EXPECT_TRUE(rep.enumerated);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_EQ(rep.rows[0].r, 2);
  EXPECT_EQ(to_string(rep.rows[0].bound), "40");
  EXPECT_EQ(rep.rows[0].count, 0u);
  EXPECT_EQ(rep.rows[1].r, 3);
  EXPECT_EQ(to_string(rep.rows[1].bound), "240");
  EXPECT_EQ(rep.rows[1].count, 31u);
  for (const auto& row : rep.rows) EXPECT_TRUE(row.ok);
}

TEST(Bound, ThreeTwo) {
  const auto rep = count_bound_check(3, 2);
  for (const auto& row : rep.rows) EXPECT_TRUE(row.ok) << row.r;
  EXPECT_TRUE(rep.exp_bound_applicable);
}

TEST(Bound, DpFallbackAboveCap) {
  PartitionOptions opts;
  opts.cap = 100;
  const auto rep = count_bound_check(3, 3, opts);
  EXPECT_FALSE(rep.enumerated);
  std::uint64_t total = 0;
  for (auto c : count_partitions(3, 3)) total += c;
  EXPECT_EQ(rep.total, total);
}

TEST(ToString, U128) {
  EXPECT_EQ(to_string(0), "0");
  EXPECT_EQ(to_string(static_cast<unsigned __int128>(1) << 100), "1267650600228229401496703205376");
}
