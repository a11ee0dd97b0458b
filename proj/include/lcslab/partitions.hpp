#pragma once

#include "lcslab/hmm_model.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lcslab {

/**
 * Block decomposition (ν, τ) of two words of length kn into r blocks.
 * Positions are 1-based: block i covers u[ν_i .. ν_{i+1} − 1] and
 * v[τ_i .. τ_{i+1} − 1]. The first r − 1 blocks have combined size 2n − 1
 * or 2n; the last has combined size below 2n.
 */
struct RPartition {
  std::vector<int> nu;
  std::vector<int> tau;
  int r = 0;
  int k = 0;
  int n = 0;

  friend bool operator==(const RPartition&, const RPartition&) = default;
};

struct PartitionOptions {
  /// Whether the final block may have combined size 0.
  bool allow_empty_final = true;
  /// Maximum number of partitions a single enumeration may produce.
  std::uint64_t cap = 10'000'000;
};

/// ⌈2kn / (2n − 1)⌉, the largest admissible block count.
int max_blocks(int k, int n);

bool validate(const RPartition& part, const PartitionOptions& opts = {});

/// |B^r_{k,n}| for r = k .. max_blocks(k, n) by dynamic programming over
/// block endpoints (no enumeration). Entry i holds r = k + i.
std::vector<std::uint64_t> count_partitions(int k, int n, const PartitionOptions& opts = {});

/// Streams every partition in B_{k,n} once, ordered by r and then
/// lexicographically by the endpoint sequence (ν_2, τ_2, ν_3, τ_3, ...).
/// Throws EnumerationCapExceeded before visiting anything when the total
/// exceeds opts.cap.
void for_each_partition(int k, int n, const std::function<void(const RPartition&)>& visit,
                        const PartitionOptions& opts = {});

std::vector<RPartition> enumerate_partitions(int k, int n, const PartitionOptions& opts = {});

struct MaxIdentityReport {
  std::uint64_t lhs = 0;
  std::uint64_t rhs = 0;
  bool equal = false;
};

/// LCS(u, v) against the maximum over B_{k,n} of the blockwise LCS sum.
MaxIdentityReport partition_max_identity(std::span<const Letter> u, std::span<const Letter> v,
                                         int k, int n, const PartitionOptions& opts = {});

/// Same, against a pre-enumerated partition set.
MaxIdentityReport partition_max_identity(std::span<const Letter> u, std::span<const Letter> v,
                                         std::span<const RPartition> parts);

struct CountBoundRow {
  int r = 0;
  std::uint64_t count = 0;
  /// 2^{r−1}·2n·C(nk + r − 1, r − 1), saturated at 2^128 − 1.
  unsigned __int128 bound = 0;
  bool ok = false;
};

struct CountBoundReport {
  int k = 0;
  int n = 0;
  std::vector<CountBoundRow> rows;
  std::uint64_t total = 0;
  /// Counts come from enumeration when the total fits opts.cap and from
  /// count_partitions otherwise.
  bool enumerated = false;
  /// The exp(10 k ln n) bound on |B_{k,n}| is only claimed for k > n.
  bool exp_bound_applicable = false;
  bool exp_bound_ok = false;
};

/// Counts B^r_{k,n} and checks every count against the binomial bound.
CountBoundReport count_bound_check(int k, int n, const PartitionOptions& opts = {});

std::string to_string(unsigned __int128 value);

}  // namespace lcslab
