#include "lcslab/partitions.hpp"

#include "lcslab/error.hpp"
#include "lcslab/lcs_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lcslab {

namespace {

using u128 = unsigned __int128;
constexpr u128 kU128Max = ~u128{0};

u128 sat_mul(u128 a, u128 b) {
  if (a != 0 && b > kU128Max / a) return kU128Max;
  return a * b;
}

u128 binomial(std::uint64_t m, std::uint64_t j) {
  j = std::min(j, m - j);
  u128 c = 1;
  for (std::uint64_t i = 1; i <= j; ++i) {
    // c·(m − j + i) is divisible by i at every step.
    const u128 num = sat_mul(c, m - j + i);
    if (num == kU128Max) return kU128Max;
    c = num / i;
  }
  return c;
}

void check_shape(int k, int n) {
  if (k < 1 || n < 1) throw LabError(ErrorKind::PreconditionViolated, "partitions need k, n >= 1");
}

bool final_ok(int final_size, int n, const PartitionOptions& opts) {
  return final_size < 2 * n && (opts.allow_empty_final || final_size > 0);
}

// Depth-first generator over block endpoints. done[j] marks the endpoints
// (a, b) from which exactly j more full blocks and a valid final block can
// still finish, so every branch taken yields at least one partition.
class Enumerator {
 public:
  Enumerator(int k, int n, const PartitionOptions& opts,
             const std::function<void(const RPartition&)>& visit)
      : total_(k * n), n_(n), side_(static_cast<std::size_t>(k * n + 1)), visit_(visit) {
    part_.k = k;
    part_.n = n;
    const int rmax = max_blocks(k, n);
    done_.assign(static_cast<std::size_t>(rmax), std::vector<char>(side_ * side_, 0));
    for (int a = 0; a <= total_; ++a)
      for (int b = 0; b <= total_; ++b)
        done_[0][at(a, b)] = final_ok((total_ - a) + (total_ - b), n, opts) ? 1 : 0;
    for (int j = 1; j < rmax; ++j)
      for (int a = 0; a <= total_; ++a)
        for (int b = 0; b <= total_; ++b) {
          char ok = 0;
          for (int s : {2 * n - 1, 2 * n})
            for (int dx = 0; dx <= s && !ok; ++dx) {
              const int dy = s - dx;
              if (a + dx <= total_ && b + dy <= total_ && done_[j - 1][at(a + dx, b + dy)]) ok = 1;
            }
          done_[j][at(a, b)] = ok;
        }
  }

  void run(int r) {
    if (!done_[static_cast<std::size_t>(r - 1)][at(0, 0)]) return;
    part_.r = r;
    part_.nu.assign(static_cast<std::size_t>(r + 1), 1);
    part_.tau.assign(static_cast<std::size_t>(r + 1), 1);
    part_.nu[r] = part_.tau[r] = total_ + 1;
    step(1);
  }

 private:
  std::size_t at(int a, int b) const {
    return static_cast<std::size_t>(a) * side_ + static_cast<std::size_t>(b);
  }

  void step(int j) {
    const int r = part_.r;
    if (j == r) {
      visit_(part_);
      return;
    }
    const int a = part_.nu[j - 1] - 1;
    const int b = part_.tau[j - 1] - 1;
    const auto& next = done_[static_cast<std::size_t>(r - 1 - j)];
    for (int dx = 0; dx <= 2 * n_ && a + dx <= total_; ++dx) {
      for (int s : {2 * n_ - 1, 2 * n_}) {
        const int dy = s - dx;
        if (dy < 0 || b + dy > total_ || !next[at(a + dx, b + dy)]) continue;
        part_.nu[j] = a + dx + 1;
        part_.tau[j] = b + dy + 1;
        step(j + 1);
      }
    }
  }

  int total_;
  int n_;
  std::size_t side_;
  const std::function<void(const RPartition&)>& visit_;
  std::vector<std::vector<char>> done_;
  RPartition part_;
};

}  // namespace

int max_blocks(int k, int n) {
  const int num = 2 * k * n;
  const int den = 2 * n - 1;
  return (num + den - 1) / den;
}

bool validate(const RPartition& part, const PartitionOptions& opts) {
  const int k = part.k;
  const int n = part.n;
  const int r = part.r;
  if (k < 1 || n < 1 || r < 1) return false;
  if (part.nu.size() != static_cast<std::size_t>(r + 1) ||
      part.tau.size() != static_cast<std::size_t>(r + 1)) {
    return false;
  }
  if (r < k || r > max_blocks(k, n)) return false;
  const int end = k * n + 1;
  if (part.nu.front() != 1 || part.tau.front() != 1 || part.nu.back() != end ||
      part.tau.back() != end) {
    return false;
  }
  for (int j = 0; j < r; ++j) {
    const int dx = part.nu[j + 1] - part.nu[j];
    const int dy = part.tau[j + 1] - part.tau[j];
    if (dx < 0 || dy < 0) return false;
    const int s = dx + dy;
    if (j + 1 < r) {
      if (s != 2 * n - 1 && s != 2 * n) return false;
    } else if (!final_ok(s, n, opts)) {
      return false;
    }
  }
  return true;
}

std::vector<std::uint64_t> count_partitions(int k, int n, const PartitionOptions& opts) {
  check_shape(k, n);
  const int total = k * n;
  const int rmax = max_blocks(k, n);
  const auto side = static_cast<std::size_t>(total + 1);
  // ways[a·side + b]: block sequences whose full blocks end at (a, b).
  std::vector<u128> ways(side * side, 0), next(side * side, 0);
  ways[0] = 1;
  std::vector<std::uint64_t> counts;
  for (int full = 0; full + 1 <= rmax; ++full) {
    const int r = full + 1;
    if (r >= k) {
      u128 c = 0;
      for (int a = 0; a <= total; ++a)
        for (int b = 0; b <= total; ++b)
          if (final_ok((total - a) + (total - b), n, opts)) c += ways[a * side + b];
      counts.push_back(c > std::numeric_limits<std::uint64_t>::max()
                           ? std::numeric_limits<std::uint64_t>::max()
                           : static_cast<std::uint64_t>(c));
    }
    std::fill(next.begin(), next.end(), 0);
    for (int a = 0; a <= total; ++a)
      for (int b = 0; b <= total; ++b) {
        const u128 w = ways[a * side + b];
        if (w == 0) continue;
        for (int s : {2 * n - 1, 2 * n})
          for (int dx = 0; dx <= s; ++dx) {
            const int dy = s - dx;
            if (a + dx > total || b + dy > total) continue;
            next[(a + dx) * side + (b + dy)] += w;
          }
      }
    ways.swap(next);
  }
  return counts;
}

void for_each_partition(int k, int n, const std::function<void(const RPartition&)>& visit,
                        const PartitionOptions& opts) {
  check_shape(k, n);
  std::uint64_t total = 0;
  for (auto c : count_partitions(k, n, opts)) {
    total = c > std::numeric_limits<std::uint64_t>::max() - total
                ? std::numeric_limits<std::uint64_t>::max()
                : total + c;
  }
  if (total > opts.cap) {
    throw LabError(ErrorKind::EnumerationCapExceeded,
                   "B_{k,n} has " + std::to_string(total) + " partitions, cap is " +
                       std::to_string(opts.cap));
  }
  Enumerator gen(k, n, opts, visit);
  for (int r = k; r <= max_blocks(k, n); ++r) gen.run(r);
}

std::vector<RPartition> enumerate_partitions(int k, int n, const PartitionOptions& opts) {
  std::vector<RPartition> out;
  for_each_partition(k, n, [&](const RPartition& p) { out.push_back(p); }, opts);
  return out;
}

MaxIdentityReport partition_max_identity(std::span<const Letter> u, std::span<const Letter> v,
                                         std::span<const RPartition> parts) {
  MaxIdentityReport report;
  report.lhs = lcs_length(u, v).length;
  for (const auto& p : parts) report.rhs = std::max(report.rhs, lcs_partitioned(u, v, p));
  report.equal = report.lhs == report.rhs;
  return report;
}

MaxIdentityReport partition_max_identity(std::span<const Letter> u, std::span<const Letter> v,
                                         int k, int n, const PartitionOptions& opts) {
  check_shape(k, n);
  const auto total = static_cast<std::size_t>(k * n);
  if (u.size() != total || v.size() != total) {
    throw LabError(ErrorKind::LengthMismatch, "partition_max_identity needs |u| = |v| = kn");
  }
  const auto parts = enumerate_partitions(k, n, opts);
  return partition_max_identity(u, v, parts);
}

CountBoundReport count_bound_check(int k, int n, const PartitionOptions& opts) {
  check_shape(k, n);
  CountBoundReport report;
  report.k = k;
  report.n = n;
  const int rmax = max_blocks(k, n);
  std::vector<std::uint64_t> counts = count_partitions(k, n, opts);
  std::uint64_t dp_total = 0;
  for (auto c : counts) dp_total = c > ~std::uint64_t{0} - dp_total ? ~std::uint64_t{0} : dp_total + c;
  report.enumerated = dp_total <= opts.cap;
  if (report.enumerated) {
    std::fill(counts.begin(), counts.end(), 0);
    for_each_partition(k, n, [&](const RPartition& p) { ++counts[static_cast<std::size_t>(p.r - k)]; }, opts);
  }
  for (int r = k; r <= rmax; ++r) {
    CountBoundRow row;
    row.r = r;
    row.count = counts[r - k];
    const auto nk = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(k);
    u128 bound = sat_mul(u128{1} << (r - 1), 2 * static_cast<u128>(n));
    bound = sat_mul(bound, binomial(nk + r - 1, static_cast<std::uint64_t>(r - 1)));
    row.bound = bound;
    row.ok = static_cast<u128>(row.count) <= bound;
    report.total += row.count;
    report.rows.push_back(row);
  }
  report.exp_bound_applicable = k > n;
  report.exp_bound_ok =
      report.total == 0 || std::log(static_cast<double>(report.total)) <= 10.0 * k * std::log(n);
  return report;
}

std::string to_string(unsigned __int128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

}  // namespace lcslab
