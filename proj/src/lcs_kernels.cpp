#include "lcslab/lcs_kernels.hpp"

#include "lcslab/error.hpp"
#include "lcslab/partitions.hpp"

#include <algorithm>
#include <bit>

namespace lcslab {

namespace {

using Cell = std::uint32_t;

// One DP row: row[j] = max(prev[j], row[j−1], prev[j−1] + [a = v_j]). The
// first pass has no loop-carried dependency; the second is a running max.
inline void dp_row(const Cell* __restrict prev, Cell* __restrict row, Letter a, std::span<const Letter> v) {
  const std::size_t n = v.size();
  row[0] = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    const Cell diag = prev[j - 1] + static_cast<Cell>(a == v[j - 1]);
    row[j] = prev[j] > diag ? prev[j] : diag;
  }
  Cell run = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    run = row[j] > run ? row[j] : run;
    row[j] = run;
  }
}

std::uint64_t lcs_quadratic(std::span<const Letter> u, std::span<const Letter> v) {
  const std::size_t m = u.size();
  const std::size_t n = v.size();
  if (m == 0 || n == 0) return 0;
  thread_local std::vector<Cell> table;
  const std::size_t width = n + 1;
  table.assign((m + 1) * width, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    dp_row(table.data() + (i - 1) * width, table.data() + i * width, u[i - 1], v);
  }
  return table[m * width + n];
}

std::uint64_t lcs_linear(std::span<const Letter> u, std::span<const Letter> v) {
  if (u.size() < v.size()) std::swap(u, v);
  const std::size_t n = v.size();
  if (n == 0) return 0;
  thread_local std::vector<Cell> prev, row;
  prev.assign(n + 1, 0);
  row.assign(n + 1, 0);
  for (const Letter a : u) {
    dp_row(prev.data(), row.data(), a, v);
    prev.swap(row);
  }
  return prev[n];
}

}  // namespace

std::uint64_t BitParallelLcs::operator()(std::span<const Letter> u, std::span<const Letter> v) {
  const std::size_t m = u.size();
  if (m == 0 || v.empty()) return 0;
  Letter top = 0;
  for (Letter c : u) top = std::max(top, c);
  for (Letter c : v) top = std::max(top, c);
  const std::size_t letters = static_cast<std::size_t>(top) + 1;
  if (letters > opts_.max_alphabet) {
    throw LabError(ErrorKind::AlphabetTooLarge,
                   "bit-parallel LCS supports at most " + std::to_string(opts_.max_alphabet) +
                       " letters");
  }
  const std::size_t words = (m + 63) / 64;
  masks_.assign(letters * words, 0);
  for (std::size_t i = 0; i < m; ++i) {
    masks_[u[i] * words + i / 64] |= std::uint64_t{1} << (i % 64);
  }
  state_.assign(words, ~std::uint64_t{0});
  std::uint64_t* V = state_.data();
  for (const Letter c : v) {
    const std::uint64_t* M = masks_.data() + c * words;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t x = V[w];
      const std::uint64_t t = x & M[w];
      const std::uint64_t s1 = x + t;
      const std::uint64_t s2 = s1 + carry;
      carry = static_cast<std::uint64_t>(s1 < x) | static_cast<std::uint64_t>(s2 < s1);
      V[w] = s2 | (x - t);
    }
  }
  std::uint64_t length = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t zeros = ~V[w];
    if (w + 1 == words && m % 64 != 0) zeros &= (std::uint64_t{1} << (m % 64)) - 1;
    length += static_cast<std::uint64_t>(std::popcount(zeros));
  }
  return length;
}

LcsResult lcs_length(std::span<const Letter> u, std::span<const Letter> v, LcsKernel kernel,
                     BitParallelOptions opts) {
  LcsResult out;
  out.kernel = kernel;
  switch (kernel) {
    case LcsKernel::quadratic:
      out.length = lcs_quadratic(u, v);
      break;
    case LcsKernel::linear_space:
      out.length = lcs_linear(u, v);
      break;
    case LcsKernel::bit_parallel: {
      thread_local BitParallelLcs scratch;
      out.length = opts.max_alphabet == BitParallelOptions{}.max_alphabet
                       ? scratch(u, v)
                       : BitParallelLcs(opts)(u, v);
      break;
    }
  }
  return out;
}

std::uint64_t lcs_restricted(std::span<const Letter> u, std::span<const Letter> v, std::size_t K) {
  if (K > std::min(u.size(), v.size())) {
    throw LabError(ErrorKind::PreconditionViolated, "cutoff K exceeds the word length");
  }
  return lcs_length(u.subspan(K), v.subspan(K)).length;
}

std::uint64_t lcs_partitioned(std::span<const Letter> u, std::span<const Letter> v,
                              const RPartition& part) {
  const std::size_t total = static_cast<std::size_t>(part.k) * static_cast<std::size_t>(part.n);
  // Any monotone decomposition is summed; the block-size rules belong to
  // partitions::validate.
  bool fits = u.size() == total && v.size() == total && part.r >= 1 &&
              part.nu.size() == static_cast<std::size_t>(part.r + 1) &&
              part.tau.size() == static_cast<std::size_t>(part.r + 1) && part.nu.front() == 1 &&
              part.tau.front() == 1 && part.nu.back() == static_cast<int>(total) + 1 &&
              part.tau.back() == static_cast<int>(total) + 1;
  for (int i = 0; fits && i < part.r; ++i) {
    fits = part.nu[i] <= part.nu[i + 1] && part.tau[i] <= part.tau[i + 1];
  }
  if (!fits) throw LabError(ErrorKind::InvalidPartition, "partition does not fit these words");
  std::uint64_t sum = 0;
  for (int i = 0; i < part.r; ++i) {
    const auto ub = static_cast<std::size_t>(part.nu[i] - 1);
    const auto ue = static_cast<std::size_t>(part.nu[i + 1] - 1);
    const auto vb = static_cast<std::size_t>(part.tau[i] - 1);
    const auto ve = static_cast<std::size_t>(part.tau[i + 1] - 1);
    sum += lcs_length(u.subspan(ub, ue - ub), v.subspan(vb, ve - vb)).length;
  }
  return sum;
}

std::uint64_t diagonal_match_count(std::span<const Letter> x, std::span<const Letter> y,
                                   std::size_t k) {
  if (x.size() != y.size()) {
    throw LabError(ErrorKind::LengthMismatch, "diagonal_match_count needs equal lengths");
  }
  if (k < 1 || x.size() < k + 1) {
    throw LabError(ErrorKind::PreconditionViolated, "diagonal_match_count needs k >= 1 and n >= k + 1");
  }
  std::uint64_t count = 0;
  for (std::size_t j = 1; j * k < y.size(); ++j) {
    if (x[(j - 1) * k] == y[j * k]) ++count;
  }
  return count;
}

}  // namespace lcslab
