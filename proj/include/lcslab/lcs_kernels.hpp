#pragma once

#include "lcslab/hmm_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lcslab {

struct RPartition;

enum class LcsKernel { quadratic, linear_space, bit_parallel };

struct LcsResult {
  std::uint64_t length = 0;
  LcsKernel kernel = LcsKernel::bit_parallel;
};

struct BitParallelOptions {
  /// Largest alphabet for which per-letter match masks are built.
  std::size_t max_alphabet = 256;
};

/**
 * Bit-parallel LCS length (Allison–Dix / Hyyrö update
 * V' = (V + (V & M)) | (V & ~M)) over 64-bit blocks. Owns its scratch
 * buffers, so one instance per thread can be reused across calls.
 */
class BitParallelLcs {
 public:
  explicit BitParallelLcs(BitParallelOptions opts = {}) : opts_(opts) {}

  std::uint64_t operator()(std::span<const Letter> u, std::span<const Letter> v);

 private:
  BitParallelOptions opts_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::uint64_t> state_;
};

LcsResult lcs_length(std::span<const Letter> u, std::span<const Letter> v,
                     LcsKernel kernel = LcsKernel::bit_parallel, BitParallelOptions opts = {});

/// LCS of the suffixes u[K..] and v[K..] (letters with 1-based index > K).
std::uint64_t lcs_restricted(std::span<const Letter> u, std::span<const Letter> v, std::size_t K);

/// Σ over blocks of LCS(u[ν_i..ν_{i+1}−1]; v[τ_i..τ_{i+1}−1]). Accepts any
/// monotone decomposition covering both words, including r = 1; block-size
/// rules are checked by validate, not here.
std::uint64_t lcs_partitioned(std::span<const Letter> u, std::span<const Letter> v,
                              const RPartition& part);

/// Number of j ≥ 1 with x_{(j−1)k+1} = y_{jk+1} (1-based), the diagonal
/// witness that lower-bounds LC.
std::uint64_t diagonal_match_count(std::span<const Letter> x, std::span<const Letter> y,
                                   std::size_t k);

}  // namespace lcslab
