#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace mlmc {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Counter-based, splittable random stream.
//
// A stream is identified by a root seed and a path of identifiers
// (e.g. level, sample index, purpose). The sequence it produces depends
// only on that identity, never on how many other streams were used
// before it, so samples can be generated in any order and on any thread
// with bit-identical results.
//
// Satisfies UniformRandomBitGenerator, so std distributions can be used.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t root_seed = 0) noexcept;

  // Child stream for `id`. Does not advance this stream.
  RandomStream split(std::uint64_t id) const noexcept;

  result_type operator()() noexcept;

  // Uniform double in [0, 1).
  double uniform() noexcept;
  // Uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal deviate.
  double normal();

  std::uint64_t root_seed() const noexcept { return root_; }
  // Hash of the split path; doubles as a reproducibility tag.
  std::uint64_t path_hash() const noexcept { return path_; }
  int depth() const noexcept { return depth_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  void refill() noexcept;

  std::uint64_t root_ = 0;
  std::uint64_t path_ = 0;
  int depth_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Free-function form of RandomStream::split.
inline RandomStream split_stream(const RandomStream& root, std::uint64_t id) noexcept {
  return root.split(id);
}

}  // namespace mlmc
