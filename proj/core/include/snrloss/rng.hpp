#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

#include "snrloss/hermitian.hpp"

namespace snrloss {

/// Counter-based random stream (Philox4x32-10). The seed is the cipher key and
/// the stream id occupies the upper half of the 128-bit counter, so every
/// (seed, stream_id) pair addresses an independent, reproducible sequence.
/// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Circular complex normal with E|z|^2 = 1.
  Complex complex_normal();
  /// Gamma(shape, 1).
  double gamma(double shape);
  std::uint64_t poisson(double mean);

  /// Rows x cols matrix of i.i.d. complex normals.
  ComplexMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int cursor_ = 4;
  std::normal_distribution<double> normal_;
};

}  // namespace snrloss
