#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qtomo {

/// Reproducible random stream identified by (seed, stream).
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard;
/// uniform and Gaussian draws are derived here rather than through the
/// implementation-defined <random> distributions so that reported numbers
/// agree across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream. Equal (seed, stream, child) give equal draws.
  SeededRng split(std::uint64_t child) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Circular complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();
  /// Uniform angle on [0, 2pi).
  double angle();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qtomo
