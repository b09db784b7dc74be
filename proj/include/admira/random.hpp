#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace admira {

/// splitmix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable generator with a platform-independent normal transform.
///
/// Uniforms come from std::mt19937_64 (its output sequence is fixed by the
/// standard). Normals use the Box-Muller transform on those uniforms rather
/// than std::normal_distribution, whose algorithm varies between standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer on [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);

  double normal();

  std::vector<double> normal_vector(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace admira
