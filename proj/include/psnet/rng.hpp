// Copyright (c) 2026 The psnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PSNET_RNG_HPP_
#define PSNET_RNG_HPP_

#include <array>
#include <cstdint>

namespace psnet {

/// xoshiro256** seeded through splitmix64. The integer stream and the
/// uniform draws are pure integer arithmetic plus exact IEEE conversions, so
/// equal seeds give equal streams on every platform. normal() goes through
/// libm and is only reproducible per platform.
///
/// Single owner. Use child() to hand independent streams to other tasks.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in the open interval (0, 1); never returns 0 or 1.
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  /// Independent stream derived from this generator's seed and a stream id.
  /// Does not advance this generator.
  SeededRng child(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace psnet

#endif  // PSNET_RNG_HPP_
