// Copyright 2026 The bornsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace bornsim {

/// Reproducible random stream identified by (seed, stream id).
///
/// The raw engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard, so a given (seed, stream id) yields the same draws on every
/// platform. Normals come from the Box-Muller transform and are produced in
/// pairs: every call to normal_pair() consumes exactly two raw 64-bit draws.
/// No library distribution objects are involved, since their algorithms are
/// implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform on the open interval (0, 1); one raw draw.
  double uniform();

  /// Two independent standard normals; two raw draws.
  std::pair<double, double> normal_pair();

  /// (x + i y)/sqrt(2) with x, y independent standard normals; two raw draws.
  std::complex<double> standard_complex();

  /// Independent child stream, e.g. one per grid point or ensemble member.
  RngStream substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bornsim
