/*
 * Copyright (c) 2026, cmmrank authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>

namespace cmm {

using rng_t = std::mt19937_64;

// SplitMix64 finalizer. Decorrelates per-stream seeds derived from one
// master seed so parallel chains are independent of scheduling order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline rng_t make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return rng_t(splitmix64(splitmix64(seed) ^ splitmix64(stream + 1)));
}

inline double uniform01(rng_t& g) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

// Uniform integer in [lo, hi], inclusive.
inline int uniform_int(rng_t& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

inline double normal01(rng_t& g) {
  return std::normal_distribution<double>(0.0, 1.0)(g);
}

}  // namespace cmm
