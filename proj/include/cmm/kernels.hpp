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

#include <cstddef>
#include <cstdint>
#include <vector>

// Low-level byte kernels behind the rank-wise Hamming comparisons. These
// sit in the inner loops of exact enumeration and importance sampling, so
// scalar reference versions and AVX2 variants are provided and selected at
// runtime. The Kendall path builds contingency tables (scatter increments)
// and is not data-parallel; it stays scalar in distance.cpp.
//
// Buffer contract: all byte arrays are zero-padded to padded_size() bytes,
// and lookup tables keep lut[0] == 0 so padding lanes never contribute a
// mismatch. distance.cpp owns the padding; tests exercise the contract.
namespace cmm::kern {

constexpr std::size_t kPad = 32;

constexpr std::size_t padded_size(std::size_t n) {
  return (n + kPad - 1) / kPad * kPad;
}

inline std::vector<std::uint8_t> padded_bytes(std::size_t n) {
  return std::vector<std::uint8_t>(padded_size(n + 1), 0);
}

// count of i in [0, n) with a[i] != b[i]
using mismatch_fn = std::uint32_t (*)(const std::uint8_t* a,
                                      const std::uint8_t* b, std::size_t n);

// count of i in [0, n) with lut[items[i]] != expect[i]
using lut_mismatch_fn = std::uint32_t (*)(const std::uint8_t* items,
                                          const std::uint8_t* lut,
                                          const std::uint8_t* expect,
                                          std::size_t n);

// sum of lut_mismatch over q rows of a row-major matrix with given stride
using lut_mismatch_rows_fn = std::uint64_t (*)(const std::uint8_t* rows,
                                               std::size_t q,
                                               std::size_t stride,
                                               const std::uint8_t* lut,
                                               const std::uint8_t* expect,
                                               std::size_t n);

struct Funcs {
  mismatch_fn mismatch;
  lut_mismatch_fn lut_mismatch;
  lut_mismatch_rows_fn lut_mismatch_rows;
  const char* name;
};

namespace scalar {
extern const Funcs funcs;
}
// Valid to call only when avx2_supported() is true. The LUT fast path
// covers item values < 32; larger n falls back to the scalar loop inside.
namespace avx2 {
extern const Funcs funcs;
extern const bool compiled;  // this build carries the AVX2 variants
}

bool avx2_supported();

// AVX2 when the CPU has it, unless CMM_KERNELS=scalar is set in the
// environment. Resolved once.
const Funcs& active();

}  // namespace cmm::kern
