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

// AVX2 variants of the byte kernels. This TU is compiled with -mavx2 on
// x86-64; callers must gate on kern::avx2_supported(). Inputs follow the
// zero-padding contract from kernels.hpp, so loops run over whole 32-byte
// blocks with no tail handling.

#include "cmm/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace cmm::kern::avx2 {

const bool compiled = true;

namespace {

inline std::uint32_t popcount_mask(__m256i neq) {
  return std::uint32_t(__builtin_popcount(
      std::uint32_t(_mm256_movemask_epi8(neq))));
}

std::uint32_t mismatch_impl(const std::uint8_t* a, const std::uint8_t* b,
                            std::size_t n) {
  std::uint32_t count = 0;
  const std::size_t blocks = padded_size(n) / kPad;
  const __m256i ff = _mm256_set1_epi8(char(0xff));
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const __m256i va =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + blk * kPad));
    const __m256i vb =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + blk * kPad));
    const __m256i neq = _mm256_xor_si256(_mm256_cmpeq_epi8(va, vb), ff);
    count += popcount_mask(neq);
  }
  return count;
}

// 32-entry byte table lookup. vpshufb indexes within 128-bit lanes, so the
// table halves are broadcast to both lanes and selected by index bit 4.
struct Lut32 {
  __m256i lo;    // lut[0..15] in both lanes
  __m256i hi;    // lut[16..31] in both lanes
  bool narrow;   // all indices < 16, single shuffle suffices

  explicit Lut32(const std::uint8_t* lut, bool idx_below_16) {
    const __m128i l = _mm_loadu_si128(reinterpret_cast<const __m128i*>(lut));
    const __m128i h =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(lut + 16));
    lo = _mm256_broadcastsi128_si256(l);
    hi = _mm256_broadcastsi128_si256(h);
    narrow = idx_below_16;
  }

  inline __m256i lookup(__m256i idx) const {
    if (narrow) return _mm256_shuffle_epi8(lo, idx);
    const __m256i nib = _mm256_and_si256(idx, _mm256_set1_epi8(0x0f));
    const __m256i from_lo = _mm256_shuffle_epi8(lo, nib);
    const __m256i from_hi = _mm256_shuffle_epi8(hi, nib);
    const __m256i use_hi =
        _mm256_slli_epi16(_mm256_and_si256(idx, _mm256_set1_epi8(0x10)), 3);
    return _mm256_blendv_epi8(from_lo, from_hi, use_hi);
  }
};

inline std::uint32_t lut_mismatch_one(const Lut32& t, const std::uint8_t* items,
                                      const std::uint8_t* expect,
                                      std::size_t blocks) {
  std::uint32_t count = 0;
  const __m256i ff = _mm256_set1_epi8(char(0xff));
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const __m256i idx = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(items + blk * kPad));
    const __m256i got = t.lookup(idx);
    const __m256i want = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(expect + blk * kPad));
    const __m256i neq = _mm256_xor_si256(_mm256_cmpeq_epi8(got, want), ff);
    count += popcount_mask(neq);
  }
  return count;
}

std::uint32_t lut_mismatch_impl(const std::uint8_t* items,
                                const std::uint8_t* lut,
                                const std::uint8_t* expect, std::size_t n) {
  // Item values are 1..n; the vector path needs them below 32.
  if (n >= 32) return scalar::funcs.lut_mismatch(items, lut, expect, n);
  const Lut32 t(lut, n < 16);
  return lut_mismatch_one(t, items, expect, padded_size(n) / kPad);
}

std::uint64_t lut_mismatch_rows_impl(const std::uint8_t* rows, std::size_t q,
                                     std::size_t stride,
                                     const std::uint8_t* lut,
                                     const std::uint8_t* expect,
                                     std::size_t n) {
  if (n >= 32)
    return scalar::funcs.lut_mismatch_rows(rows, q, stride, lut, expect, n);
  const Lut32 t(lut, n < 16);
  const std::size_t blocks = padded_size(n) / kPad;
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < q; ++j)
    total += lut_mismatch_one(t, rows + j * stride, expect, blocks);
  return total;
}

}  // namespace

const Funcs funcs = {mismatch_impl, lut_mismatch_impl, lut_mismatch_rows_impl,
                     "avx2"};

}  // namespace cmm::kern::avx2

#else  // !__AVX2__

namespace cmm::kern::avx2 {
const bool compiled = false;
const Funcs funcs = scalar::funcs;
}  // namespace cmm::kern::avx2

#endif
