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

#include "cmm/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace cmm::kern {

namespace scalar {

static std::uint32_t mismatch(const std::uint8_t* a, const std::uint8_t* b,
                              std::size_t n) {
  std::uint32_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] != b[i]);
  return c;
}

static std::uint32_t lut_mismatch(const std::uint8_t* items,
                                  const std::uint8_t* lut,
                                  const std::uint8_t* expect, std::size_t n) {
  std::uint32_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (lut[items[i]] != expect[i]);
  return c;
}

static std::uint64_t lut_mismatch_rows(const std::uint8_t* rows, std::size_t q,
                                       std::size_t stride,
                                       const std::uint8_t* lut,
                                       const std::uint8_t* expect,
                                       std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < q; ++j)
    total += lut_mismatch(rows + j * stride, lut, expect, n);
  return total;
}

const Funcs funcs = {mismatch, lut_mismatch, lut_mismatch_rows, "scalar"};

}  // namespace scalar

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return avx2::compiled && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Funcs& active() {
  static const Funcs& chosen = []() -> const Funcs& {
    const char* env = std::getenv("CMM_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0)
      return scalar::funcs;
    if (avx2_supported()) return avx2::funcs;
    return scalar::funcs;
  }();
  return chosen;
}

}  // namespace cmm::kern
