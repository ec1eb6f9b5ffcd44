// Copyright 2026-present the anpr project
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

// NEON variants for AArch64, where the vector unit is baseline. Kernels
// without a worthwhile vector form borrow the scalar implementation.

#include "kernels_internal.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace anpr::kernels {
namespace {

void threshold_lt(const uint8_t* in, uint8_t* out, size_t n, uint8_t t) {
    const uint8x16_t vt = vdupq_n_u8(t);
    const uint8x16_t one = vdupq_n_u8(1);
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        uint8x16_t a = vld1q_u8(in + i);
        vst1q_u8(out + i, vandq_u8(vcltq_u8(a, vt), one));
    }
    for (; i < n; ++i) out[i] = in[i] < t ? 1 : 0;
}

void or_rows(uint8_t* dst, const uint8_t* src, size_t n) {
    size_t i = 0;
    for (; i + 16 <= n; i += 16)
        vst1q_u8(dst + i, vorrq_u8(vld1q_u8(dst + i), vld1q_u8(src + i)));
    for (; i < n; ++i) dst[i] |= src[i];
}

uint64_t count_set(const uint8_t* bits, size_t n) {
    uint64_t total = 0;
    size_t i = 0;
    for (; i + 16 <= n; i += 16) total += vaddlvq_u8(vld1q_u8(bits + i));
    for (; i < n; ++i) total += bits[i];
    return total;
}

void hamming_batch(const uint64_t* query, const uint64_t* codes, size_t n,
                   size_t words, uint32_t* out) {
    for (size_t s = 0; s < n; ++s) {
        const uint64_t* code = codes + s * words;
        uint64_t d = 0;
        size_t w = 0;
        for (; w + 2 <= words; w += 2) {
            uint8x16_t x = veorq_u8(vld1q_u8(reinterpret_cast<const uint8_t*>(query + w)),
                                    vld1q_u8(reinterpret_cast<const uint8_t*>(code + w)));
            d += vaddlvq_u8(vcntq_u8(x));
        }
        for (; w < words; ++w) d += __builtin_popcountll(query[w] ^ code[w]);
        out[s] = static_cast<uint32_t>(d);
    }
}

}  // namespace

const Table* neon_table_or_null() {
    static const Table table = [] {
        Table t = scalar_table();
        t.threshold_lt = threshold_lt;
        t.or_rows = or_rows;
        t.count_set = count_set;
        t.hamming_batch = hamming_batch;
        t.name = "neon";
        return t;
    }();
    return &table;
}

}  // namespace anpr::kernels

#else

namespace anpr::kernels {
const Table* neon_table_or_null() { return nullptr; }
}  // namespace anpr::kernels

#endif
