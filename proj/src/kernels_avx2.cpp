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

// AVX2 variants. This translation unit is compiled with -mavx2 -mpopcnt on
// x86-64 only; dispatch refuses the table unless the CPU reports AVX2.

#include "kernels_internal.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cstdlib>

namespace anpr::kernels {
namespace {

void threshold_lt(const uint8_t* in, uint8_t* out, size_t n, uint8_t t) {
    size_t i = 0;
    if (t > 0) {
        // Unsigned a < t via min(a, t-1) == a.
        const __m256i tm1 = _mm256_set1_epi8(static_cast<char>(t - 1));
        const __m256i one = _mm256_set1_epi8(1);
        for (; i + 32 <= n; i += 32) {
            __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
            __m256i lt = _mm256_cmpeq_epi8(_mm256_min_epu8(a, tm1), a);
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                                _mm256_and_si256(lt, one));
        }
    } else {
        const __m256i zero = _mm256_setzero_si256();
        for (; i + 32 <= n; i += 32)
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), zero);
    }
    for (; i < n; ++i) out[i] = in[i] < t ? 1 : 0;
}

void or_rows(uint8_t* dst, const uint8_t* src, size_t n) {
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_or_si256(a, b));
    }
    for (; i < n; ++i) dst[i] |= src[i];
}

void window_or(const uint8_t* in, uint8_t* out, size_t n, int radius) {
    const size_t r = static_cast<size_t>(radius);
    if (n == 0) return;
    if (r * 2 >= n) {
        // Window always clipped; fall back to the short path.
        for (size_t i = 0; i < n; ++i) {
            size_t lo = i > r ? i - r : 0;
            size_t hi = i + r < n ? i + r : n - 1;
            uint8_t v = 0;
            for (size_t j = lo; j <= hi; ++j) v |= in[j];
            out[i] = v;
        }
        return;
    }
    // Clipped edges scalar, full windows vectorized with unaligned loads.
    for (size_t i = 0; i < r; ++i) {
        uint8_t v = 0;
        for (size_t j = 0; j <= i + r; ++j) v |= in[j];
        out[i] = v;
    }
    for (size_t i = n - r; i < n; ++i) {
        uint8_t v = 0;
        for (size_t j = i - r; j < n; ++j) v |= in[j];
        out[i] = v;
    }
    size_t i = r;
    const size_t end = n - r;
    for (; i + 32 <= end; i += 32) {
        __m256i acc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i - r));
        for (size_t d = 1; d <= 2 * r; ++d) {
            __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i - r + d));
            acc = _mm256_or_si256(acc, v);
        }
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), acc);
    }
    for (; i < end; ++i) {
        uint8_t v = 0;
        for (size_t j = i - r; j <= i + r; ++j) v |= in[j];
        out[i] = v;
    }
}

void sobel_row(const uint8_t* above, const uint8_t* center, const uint8_t* below,
               uint8_t* out, size_t n, uint8_t threshold) {
    const __m256i two = _mm256_set1_epi16(2);
    const __m256i thr = _mm256_set1_epi16(threshold);
    const __m256i one = _mm256_set1_epi8(1);
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        size_t x = i + 1;
        auto load16 = [](const uint8_t* p) {
            return _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p)));
        };
        __m256i right = _mm256_add_epi16(
            _mm256_add_epi16(load16(above + x + 1), load16(below + x + 1)),
            _mm256_slli_epi16(load16(center + x + 1), 1));
        __m256i left = _mm256_add_epi16(
            _mm256_add_epi16(load16(above + x - 1), load16(below + x - 1)),
            _mm256_slli_epi16(load16(center + x - 1), 1));
        __m256i g = _mm256_sub_epi16(right, left);
        __m256i m = _mm256_srli_epi16(_mm256_add_epi16(_mm256_abs_epi16(g), two), 2);
        // m >= thr on u16 values that fit in i16.
        __m256i ge = _mm256_cmpeq_epi16(_mm256_max_epu16(m, thr), m);
        __m128i packed = _mm_packs_epi16(_mm256_castsi256_si128(ge),
                                         _mm256_extracti128_si256(ge, 1));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i),
                         _mm_and_si128(packed, _mm256_castsi256_si128(one)));
    }
    for (; i < n; ++i) {
        size_t x = i + 1;
        int g = (above[x + 1] - above[x - 1]) + 2 * (center[x + 1] - center[x - 1]) +
                (below[x + 1] - below[x - 1]);
        int m = (std::abs(g) + 2) >> 2;
        out[i] = m >= threshold ? 1 : 0;
    }
}

uint64_t count_set(const uint8_t* bits, size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    __m256i acc = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
    }
    alignas(32) uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) total += bits[i];
    return total;
}

void accum_cols(uint32_t* acc, const uint8_t* row, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m128i b = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(row + i));
        __m256i w = _mm256_cvtepu8_epi32(b);
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + i), _mm256_add_epi32(a, w));
    }
    for (; i < n; ++i) acc[i] += row[i];
}

void hamming_batch(const uint64_t* query, const uint64_t* codes, size_t n,
                   size_t words, uint32_t* out) {
    for (size_t s = 0; s < n; ++s) {
        const uint64_t* code = codes + s * words;
        uint64_t d = 0;
        for (size_t w = 0; w < words; ++w)
            d += static_cast<uint64_t>(_mm_popcnt_u64(query[w] ^ code[w]));
        out[s] = static_cast<uint32_t>(d);
    }
}

}  // namespace

const Table* avx2_table_or_null() {
    static const Table table = {threshold_lt, or_rows,   window_or,     sobel_row,
                                count_set,    accum_cols, hamming_batch, "avx2"};
    return &table;
}

}  // namespace anpr::kernels

#else

namespace anpr::kernels {
const Table* avx2_table_or_null() { return nullptr; }
}  // namespace anpr::kernels

#endif
