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

// Portable reference kernels. These define the semantics; every vector
// variant is tested bit-exact against them.

#include <algorithm>
#include <cstdlib>

#include "anpr/kernels.hpp"

namespace anpr::kernels {
namespace {

void threshold_lt(const uint8_t* in, uint8_t* out, size_t n, uint8_t t) {
    for (size_t i = 0; i < n; ++i) out[i] = in[i] < t ? 1 : 0;
}

void or_rows(uint8_t* dst, const uint8_t* src, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

void window_or(const uint8_t* in, uint8_t* out, size_t n, int radius) {
    // Accumulate shifted copies; the window is clipped at both ends.
    for (size_t i = 0; i < n; ++i) out[i] = in[i];
    for (int d = 1; d <= radius; ++d) {
        for (size_t i = d; i < n; ++i) out[i - d] |= in[i];
        for (size_t i = 0; i + d < n; ++i) out[i + d] |= in[i];
    }
}

void sobel_row(const uint8_t* above, const uint8_t* center, const uint8_t* below,
               uint8_t* out, size_t n, uint8_t threshold) {
    for (size_t i = 0; i < n; ++i) {
        size_t x = i + 1;
        int g = (above[x + 1] - above[x - 1]) + 2 * (center[x + 1] - center[x - 1]) +
                (below[x + 1] - below[x - 1]);
        int m = (std::abs(g) + 2) >> 2;  // round(|g| / 4), max 255
        out[i] = m >= threshold ? 1 : 0;
    }
}

uint64_t count_set(const uint8_t* bits, size_t n) {
    uint64_t total = 0;
    for (size_t i = 0; i < n; ++i) total += bits[i];
    return total;
}

void accum_cols(uint32_t* acc, const uint8_t* row, size_t n) {
    for (size_t i = 0; i < n; ++i) acc[i] += row[i];
}

// SWAR popcount; keeps the reference free of hardware intrinsics.
uint32_t popcount64(uint64_t v) {
    v = v - ((v >> 1) & 0x5555555555555555ULL);
    v = (v & 0x3333333333333333ULL) + ((v >> 2) & 0x3333333333333333ULL);
    v = (v + (v >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
    return static_cast<uint32_t>((v * 0x0101010101010101ULL) >> 56);
}

void hamming_batch(const uint64_t* query, const uint64_t* codes, size_t n,
                   size_t words, uint32_t* out) {
    for (size_t s = 0; s < n; ++s) {
        const uint64_t* code = codes + s * words;
        uint32_t d = 0;
        for (size_t w = 0; w < words; ++w) d += popcount64(query[w] ^ code[w]);
        out[s] = d;
    }
}

}  // namespace

const Table& scalar_table() {
    static const Table table = {threshold_lt, or_rows,   window_or,     sobel_row,
                                count_set,    accum_cols, hamming_batch, "scalar"};
    return table;
}

}  // namespace anpr::kernels
