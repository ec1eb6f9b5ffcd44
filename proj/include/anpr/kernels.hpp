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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace anpr::kernels {

// Each entry is a row-oriented primitive with a scalar reference
// implementation and optional vector variants. Variants must be
// bit-identical to the scalar kernel on every input; the test suite
// enforces this exhaustively. Anything not on the hot path (bilateral,
// histogram equalization, integral image) stays scalar.

struct Table {
    // out[i] = in[i] < t ? 1 : 0
    void (*threshold_lt)(const uint8_t* in, uint8_t* out, size_t n, uint8_t t);

    // dst[i] |= src[i] over byte-bits in {0, 1}
    void (*or_rows)(uint8_t* dst, const uint8_t* src, size_t n);

    // Horizontal sliding OR: out[i] = OR of in[max(0,i-r) .. min(n-1,i+r)].
    // in and out must not alias.
    void (*window_or)(const uint8_t* in, uint8_t* out, size_t n, int radius);

    // Vertical-edge response for one row. above/center/below are full input
    // rows of an 8-bit image; out[i] covers column i+1 for i in [0, n) with
    // n = width - 2. The response uses weights (-1,0,+1 / -2,0,+2 / -1,0,+1),
    // is scaled as (|g| + 2) >> 2, and out[i] = scaled >= threshold ? 1 : 0.
    void (*sobel_row)(const uint8_t* above, const uint8_t* center,
                      const uint8_t* below, uint8_t* out, size_t n,
                      uint8_t threshold);

    // Sum of byte values; for bit rows this is the population count.
    uint64_t (*count_set)(const uint8_t* bits, size_t n);

    // acc[i] += row[i], widening u8 to u32. Used for column projections.
    void (*accum_cols)(uint32_t* acc, const uint8_t* row, size_t n);

    // Hamming distances between one packed query and n packed codes.
    // Every code occupies `words` consecutive u64 values.
    void (*hamming_batch)(const uint64_t* query, const uint64_t* codes,
                          size_t n, size_t words, uint32_t* out);

    const char* name;
};

const Table& scalar_table();

// x86-64 builds also compile an AVX2 variant; AArch64 builds a NEON one.
// Returns every table the current CPU can actually run.
std::vector<const Table*> available_tables();

// Active table. Picks the widest variant the CPU supports unless the
// ANPR_SIMD environment variable ("scalar", "avx2", "neon") forces one;
// an unknown or unsupported value falls back to scalar.
const Table& select();

}  // namespace anpr::kernels
