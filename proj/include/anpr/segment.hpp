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

#include <cstdint>
#include <vector>

#include "anpr/classify.hpp"
#include "anpr/image.hpp"

namespace anpr {

enum class Axis : uint8_t { Rows, Columns };

struct Projection {
    Axis axis = Axis::Rows;
    std::vector<uint32_t> counts;  // one entry per row or per column
};

/// Maximal run of strictly positive projection values.
struct Band {
    int start = 0;  // inclusive
    int end = 0;    // inclusive
    int width() const { return end - start + 1; }
    uint64_t area = 0;  // sum of counts inside the run
    uint32_t peak = 0;  // max count inside the run
    bool operator==(const Band&) const = default;
};

struct SegmentConfig {
    int min_char_width = 3;
    int min_char_ink = 10;
    // Glyphs are always normalized to 20x20; see kGlyphSize.

    void validate() const;
};

Projection project(const BinaryImage& img, Axis axis);

/// All maximal strictly-positive runs, in index order.
std::vector<Band> find_bands(const Projection& p);

struct StrippedPlate {
    BinaryImage image;  // the plate restricted to the character band's rows
    int row_start = 0;  // offset of that band in the input plate
};

/// Remove rows outside the character band: take vertical edges of the
/// plate, project them per row, and keep the band with the largest area
/// (ties: wider, then higher peak, then topmost). Throws EmptyPlateError
/// when no band exists. Character rows are distinguished from narrow
/// noise streaks by area, which favors wide bands over tall ones.
StrippedPlate strip_noise_rows(const BinaryImage& plate);

/// Column-project the ink, split into bands, and drop slivers narrower
/// than min_char_width or with less ink than min_char_ink. Each box spans
/// its band's columns and the tight row extent of ink inside them. Boxes
/// come back left to right; the list may be empty.
std::vector<BoundingBox> split_characters(const BinaryImage& plate,
                                          const SegmentConfig& cfg);

/// Nearest-neighbor resample to 20x20, anisotropic. Output pixel (i, j)
/// reads source pixel (floor((i+0.5)w/20), floor((j+0.5)h/20)).
/// Throws SizeError on a zero-dimension glyph.
GlyphSample normalize_glyph(const BinaryImage& glyph);

}  // namespace anpr
