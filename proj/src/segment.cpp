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

#include "anpr/segment.hpp"

#include <algorithm>

#include "anpr/errors.hpp"
#include "anpr/kernels.hpp"
#include "anpr/locate.hpp"

namespace anpr {

void SegmentConfig::validate() const {
    if (min_char_width < 1) throw SizeError("min_char_width must be >= 1");
    if (min_char_ink < 1) throw SizeError("min_char_ink must be >= 1");
}

Projection project(const BinaryImage& img, Axis axis) {
    const auto& T = kernels::select();
    Projection p;
    p.axis = axis;
    if (axis == Axis::Rows) {
        p.counts.resize(img.height());
        for (int y = 0; y < img.height(); ++y)
            p.counts[y] = static_cast<uint32_t>(T.count_set(img.row(y), img.width()));
    } else {
        p.counts.assign(img.width(), 0);
        for (int y = 0; y < img.height(); ++y)
            T.accum_cols(p.counts.data(), img.row(y), img.width());
    }
    return p;
}

std::vector<Band> find_bands(const Projection& p) {
    std::vector<Band> bands;
    const size_t n = p.counts.size();
    size_t i = 0;
    while (i < n) {
        if (p.counts[i] == 0) {
            ++i;
            continue;
        }
        Band b;
        b.start = static_cast<int>(i);
        while (i < n && p.counts[i] > 0) {
            b.area += p.counts[i];
            b.peak = std::max(b.peak, p.counts[i]);
            ++i;
        }
        b.end = static_cast<int>(i) - 1;
        bands.push_back(b);
    }
    return bands;
}

StrippedPlate strip_noise_rows(const BinaryImage& plate) {
    BinaryImage edges = sobel_vertical(plate, 128);
    Projection rows = project(edges, Axis::Rows);
    std::vector<Band> bands = find_bands(rows);
    if (bands.empty()) throw EmptyPlateError("no character band in plate");

    // Largest area wins; a character band accumulates edges across many
    // columns, so it beats tall narrow streaks. Remaining ties prefer the
    // wider band, then the higher peak, then the topmost.
    const Band* best = &bands[0];
    for (const Band& b : bands) {
        if (b.area != best->area) {
            if (b.area > best->area) best = &b;
        } else if (b.width() != best->width()) {
            if (b.width() > best->width()) best = &b;
        } else if (b.peak != best->peak) {
            if (b.peak > best->peak) best = &b;
        }
        // Equal on all three keys: keep the earlier (topmost) band.
    }
    BoundingBox rows_box{0, best->start, plate.width(), best->width()};
    return {crop(plate, rows_box), best->start};
}

std::vector<BoundingBox> split_characters(const BinaryImage& plate,
                                          const SegmentConfig& cfg) {
    cfg.validate();
    Projection cols = project(plate, Axis::Columns);
    std::vector<BoundingBox> boxes;
    for (const Band& b : find_bands(cols)) {
        if (b.width() < cfg.min_char_width) continue;
        if (b.area < static_cast<uint64_t>(cfg.min_char_ink)) continue;
        // Tight row extent of the ink inside the band's columns.
        int top = plate.height();
        int bottom = -1;
        for (int y = 0; y < plate.height(); ++y) {
            const uint8_t* row = plate.row(y);
            for (int x = b.start; x <= b.end; ++x) {
                if (row[x]) {
                    top = std::min(top, y);
                    bottom = std::max(bottom, y);
                    break;
                }
            }
        }
        boxes.push_back({b.start, top, b.width(), bottom - top + 1});
    }
    return boxes;
}

GlyphSample normalize_glyph(const BinaryImage& glyph) {
    if (glyph.width() < 1 || glyph.height() < 1)
        throw SizeError("glyph must be non-empty");
    BinaryImage scaled = resize_nearest(glyph, kGlyphSize, kGlyphSize);
    GlyphSample sample;
    sample.pixels = std::move(scaled);
    return sample;
}

}  // namespace anpr
