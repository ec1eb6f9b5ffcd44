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

#include "anpr/image.hpp"

namespace anpr {

struct LocateConfig {
    int edge_threshold = 128;  // applied to |Gx|/4, so shares the 0..255 scale
    std::vector<double> window_width_fracs = {0.25, 0.33, 0.45};
    double plate_aspect = 4.6;  // EU plate is roughly 520:113
    int stride = 4;

    void validate() const;
};

/// Summed-area table over set bits: S(x, y) = count in [0,x) x [0,y).
/// The table is (width+1) x (height+1); S(0,.) = S(.,0) = 0.
class IntegralImage {
public:
    explicit IntegralImage(const BinaryImage& img);

    int width() const { return width_; }
    int height() const { return height_; }
    uint32_t table(int x, int y) const {
        return sums_[static_cast<size_t>(y) * (width_ + 1) + x];
    }
    /// Count of set bits inside `box`; O(1).
    uint32_t window_count(const BoundingBox& box) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<uint32_t> sums_;
};

/// Vertical-edge map: convolve with the horizontal-gradient kernel
/// (-1,0,+1 / -2,0,+2 / -1,0,+1), scale |g| to [0,255] by (|g|+2)>>2,
/// and keep pixels meeting edge_threshold. The one-pixel border is never
/// set. Binary input is promoted to its 0/255 rendering first.
/// Throws SizeError below 3x3.
BinaryImage sobel_vertical(const GrayImage& img, int edge_threshold);
BinaryImage sobel_vertical(const BinaryImage& img, int edge_threshold);

/// Sweep windows of each configured width fraction (height = width /
/// plate_aspect) across the edge map at the given stride, scoring by edge
/// density. Density comparisons are exact (cross-multiplied counts), never
/// floating point. Ties prefer smaller y, then smaller x, then smaller
/// area. The final row/column position is always probed so the sweep
/// reaches the image edges. Throws NoEdgesError when the map has no set
/// bits.
BoundingBox locate_plate(const BinaryImage& edges, const LocateConfig& cfg);

/// Crop of the dilated ink image; the box comes from locate_plate run on
/// the same image's edges.
BinaryImage extract_plate(const BinaryImage& dilated, const BoundingBox& box);

}  // namespace anpr
