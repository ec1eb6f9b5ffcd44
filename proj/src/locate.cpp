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

#include "anpr/locate.hpp"

#include <algorithm>
#include <cmath>

#include "anpr/errors.hpp"
#include "anpr/kernels.hpp"

namespace anpr {

void LocateConfig::validate() const {
    if (edge_threshold < 0 || edge_threshold > 255)
        throw SizeError("edge_threshold must be in [0, 255]");
    if (window_width_fracs.empty())
        throw SizeError("window_width_fracs must not be empty");
    for (double f : window_width_fracs)
        if (!(f > 0.0) || f > 1.0)
            throw SizeError("window width fractions must be in (0, 1]");
    if (!(plate_aspect > 0.0)) throw SizeError("plate_aspect must be positive");
    if (stride < 1) throw SizeError("stride must be >= 1");
}

IntegralImage::IntegralImage(const BinaryImage& img)
    : width_(img.width()),
      height_(img.height()),
      sums_(static_cast<size_t>(img.width() + 1) * (img.height() + 1), 0) {
    const size_t pitch = static_cast<size_t>(width_) + 1;
    for (int y = 0; y < height_; ++y) {
        const uint8_t* row = img.row(y);
        const uint32_t* prev = &sums_[static_cast<size_t>(y) * pitch];
        uint32_t* cur = &sums_[static_cast<size_t>(y + 1) * pitch];
        uint32_t run = 0;
        for (int x = 0; x < width_; ++x) {
            run += row[x];
            cur[x + 1] = prev[x + 1] + run;
        }
    }
}

uint32_t IntegralImage::window_count(const BoundingBox& box) const {
    if (box.x < 0 || box.y < 0 || box.w < 0 || box.h < 0 ||
        box.right() > width_ || box.bottom() > height_)
        throw BoundsError("window outside image");
    return table(box.right(), box.bottom()) - table(box.x, box.bottom()) -
           table(box.right(), box.y) + table(box.x, box.y);
}

BinaryImage sobel_vertical(const GrayImage& img, int edge_threshold) {
    if (img.width() < 3 || img.height() < 3)
        throw SizeError("sobel_vertical needs at least 3x3");
    if (edge_threshold < 0 || edge_threshold > 255)
        throw SizeError("edge_threshold must be in [0, 255]");
    const auto& T = kernels::select();
    BinaryImage out(img.width(), img.height(), Polarity::Edge);
    const size_t n = static_cast<size_t>(img.width()) - 2;
    for (int y = 1; y + 1 < img.height(); ++y)
        T.sobel_row(img.row(y - 1), img.row(y), img.row(y + 1), out.row(y) + 1, n,
                    static_cast<uint8_t>(edge_threshold));
    return out;
}

BinaryImage sobel_vertical(const BinaryImage& img, int edge_threshold) {
    return sobel_vertical(img.to_gray(), edge_threshold);
}

BoundingBox locate_plate(const BinaryImage& edges, const LocateConfig& cfg) {
    cfg.validate();
    const auto& T = kernels::select();
    if (T.count_set(edges.bits().data(), edges.bits().size()) == 0)
        throw NoEdgesError("edge map has no set bits");

    const IntegralImage integral(edges);
    const int iw = edges.width();
    const int ih = edges.height();

    auto positions = [&cfg](int limit) {
        std::vector<int> xs;
        for (int x = 0; x <= limit; x += cfg.stride) xs.push_back(x);
        if (xs.empty() || xs.back() != limit) xs.push_back(limit);
        return xs;
    };

    bool have = false;
    BoundingBox best{};
    uint64_t best_count = 0;
    for (double frac : cfg.window_width_fracs) {
        const int w = std::min<int>(
            iw, std::max<int>(3, static_cast<int>(std::llround(frac * iw))));
        const int h = std::min<int>(
            ih, std::max<int>(3, static_cast<int>(std::llround(w / cfg.plate_aspect))));
        for (int y : positions(ih - h)) {
            for (int x : positions(iw - w)) {
                const BoundingBox box{x, y, w, h};
                const uint64_t count = integral.window_count(box);
                if (!have) {
                    have = true;
                    best = box;
                    best_count = count;
                    continue;
                }
                // Density compare without floating point:
                // count/area > best_count/best_area iff the cross products
                // order the same way.
                const unsigned __int128 lhs = static_cast<unsigned __int128>(count) *
                                              (static_cast<uint64_t>(best.w) * best.h);
                const unsigned __int128 rhs = static_cast<unsigned __int128>(best_count) *
                                              (static_cast<uint64_t>(box.w) * box.h);
                bool better;
                if (lhs != rhs) {
                    better = lhs > rhs;
                } else if (box.y != best.y) {
                    better = box.y < best.y;
                } else if (box.x != best.x) {
                    better = box.x < best.x;
                } else if (box.area() != best.area()) {
                    better = box.area() < best.area();
                } else {
                    better = box.w < best.w;
                }
                if (better) {
                    best = box;
                    best_count = count;
                }
            }
        }
    }
    return best;
}

BinaryImage extract_plate(const BinaryImage& dilated, const BoundingBox& box) {
    return crop(dilated, box);
}

}  // namespace anpr
