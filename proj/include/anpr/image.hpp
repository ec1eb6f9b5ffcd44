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
#include <utility>
#include <vector>

#include "anpr/errors.hpp"

namespace anpr {

// Pixel coordinates follow the usual raster convention: x grows rightward
// (columns), y grows downward (rows). Buffers are row-major.

struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const BoundingBox&) const = default;
    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long long area() const { return static_cast<long long>(w) * h; }
};

/// Single-channel 8-bit image.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    uint8_t at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }
    uint8_t& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    const uint8_t* row(int y) const { return data_.data() + static_cast<size_t>(y) * width_; }
    uint8_t* row(int y) { return data_.data() + static_cast<size_t>(y) * width_; }
    const std::vector<uint8_t>& data() const { return data_; }
    std::vector<uint8_t>& data() { return data_; }

    bool operator==(const GrayImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<uint8_t> data_;
};

/// Interleaved 8-bit RGB image.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height);
    RgbImage(int width, int height, std::vector<uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    /// Pointer to the (r, g, b) triple at (x, y).
    const uint8_t* pixel(int x, int y) const {
        return data_.data() + 3 * (static_cast<size_t>(y) * width_ + x);
    }
    uint8_t* pixel(int x, int y) {
        return data_.data() + 3 * (static_cast<size_t>(y) * width_ + x);
    }
    const std::vector<uint8_t>& data() const { return data_; }
    std::vector<uint8_t>& data() { return data_; }

    bool operator==(const RgbImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<uint8_t> data_;
};

/// What a set bit means in a BinaryImage. Fixed at construction.
enum class Polarity : uint8_t {
    Ink,   // set bit = black character ink
    Edge,  // set bit = edge pixel
};

/// Two-valued image; bits are stored one byte per pixel in {0, 1}.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height, Polarity polarity, uint8_t fill = 0);
    BinaryImage(int width, int height, Polarity polarity, std::vector<uint8_t> bits);

    int width() const { return width_; }
    int height() const { return height_; }
    Polarity polarity() const { return polarity_; }
    uint8_t at(int x, int y) const { return bits_[static_cast<size_t>(y) * width_ + x]; }
    uint8_t& at(int x, int y) { return bits_[static_cast<size_t>(y) * width_ + x]; }
    const uint8_t* row(int y) const { return bits_.data() + static_cast<size_t>(y) * width_; }
    uint8_t* row(int y) { return bits_.data() + static_cast<size_t>(y) * width_; }
    const std::vector<uint8_t>& bits() const { return bits_; }
    std::vector<uint8_t>& bits() { return bits_; }

    uint64_t count_set() const;

    /// 0/255 rendering: ink bits are black on white, edge bits white on black.
    GrayImage to_gray() const;

    bool operator==(const BinaryImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    Polarity polarity_ = Polarity::Ink;
    std::vector<uint8_t> bits_;
};

GrayImage crop(const GrayImage& img, const BoundingBox& box);
RgbImage crop(const RgbImage& img, const BoundingBox& box);
BinaryImage crop(const BinaryImage& img, const BoundingBox& box);

/// Nearest-neighbor resample to an exact target size, no aspect preservation.
/// Source pixel for output (i, j) is (floor((i+0.5)*w/out_w), floor((j+0.5)*h/out_h)).
BinaryImage resize_nearest(const BinaryImage& img, int out_w, int out_h);

/// Tight bounding box of the set bits; throws EmptyPlateError when none are set.
BoundingBox ink_bounds(const BinaryImage& img);

}  // namespace anpr
