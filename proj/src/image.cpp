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

#include "anpr/image.hpp"

#include <algorithm>
#include <string>

namespace anpr {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1)
        throw SizeError("image dimensions must be at least 1x1, got " +
                        std::to_string(width) + "x" + std::to_string(height));
}

void check_box(const BoundingBox& box, int width, int height) {
    if (box.x < 0 || box.y < 0 || box.w < 1 || box.h < 1 ||
        box.right() > width || box.bottom() > height)
        throw BoundsError("box (" + std::to_string(box.x) + "," + std::to_string(box.y) +
                          " " + std::to_string(box.w) + "x" + std::to_string(box.h) +
                          ") outside " + std::to_string(width) + "x" + std::to_string(height));
}

}  // namespace

GrayImage::GrayImage(int width, int height, uint8_t fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<size_t>(width) * height)
        throw SizeError("gray data length " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(width) + "x" + std::to_string(height));
}

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(3 * static_cast<size_t>(width) * height, 0);
}

RgbImage::RgbImage(int width, int height, std::vector<uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != 3 * static_cast<size_t>(width) * height)
        throw SizeError("rgb data length " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(width) + "x" + std::to_string(height));
}

BinaryImage::BinaryImage(int width, int height, Polarity polarity, uint8_t fill)
    : width_(width), height_(height), polarity_(polarity) {
    check_dims(width, height);
    if (fill > 1) throw SizeError("binary fill must be 0 or 1");
    bits_.assign(static_cast<size_t>(width) * height, fill);
}

BinaryImage::BinaryImage(int width, int height, Polarity polarity, std::vector<uint8_t> bits)
    : width_(width), height_(height), polarity_(polarity), bits_(std::move(bits)) {
    check_dims(width, height);
    if (bits_.size() != static_cast<size_t>(width) * height)
        throw SizeError("binary data length " + std::to_string(bits_.size()) +
                        " does not match " + std::to_string(width) + "x" + std::to_string(height));
    for (uint8_t b : bits_)
        if (b > 1) throw SizeError("binary values must be 0 or 1");
}

uint64_t BinaryImage::count_set() const {
    uint64_t n = 0;
    for (uint8_t b : bits_) n += b;
    return n;
}

GrayImage BinaryImage::to_gray() const {
    GrayImage out(width_, height_);
    // Ink: black marks on a white field. Edge: bright response on black.
    const uint8_t on = polarity_ == Polarity::Ink ? 0 : 255;
    const uint8_t off = polarity_ == Polarity::Ink ? 255 : 0;
    for (size_t i = 0; i < bits_.size(); ++i) out.data()[i] = bits_[i] ? on : off;
    return out;
}

GrayImage crop(const GrayImage& img, const BoundingBox& box) {
    check_box(box, img.width(), img.height());
    GrayImage out(box.w, box.h);
    for (int j = 0; j < box.h; ++j)
        for (int i = 0; i < box.w; ++i) out.at(i, j) = img.at(box.x + i, box.y + j);
    return out;
}

RgbImage crop(const RgbImage& img, const BoundingBox& box) {
    check_box(box, img.width(), img.height());
    RgbImage out(box.w, box.h);
    for (int j = 0; j < box.h; ++j)
        for (int i = 0; i < box.w; ++i) {
            const uint8_t* src = img.pixel(box.x + i, box.y + j);
            uint8_t* dst = out.pixel(i, j);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    return out;
}

BinaryImage crop(const BinaryImage& img, const BoundingBox& box) {
    check_box(box, img.width(), img.height());
    BinaryImage out(box.w, box.h, img.polarity());
    for (int j = 0; j < box.h; ++j)
        for (int i = 0; i < box.w; ++i) out.at(i, j) = img.at(box.x + i, box.y + j);
    return out;
}

BinaryImage resize_nearest(const BinaryImage& img, int out_w, int out_h) {
    check_dims(out_w, out_h);
    BinaryImage out(out_w, out_h, img.polarity());
    // floor((i+0.5)*w/out_w) in integers: ((2i+1)*w) / (2*out_w).
    std::vector<int> sx(out_w);
    for (int i = 0; i < out_w; ++i)
        sx[i] = static_cast<int>((2LL * i + 1) * img.width() / (2LL * out_w));
    for (int j = 0; j < out_h; ++j) {
        int sy = static_cast<int>((2LL * j + 1) * img.height() / (2LL * out_h));
        for (int i = 0; i < out_w; ++i) out.at(i, j) = img.at(sx[i], sy);
    }
    return out;
}

BoundingBox ink_bounds(const BinaryImage& img) {
    int min_x = img.width(), min_y = img.height(), max_x = -1, max_y = -1;
    for (int y = 0; y < img.height(); ++y) {
        const uint8_t* row = img.row(y);
        for (int x = 0; x < img.width(); ++x) {
            if (!row[x]) continue;
            min_x = std::min(min_x, x);
            min_y = std::min(min_y, y);
            max_x = std::max(max_x, x);
            max_y = std::max(max_y, y);
        }
    }
    if (max_x < 0) throw EmptyPlateError("no set bits");
    return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace anpr
