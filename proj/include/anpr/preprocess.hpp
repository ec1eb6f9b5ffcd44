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

#include "anpr/image.hpp"

namespace anpr {

struct PreprocessConfig {
    int bilateral_kernel = 5;            // odd, >= 3
    double bilateral_sigma_space = 2.0;  // pixels
    double bilateral_sigma_range = 50.0; // intensity units
    int clahe_tile = 8;                  // >= 2
    double clahe_clip = 2.0;             // relative clip factor, >= 1
    int binarize_threshold = 128;        // [0, 255]
    int dilate_radius = 1;               // (2r+1)^2 square element
    int dilate_iterations = 1;           // >= 0

    void validate() const;  // throws SizeError on out-of-range fields
};

struct PreprocessResult {
    BinaryImage binary;   // pre-dilation ink map
    BinaryImage dilated;  // after dilate_iterations rounds
};

/// gray = round(0.299 r + 0.587 g + 0.114 b)
GrayImage to_grayscale(const RgbImage& img);

/// Gaussian-in-space, Gaussian-in-range weighted mean over the k x k window.
/// Window coordinates are clamped at the borders. Output rounded to nearest.
GrayImage bilateral_filter(const GrayImage& img, const PreprocessConfig& cfg);

/// Contrast-limited adaptive histogram equalization. Per tile: 256-bin
/// histogram, clip at clahe_clip * tile_pixels / 256, redistribute the
/// excess uniformly in one pass, then m(v) = round((cdf(v) - cdf_min) /
/// (tile_pixels - cdf_min) * 255). A tile whose pixels are all equal maps
/// identically. Each output pixel bilinearly blends the mappings of the
/// four nearest tile centers; edge tiles replicate outward.
GrayImage clahe(const GrayImage& img, const PreprocessConfig& cfg);

/// intensity < threshold becomes ink (bit 1); >= threshold stays white.
BinaryImage binarize(const GrayImage& img, int threshold);

/// Set a bit when any input bit lies within Chebyshev distance `radius`,
/// repeated `iterations` times. Border neighborhoods are clipped.
BinaryImage dilate(const BinaryImage& img, int radius, int iterations);

PreprocessResult preprocess(const RgbImage& img, const PreprocessConfig& cfg);
PreprocessResult preprocess(const GrayImage& img, const PreprocessConfig& cfg);

}  // namespace anpr
