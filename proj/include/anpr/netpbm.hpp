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
#include <string>
#include <variant>
#include <vector>

#include "anpr/image.hpp"

namespace anpr {

using NetpbmImage = std::variant<BinaryImage, GrayImage, RgbImage>;

// Readers accept all six classic formats. P1/P4 produce BinaryImage with
// ink polarity (a 1 bit in the file is ink). P2/P5 produce GrayImage and
// P3/P6 RgbImage, rescaled to [0, 255] as round(v * 255 / maxval).
// Malformed input raises ParseError carrying the byte offset of the first
// offending byte; missing files raise IoError.

NetpbmImage read_netpbm(const std::string& path);
NetpbmImage parse_netpbm(const std::vector<uint8_t>& bytes);

// Writers emit the binary formats only (P4/P5/P6) with maxval 255 and a
// single newline after each header token group, e.g. "P5\n<w> <h>\n255\n".
// Reading back a written file reproduces the image exactly.

void write_pbm(const std::string& path, const BinaryImage& img);
void write_pgm(const std::string& path, const GrayImage& img);
void write_ppm(const std::string& path, const RgbImage& img);

std::vector<uint8_t> encode_pbm(const BinaryImage& img);
std::vector<uint8_t> encode_pgm(const GrayImage& img);
std::vector<uint8_t> encode_ppm(const RgbImage& img);

}  // namespace anpr
