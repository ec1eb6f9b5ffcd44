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
#include <stdexcept>
#include <string>

namespace anpr {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed text or binary input; carries the byte offset of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what + " at byte " + std::to_string(byte_offset)),
          offset_(byte_offset) {}
    std::size_t byte_offset() const { return offset_; }

private:
    std::size_t offset_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A rectangle fell outside the image it was applied to.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// An image is too small for the requested operation.
class SizeError : public Error {
public:
    using Error::Error;
};

/// The edge map passed to plate localization has no set bits.
class NoEdgesError : public Error {
public:
    using Error::Error;
};

/// Row-band selection found no band of positive projection counts.
class EmptyPlateError : public Error {
public:
    using Error::Error;
};

/// Scene text does not fit the requested plate rectangle.
class LayoutError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Model (de)serialization failure, with the failure class preserved so
/// callers can distinguish a stale format from a damaged file.
class ModelError : public Error {
public:
    enum class Kind { version, checksum, truncated, malformed, io };

    ModelError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

}  // namespace anpr
