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

#include "anpr/kernels.hpp"

namespace anpr::kernels {

// Each arch file returns its table, or nullptr when the build target
// lacks the instruction set. Runtime CPU support is checked in dispatch.
const Table* avx2_table_or_null();
const Table* neon_table_or_null();

}  // namespace anpr::kernels
