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

#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace anpr::kernels {

namespace {

bool cpu_supports_avx2() {
#if defined(__x86_64__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Table* runtime_avx2() {
    const Table* t = avx2_table_or_null();
    return (t && cpu_supports_avx2()) ? t : nullptr;
}

}  // namespace

std::vector<const Table*> available_tables() {
    std::vector<const Table*> tables;
    tables.push_back(&scalar_table());
    if (const Table* t = runtime_avx2()) tables.push_back(t);
    if (const Table* t = neon_table_or_null()) tables.push_back(t);
    return tables;
}

const Table& select() {
    static const Table* chosen = [] {
        const char* env = std::getenv("ANPR_SIMD");
        if (env) {
            if (std::strcmp(env, "avx2") == 0) {
                if (const Table* t = runtime_avx2()) return t;
                return &scalar_table();
            }
            if (std::strcmp(env, "neon") == 0) {
                if (const Table* t = neon_table_or_null()) return t;
                return &scalar_table();
            }
            return &scalar_table();  // "scalar" or anything unknown
        }
        if (const Table* t = runtime_avx2()) return t;
        if (const Table* t = neon_table_or_null()) return t;
        return &scalar_table();
    }();
    return *chosen;
}

}  // namespace anpr::kernels
