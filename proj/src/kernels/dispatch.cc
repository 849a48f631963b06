// Copyright 2026 The Earsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <string_view>
#include <vector>

#include "earsim/kernels.h"

namespace earsim {

#if defined(EARSIM_HAVE_AVX2)
namespace avx2 {
const Kernels& Table();
}  // namespace avx2
#endif

const Kernels* Avx2Kernels() {
#if defined(EARSIM_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &avx2::Table();
#endif
  return nullptr;
}

std::vector<const Kernels*> AvailableKernels() {
  std::vector<const Kernels*> out{&ScalarKernels()};
  if (const Kernels* k = Avx2Kernels()) out.push_back(k);
  return out;
}

const Kernels& ActiveKernels() {
  static const Kernels* const active = [] {
    const char* env = std::getenv("EARSIM_KERNELS");
    const std::vector<const Kernels*> available = AvailableKernels();
    if (env != nullptr) {
      for (const Kernels* k : available) {
        if (k->name == std::string_view(env)) return k;
      }
    }
    return available.back();
  }();
  return *active;
}

}  // namespace earsim
