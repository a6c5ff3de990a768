// Copyright 2026 The Mapforge Authors
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

#include "mapforge/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mapforge::simd
{
namespace
{

bool cpu_has_avx2()
{
#if defined(MAPFORGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const KernelTable & select_kernels()
{
  if (const char * env = std::getenv("MAPFORGE_SIMD"); env != nullptr && *env != '\0') {
    const std::string requested(env);
    if (requested == "scalar") {
      return kernels_for(Isa::scalar);
    }
    if (requested == "avx2") {
      return kernels_for(Isa::avx2);
    }
    if (requested != "auto") {
      throw std::runtime_error("MAPFORGE_SIMD must be one of scalar, avx2, auto");
    }
  }
  return isa_supported(Isa::avx2) ? kernels_for(Isa::avx2) : kernels_for(Isa::scalar);
}

}  // namespace

std::string_view isa_name(Isa isa)
{
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa)
{
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2: {
      static const bool has_avx2 = cpu_has_avx2();
      return has_avx2;
    }
  }
  return false;
}

std::vector<Isa> supported_isas()
{
  std::vector<Isa> out{Isa::scalar};
  if (isa_supported(Isa::avx2)) {
    out.push_back(Isa::avx2);
  }
  return out;
}

const KernelTable & kernels_for(Isa isa)
{
  if (!isa_supported(isa)) {
    throw std::runtime_error("SIMD variant " + std::string(isa_name(isa)) + " is not supported on this machine");
  }
#if defined(MAPFORGE_HAVE_AVX2)
  if (isa == Isa::avx2) {
    return detail::kAvx2Kernels;
  }
#endif
  return detail::kScalarKernels;
}

const KernelTable & kernels()
{
  static const KernelTable & active = select_kernels();
  return active;
}

}  // namespace mapforge::simd
