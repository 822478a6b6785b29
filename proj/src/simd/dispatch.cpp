// Copyright 2026 The ED-Filter Authors
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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "edfilter/simd/kernels.hpp"

namespace edfilter::simd {
namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("EDFILTER_SIMD"); env && *env) {
    const Backend requested = parse_backend(env);
    if (backend_supported(requested)) return requested;
  }
  return detect_backend();
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::kScalar;
  if (name == "avx2") return Backend::kAvx2;
  if (name == "neon") return Backend::kNeon;
  throw std::invalid_argument("unknown SIMD backend '" + std::string(name) + "'");
}

bool backend_supported(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(EDFILTER_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(EDFILTER_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend detect_backend() {
  if (backend_supported(Backend::kAvx2)) return Backend::kAvx2;
  if (backend_supported(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_supported(backend)) {
    throw std::invalid_argument("SIMD backend '" + std::string(backend_name(backend)) +
                                "' is not supported on this machine");
  }
  backend_slot().store(backend, std::memory_order_relaxed);
}

const KernelTable& kernels(Backend backend) {
  switch (backend) {
#if defined(EDFILTER_HAVE_AVX2)
    case Backend::kAvx2: return detail::avx2_table();
#endif
#if defined(EDFILTER_HAVE_NEON)
    case Backend::kNeon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  kernels().axpy(a, x.data(), y.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  return kernels().dot(x.data(), y.data(), x.size());
}

void relu(std::span<double> y) { kernels().relu(y.data(), y.size()); }

void adam_update(std::span<double> param, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, const AdamStep& step) {
  const std::size_t n = param.size();
  if (grad.size() != n || m.size() != n || v.size() != n) {
    throw std::invalid_argument("adam_update: size mismatch");
  }
  kernels().adam(param.data(), grad.data(), m.data(), v.data(), n, step);
}

}  // namespace edfilter::simd
