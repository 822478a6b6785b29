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

#pragma once

// Data-parallel double-precision kernels used by the naive Bayes scorer and
// the cardinality MLP.
//
// Every backend is bit-identical to the scalar reference: elementwise kernels
// apply the same IEEE operations per lane (no FMA contraction), and the one
// reduction (dot) has a fixed four-lane order that the scalar reference
// reproduces exactly. The backend therefore never changes a search result.

#include <cstddef>
#include <span>
#include <string_view>

namespace edfilter::simd {

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view backend_name(Backend backend);

// Parses "scalar", "avx2" or "neon". Throws std::invalid_argument otherwise.
Backend parse_backend(std::string_view name);

bool backend_supported(Backend backend);

// Widest backend the running CPU supports.
Backend detect_backend();

// Process-wide backend. Initialised from EDFILTER_SIMD when set, otherwise
// from detect_backend().
Backend active_backend();

// Throws std::invalid_argument when the backend is not supported here.
void set_backend(Backend backend);

struct AdamStep {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  // 1 - beta^t for the current step t.
  double bias_correction1;
  double bias_correction2;
};

struct KernelTable {
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // Four-lane strided partial sums, combined as (l0 + l1) + (l2 + l3), then
  // the n % 4 tail added in order.
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] = max(y[i], 0)
  void (*relu)(double* y, std::size_t n);
  // One bias-corrected Adam update of n parameters in place.
  void (*adam)(double* param, const double* grad, double* m, double* v,
               std::size_t n, const AdamStep& step);
};

const KernelTable& kernels(Backend backend);

inline const KernelTable& kernels() { return kernels(active_backend()); }

void axpy(double a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
void relu(std::span<double> y);
void adam_update(std::span<double> param, std::span<const double> grad,
                 std::span<double> m, std::span<double> v,
                 const AdamStep& step);

namespace detail {
const KernelTable& scalar_table();
#if defined(EDFILTER_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(EDFILTER_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace edfilter::simd
