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

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "edfilter/simd/kernels.hpp"

namespace edfilter::simd::detail {
namespace {

// Two float64x2 registers cover the four reference lanes.

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const std::size_t n2 = n - n % 2;
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double total = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
                 (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (std::size_t i = n4; i < n; ++i) total += x[i] * y[i];
  return total;
}

void relu_neon(double* y, std::size_t n) {
  // Scalar std::max semantics for NaN; NEON vmaxq would propagate NaN.
  for (std::size_t i = 0; i < n; ++i) y[i] = std::max(y[i], 0.0);
}

void adam_neon(double* param, const double* grad, double* m, double* v,
               std::size_t n, const AdamStep& s) {
  const float64x2_t b1 = vdupq_n_f64(s.beta1);
  const float64x2_t b2 = vdupq_n_f64(s.beta2);
  const float64x2_t c1 = vdupq_n_f64(1.0 - s.beta1);
  const float64x2_t c2 = vdupq_n_f64(1.0 - s.beta2);
  const float64x2_t bc1 = vdupq_n_f64(s.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(s.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(s.learning_rate);
  const float64x2_t eps = vdupq_n_f64(s.epsilon);
  const std::size_t n2 = n - n % 2;
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    float64x2_t vm = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(c1, g));
    float64x2_t vv = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)),
                               vmulq_f64(c2, vmulq_f64(g, g)));
    vst1q_f64(m + i, vm);
    vst1q_f64(v + i, vv);
    const float64x2_t step =
        vdivq_f64(vmulq_f64(lr, vdivq_f64(vm, bc1)),
                  vaddq_f64(vsqrtq_f64(vdivq_f64(vv, bc2)), eps));
    vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), step));
  }
  if (i < n) {
    scalar_table().adam(param + i, grad + i, m + i, v + i, n - i, s);
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{axpy_neon, dot_neon, relu_neon, adam_neon};
  return table;
}

}  // namespace edfilter::simd::detail
