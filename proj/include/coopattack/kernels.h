// Copyright 2026 The coopattack Authors
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

#ifndef COOPATTACK_KERNELS_H_
#define COOPATTACK_KERNELS_H_

// Data-parallel inner loops. Each kernel has an OpenMP version and a serial
// reference with the same signature; tests require them to agree bit for bit,
// so no kernel reorders a floating-point reduction.

#include <exception>
#include <span>
#include <vector>

#include "coopattack/valuenet.h"

namespace coopattack::kernels {

// Below this many items the parallel kernels run on the calling thread.
inline constexpr int kMinParallelItems = 8;

// out[i] = fn(i). fn must be safe to call concurrently for distinct i.
// Exceptions thrown by fn are rethrown on the calling thread.
template <class Fn>
void ParallelMap(std::span<double> out, Fn&& fn) {
  const int n = static_cast<int>(out.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(static) if (n >= kMinParallelItems)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = fn(i);
    } catch (...) {
#pragma omp critical(coopattack_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

template <class Fn>
void SerialMap(std::span<double> out, Fn&& fn) {
  const int n = static_cast<int>(out.size());
  for (int i = 0; i < n; ++i) out[i] = fn(i);
}

// V(x_r) for every row of a row-major (rows x net.input_dim()) matrix.
std::vector<double> ForwardBatch(const ValueNet& net,
                                 std::span<const double> inputs);
std::vector<double> ForwardBatchSerial(const ValueNet& net,
                                       std::span<const double> inputs);

// Column means of a row-major (rows x dim) matrix. Each column is summed in
// row order, so parallelizing over columns keeps results identical.
std::vector<double> ColumnMeans(std::span<const double> data, int rows, int dim);
std::vector<double> ColumnMeansSerial(std::span<const double> data, int rows,
                                      int dim);

}  // namespace coopattack::kernels

#endif  // COOPATTACK_KERNELS_H_
