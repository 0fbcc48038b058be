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

#include "coopattack/kernels.h"

#include <algorithm>

#include "coopattack/errors.h"

namespace coopattack::kernels {
namespace {

int RowsOf(const ValueNet& net, std::span<const double> inputs) {
  const size_t d = static_cast<size_t>(net.input_dim());
  if (inputs.size() % d != 0) {
    throw RejectedInput("batch size is not a multiple of the input dimension");
  }
  return static_cast<int>(inputs.size() / d);
}

void CheckMatrix(std::span<const double> data, int rows, int dim) {
  if (rows < 1 || dim < 1) throw RejectedInput("empty batch");
  if (data.size() != static_cast<size_t>(rows) * dim) {
    throw RejectedInput("batch data does not match rows x dim");
  }
}

}  // namespace

std::vector<double> ForwardBatch(const ValueNet& net,
                                 std::span<const double> inputs) {
  const int rows = RowsOf(net, inputs);
  const size_t d = static_cast<size_t>(net.input_dim());
  std::vector<double> out(rows);
  ParallelMap(out, [&](int r) { return net.Forward(inputs.subspan(r * d, d)); });
  return out;
}

std::vector<double> ForwardBatchSerial(const ValueNet& net,
                                       std::span<const double> inputs) {
  const int rows = RowsOf(net, inputs);
  const size_t d = static_cast<size_t>(net.input_dim());
  std::vector<double> out(rows);
  SerialMap(out, [&](int r) { return net.Forward(inputs.subspan(r * d, d)); });
  return out;
}

std::vector<double> ColumnMeans(std::span<const double> data, int rows,
                                int dim) {
  CheckMatrix(data, rows, dim);
  // Threads own blocks of adjacent columns and walk them row by row, so each
  // column is summed in the same order as the serial version.
  constexpr int kBlock = 8;
  const int blocks = (dim + kBlock - 1) / kBlock;
  std::vector<double> mean(dim, 0.0);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (int b = 0; b < blocks; ++b) {
    const int lo = b * kBlock;
    const int hi = std::min(dim, lo + kBlock);
    for (int r = 0; r < rows; ++r) {
      const double* row = data.data() + static_cast<size_t>(r) * dim;
      for (int c = lo; c < hi; ++c) mean[c] += row[c];
    }
    for (int c = lo; c < hi; ++c) mean[c] /= rows;
  }
  return mean;
}

std::vector<double> ColumnMeansSerial(std::span<const double> data, int rows,
                                      int dim) {
  CheckMatrix(data, rows, dim);
  std::vector<double> sum(dim, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dim; ++c) sum[c] += data[static_cast<size_t>(r) * dim + c];
  }
  for (double& s : sum) s /= rows;
  return sum;
}

}  // namespace coopattack::kernels
