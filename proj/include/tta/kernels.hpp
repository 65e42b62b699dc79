#pragma once

#include <cstddef>
#include <span>

// Dense-layer kernels for the policy networks.
//
// Weights are stored input-major: w[i * out + o] is the weight from input i to
// output o, so every inner loop runs over contiguous outputs and vectorises
// without reassociating floating-point sums. Activations are row-major,
// batch × width.
//
// tta::kernels holds the OpenMP versions used by the agent; tta::kernels::serial
// holds the plain reference loops. Both accumulate every element in the same
// order, so they agree bit for bit at any thread count.

namespace tta::kernels {

struct DenseShape {
  std::size_t batch = 1;
  std::size_t in = 0;
  std::size_t out = 0;
};

/// y[b][o] = bias[o] + Σ_i x[b][i] · w[i][o]
void dense_forward(DenseShape shape, std::span<const double> w, std::span<const double> bias,
                   std::span<const double> x, std::span<double> y);

/// grad_w[i][o] += Σ_b x[b][i] · dy[b][o];  grad_bias[o] += Σ_b dy[b][o]
void dense_backward_params(DenseShape shape, std::span<const double> x, std::span<const double> dy,
                           std::span<double> grad_w, std::span<double> grad_bias);

/// dx[b][i] = Σ_o w[i][o] · dy[b][o]
void dense_backward_input(DenseShape shape, std::span<const double> w, std::span<const double> dy,
                          std::span<double> dx);

namespace serial {

void dense_forward(DenseShape shape, std::span<const double> w, std::span<const double> bias,
                   std::span<const double> x, std::span<double> y);
void dense_backward_params(DenseShape shape, std::span<const double> x, std::span<const double> dy,
                           std::span<double> grad_w, std::span<double> grad_bias);
void dense_backward_input(DenseShape shape, std::span<const double> w, std::span<const double> dy,
                          std::span<double> dx);

}  // namespace serial

}  // namespace tta::kernels
