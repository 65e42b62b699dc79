#include "tta/kernels.hpp"

#include <algorithm>
#include <cstddef>

#include <omp.h>

#include "tta/errors.hpp"

namespace tta::kernels {

namespace {

void check(DenseShape s, std::size_t w, std::size_t bias, std::size_t x, std::size_t y) {
  if (w != s.in * s.out || bias != s.out || x != s.batch * s.in || y != s.batch * s.out)
    throw ShapeMismatchError("dense kernel buffers do not match the layer shape");
}

// Output columns are split into one block per thread so a single-row forward
// pass (one environment step) still spreads across threads. Narrower blocks
// reread x and stride through w, which costs about 2x on one thread.
std::size_t column_block(std::size_t out) {
  const auto threads = static_cast<std::size_t>(std::max(1, omp_get_max_threads()));
  const std::size_t width = (out + threads - 1) / threads;
  return std::max<std::size_t>(8, (width + 7) / 8 * 8);
}

inline void forward_block(DenseShape s, const double* w, const double* bias, const double* x, double* y,
                          std::size_t o0, std::size_t o1) {
  for (std::size_t o = o0; o < o1; ++o) y[o] = bias[o];
  for (std::size_t i = 0; i < s.in; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* wi = w + i * s.out;
    for (std::size_t o = o0; o < o1; ++o) y[o] += xi * wi[o];
  }
}

inline void param_row(DenseShape s, std::size_t i, const double* x, const double* dy, double* gw) {
  double* g = gw + i * s.out;
  for (std::size_t b = 0; b < s.batch; ++b) {
    const double xi = x[b * s.in + i];
    if (xi == 0.0) continue;
    const double* d = dy + b * s.out;
    for (std::size_t o = 0; o < s.out; ++o) g[o] += xi * d[o];
  }
}

inline void bias_grad(DenseShape s, const double* dy, double* gb) {
  for (std::size_t b = 0; b < s.batch; ++b)
    for (std::size_t o = 0; o < s.out; ++o) gb[o] += dy[b * s.out + o];
}

inline void input_row(DenseShape s, const double* w, const double* dy, double* dx) {
  for (std::size_t i = 0; i < s.in; ++i) {
    const double* wi = w + i * s.out;
    double acc = 0.0;
    for (std::size_t o = 0; o < s.out; ++o) acc += wi[o] * dy[o];
    dx[i] = acc;
  }
}

}  // namespace

void dense_forward(DenseShape s, std::span<const double> w, std::span<const double> bias,
                   std::span<const double> x, std::span<double> y) {
  check(s, w.size(), bias.size(), x.size(), y.size());
  const std::size_t block = column_block(s.out);
  const std::size_t blocks = (s.out + block - 1) / block;
  const auto tasks = static_cast<std::ptrdiff_t>(s.batch * blocks);
#pragma omp parallel for schedule(static) if (s.batch * s.in * s.out > 65536)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const std::size_t b = static_cast<std::size_t>(t) / blocks;
    const std::size_t o0 = (static_cast<std::size_t>(t) % blocks) * block;
    forward_block(s, w.data(), bias.data(), x.data() + b * s.in, y.data() + b * s.out, o0,
                  std::min(o0 + block, s.out));
  }
}

void dense_backward_params(DenseShape s, std::span<const double> x, std::span<const double> dy,
                           std::span<double> grad_w, std::span<double> grad_bias) {
  check(s, grad_w.size(), grad_bias.size(), x.size(), dy.size());
  const auto in = static_cast<std::ptrdiff_t>(s.in);
#pragma omp parallel for schedule(static) if (s.batch * s.in * s.out > 65536)
  for (std::ptrdiff_t i = 0; i < in; ++i)
    param_row(s, static_cast<std::size_t>(i), x.data(), dy.data(), grad_w.data());
  bias_grad(s, dy.data(), grad_bias.data());
}

void dense_backward_input(DenseShape s, std::span<const double> w, std::span<const double> dy,
                          std::span<double> dx) {
  if (w.size() != s.in * s.out || dy.size() != s.batch * s.out || dx.size() != s.batch * s.in)
    throw ShapeMismatchError("dense kernel buffers do not match the layer shape");
  const auto batch = static_cast<std::ptrdiff_t>(s.batch);
#pragma omp parallel for schedule(static) if (s.batch * s.in * s.out > 65536)
  for (std::ptrdiff_t b = 0; b < batch; ++b)
    input_row(s, w.data(), dy.data() + b * static_cast<std::ptrdiff_t>(s.out),
              dx.data() + b * static_cast<std::ptrdiff_t>(s.in));
}

namespace serial {

void dense_forward(DenseShape s, std::span<const double> w, std::span<const double> bias,
                   std::span<const double> x, std::span<double> y) {
  check(s, w.size(), bias.size(), x.size(), y.size());
  for (std::size_t b = 0; b < s.batch; ++b)
    forward_block(s, w.data(), bias.data(), x.data() + b * s.in, y.data() + b * s.out, 0, s.out);
}

void dense_backward_params(DenseShape s, std::span<const double> x, std::span<const double> dy,
                           std::span<double> grad_w, std::span<double> grad_bias) {
  check(s, grad_w.size(), grad_bias.size(), x.size(), dy.size());
  for (std::size_t i = 0; i < s.in; ++i) param_row(s, i, x.data(), dy.data(), grad_w.data());
  bias_grad(s, dy.data(), grad_bias.data());
}

void dense_backward_input(DenseShape s, std::span<const double> w, std::span<const double> dy,
                          std::span<double> dx) {
  if (w.size() != s.in * s.out || dy.size() != s.batch * s.out || dx.size() != s.batch * s.in)
    throw ShapeMismatchError("dense kernel buffers do not match the layer shape");
  for (std::size_t b = 0; b < s.batch; ++b) input_row(s, w.data(), dy.data() + b * s.out, dx.data() + b * s.in);
}

}  // namespace serial

}  // namespace tta::kernels
