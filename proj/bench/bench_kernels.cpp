// Serial vs OpenMP timings for the dense-layer kernels and the exhaustive oracle.
// Also checks that both paths produce identical results.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "tta/baselines.hpp"
#include "tta/kernels.hpp"
#include "tta/rng.hpp"

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

std::vector<double> random_vec(std::size_t n, tta::Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = tta::uniform_real(rng, -1.0, 1.0);
  return v;
}

bool same(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-34s %10.4f ms %10.4f ms %7.2fx  %s\n", name, serial * 1e3, parallel * 1e3, serial / parallel,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  namespace k = tta::kernels;
  tta::Rng rng(42);
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-34s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  // First layer of the policy on a 31-link, 512-slot case.
  const k::DenseShape step{1, 6 + 31 * 512, 128};
  const k::DenseShape update{256, 6 + 31 * 512, 128};
  const auto w = random_vec(step.in * step.out, rng);
  const auto bias = random_vec(step.out, rng);
  const auto x = random_vec(update.batch * update.in, rng);
  const auto dy = random_vec(update.batch * update.out, rng);

  for (const auto& [name, shape] : {std::pair{"forward (batch 1)", step}, std::pair{"forward (batch 256)", update}}) {
    std::vector<double> ys(shape.batch * shape.out), yp(ys.size());
    const std::span<const double> xs(x.data(), shape.batch * shape.in);
    const double s = best_of(5, [&] { k::serial::dense_forward(shape, w, bias, xs, ys); });
    const double p = best_of(5, [&] { k::dense_forward(shape, w, bias, xs, yp); });
    row(name, s, p, same(ys, yp));
  }
  {
    std::vector<double> gs(w.size()), gp(w.size()), bs(update.out), bp(update.out);
    const double s = best_of(3, [&] {
      std::fill(gs.begin(), gs.end(), 0.0);
      std::fill(bs.begin(), bs.end(), 0.0);
      k::serial::dense_backward_params(update, x, dy, gs, bs);
    });
    const double p = best_of(3, [&] {
      std::fill(gp.begin(), gp.end(), 0.0);
      std::fill(bp.begin(), bp.end(), 0.0);
      k::dense_backward_params(update, x, dy, gp, bp);
    });
    row("param gradient (batch 256)", s, p, same(gs, gp) && same(bs, bp));
  }
  {
    const k::DenseShape hidden{256, 128, 128};
    const auto w2 = random_vec(hidden.in * hidden.out, rng);
    const std::span<const double> d(dy.data(), hidden.batch * hidden.out);
    std::vector<double> ds(hidden.batch * hidden.in), dp(ds.size());
    const double s = best_of(5, [&] { k::serial::dense_backward_input(hidden, w2, d, ds); });
    const double p = best_of(5, [&] { k::dense_backward_input(hidden, w2, d, dp); });
    row("input gradient (256x128x128)", s, p, same(ds, dp));
  }

  const tta::TestCase tc = tta::gen_ring_testcase(6, 3, 4, 8, 7);
  tta::OracleResult os, op;
  const double s = best_of(1, [&] { os = tta::serial::exhaustive_oracle(tc); });
  const double p = best_of(1, [&] { op = tta::exhaustive_oracle(tc); });
  row("exhaustive oracle (12 flows)", s, p,
      os.best_objective == op.best_objective && os.best_assignment == op.best_assignment);
  return 0;
}
