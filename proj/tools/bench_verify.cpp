// Compares the serial reference kernels against the OpenMP ones on the
// sampling-heavy checks. Usage: bench_verify [samples]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "papdiff/gallery.hpp"
#include "papdiff/parallel.hpp"
#include "papdiff/verify.hpp"

using namespace papdiff;

namespace {

template <class F>
double time_best_ms(F&& fn, int repeats = 3) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t samples = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 4000;
  std::printf("threads: %d, samples: %zu\n", max_threads(), samples);
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  const auto corpus = generate_corpus(7, 8, 6, 4);
  const Sampler sampler = Sampler::box(4, -1.0, 1.0, 99);

  report("gradcheck",
         time_best_ms([&] {
           for (const auto& p : corpus) gradcheck(p, sampler, samples, 1e-4, Exec::serial);
         }),
         time_best_ms([&] {
           for (const auto& p : corpus) gradcheck(p, sampler, samples, 1e-4, Exec::parallel);
         }));

  report("mode_consistency",
         time_best_ms([&] {
           for (const auto& p : corpus) mode_consistency(p, sampler, samples, Exec::serial);
         }),
         time_best_ms([&] {
           for (const auto& p : corpus)
             mode_consistency(p, sampler, samples, Exec::parallel);
         }));

  report("repr_equivalence",
         time_best_ms([&] {
           for (const auto& p : corpus)
             repr_equivalence(p, sampler, samples / 2, Exec::serial);
         }),
         time_best_ms([&] {
           for (const auto& p : corpus)
             repr_equivalence(p, sampler, samples / 2, Exec::parallel);
         }));

  report("claim3 probe",
         time_best_ms([&] { probe_claim3(15, samples / 8, samples, 5, Exec::serial); }),
         time_best_ms([&] { probe_claim3(15, samples / 8, samples, 5, Exec::parallel); }));

  return 0;
}
