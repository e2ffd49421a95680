// Serial reference metrics versus the OpenMP kernels on one synthetic corpus.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "pubdyn/corpus.hpp"
#include "pubdyn/metrics.hpp"
#include "pubdyn/synth.hpp"

namespace {

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  pubdyn::synth::SynthConfig config;
  config.n_accounts = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
  config.comment_rate = 1.5;
  config.write_message_refs = false;
  const auto generated = pubdyn::synth::generate(config);
  const auto corpus = pubdyn::build_corpus(generated.posts, generated.comments);
  std::printf("corpus: %zu posts, %zu comments\n", corpus.posts().size(), corpus.comments().size());
  std::printf("%-40s %12s %12s %8s\n", "metric", "serial_s", "parallel_s", "speedup");

  double serial_total = 0, parallel_total = 0;
  bool identical = true;
  for (auto kind : pubdyn::kAllMetrics) {
    pubdyn::DistributionResult serial, parallel;
    const double ts = seconds([&] { serial = pubdyn::reference::compute_distribution(corpus, kind); });
    const double tp = seconds([&] { parallel = pubdyn::compute_distribution(corpus, kind, 0); });
    identical = identical && serial == parallel;
    serial_total += ts;
    parallel_total += tp;
    std::printf("%-40s %12.6f %12.6f %8.2f\n", std::string(pubdyn::to_string(kind)).c_str(), ts,
                tp, tp > 0 ? ts / tp : 0.0);
  }
  std::printf("%-40s %12.6f %12.6f %8.2f\n", "total", serial_total, parallel_total,
              parallel_total > 0 ? serial_total / parallel_total : 0.0);
  std::printf("threads: %d, results identical: %s\n", omp_get_max_threads(), identical ? "yes" : "no");
  return identical ? 0 : 1;
}
