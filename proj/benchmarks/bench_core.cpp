#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "tweetact/dataset.hpp"
#include "tweetact/ensemble.hpp"
#include "tweetact/explain.hpp"
#include "tweetact/metrics.hpp"
#include "tweetact/normalize.hpp"
#include "tweetact/rng.hpp"

using namespace tweetact;

namespace {

const Taxonomy kTax = Taxonomy::speech_acts();

const char* const kPieces[] = {"شكرا",  "للجميع", "هل",  "تعرف", "متي",     "يبدأ",
                               "@user1", "#الرياض", "http://t.co/x", "جمييييل", "؟", "!!",
                               "كتاب",  "مُعلّم",  "😀",  "2024", "أهلا"};

std::vector<std::string> tweets(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string t;
    const auto words = 4 + rng.uniform(12);
    for (std::uint64_t w = 0; w < words; ++w) {
      if (w) t.push_back(' ');
      t += kPieces[rng.uniform(std::size(kPieces))];
    }
    out.push_back(std::move(t));
  }
  return out;
}

ProbabilityMatrix random_matrix(std::uint64_t seed, std::size_t rows) {
  Rng rng(seed);
  ProbabilityMatrix m("m" + std::to_string(seed), kTax.names());
  std::vector<double> row(6);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (auto& v : row) sum += (v = rng.uniform01() + 1e-3);
    for (auto& v : row) v /= sum;
    m.add_row("r" + std::to_string(i), row);
  }
  return m;
}

void BM_NormalizeText(benchmark::State& state) {
  const auto corpus = tweets(1000, 1);
  const Normalizer n{NormalizationConfig{}};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(n.normalize(corpus[i++ % corpus.size()]));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_NormalizeText);

void BM_Fuse(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  std::vector<ProbabilityMatrix> ms;
  for (std::uint64_t m = 0; m < 4; ++m) ms.push_back(random_matrix(m, rows));
  for (auto _ : state) {
    auto fused = fuse(ms);
    benchmark::DoNotOptimize(argmax_labels(fused, kTax));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows));
}
BENCHMARK(BM_Fuse)->Arg(1000)->Arg(10000);

void BM_Metrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<ClassIndex> g(n), p(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = ClassIndex{rng.uniform(6)};
    p[i] = ClassIndex{rng.uniform(6)};
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(confusion(g, p, kTax)));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Metrics)->Arg(4468)->Arg(100000);

void BM_FitSurrogate(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> toks;
  for (std::size_t j = 0; j < d; ++j) toks.push_back("w" + std::to_string(j));
  const auto f = TextFeatures::from_tokens(toks);
  const auto samples = perturb(f, 1000, 5);
  Rng rng(6);
  std::vector<double> y(samples.size());
  for (auto& v : y) v = rng.uniform01();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_surrogate(samples, y, 1e-3));
  }
}
BENCHMARK(BM_FitSurrogate)->Arg(8)->Arg(30);

void BM_StratifiedSplit(benchmark::State& state) {
  LabeledDataset ds{kTax, {}};
  const std::size_t sizes[6] = {10907, 5407, 2477, 2352, 847, 362};
  std::size_t n = 0;
  for (std::size_t c = 0; c < 6; ++c)
    for (std::size_t i = 0; i < sizes[c]; ++i)
      ds.items.push_back({"s" + std::to_string(n++), {"كلمه"}, ClassIndex{c}, std::nullopt});
  for (auto _ : state) {
    benchmark::DoNotOptimize(stratified_split(ds));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_StratifiedSplit);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from another GCC
// release, so main comes from the macro instead.
BENCHMARK_MAIN();
