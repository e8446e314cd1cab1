// Compares the serial reference kernels against the OpenMP ones on a
// synthetic corpus: batch Viterbi tagging and batch NLL evaluation.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "incexc/tagger.hpp"

using namespace incexc;

namespace {

std::vector<LabeledSentence> synthetic_corpus(int sentences, int max_len,
                                              std::uint64_t seed) {
  const std::vector<std::string> fillers = {"the",  "a",    "place", "was",
                                            "is",   "very", "quite", "we",
                                            "they", "and"};
  const std::vector<std::string> inc_words = {"friendly", "welcoming",
                                              "accessible", "spacious"};
  const std::vector<std::string> exc_words = {"crowded", "expensive", "dirty",
                                              "noisy"};

  std::mt19937_64 rng(seed);
  std::vector<LabeledSentence> corpus(sentences);
  for (int s = 0; s < sentences; ++s) {
    LabeledSentence& ls = corpus[s];
    ls.sentence.id = "s" + std::to_string(s);
    int len = 4 + static_cast<int>(rng() % (max_len - 4));
    for (int i = 0; i < len; ++i) {
      int roll = static_cast<int>(rng() % 10);
      if (roll < 7) {
        ls.sentence.tokens.push_back(fillers[rng() % fillers.size()]);
        ls.tags.push_back(BioTag::Outside);
      } else if (roll < 9) {
        ls.sentence.tokens.push_back(exc_words[rng() % exc_words.size()]);
        ls.tags.push_back(i > 0 && ls.tags.back() == BioTag::Exc
                              ? BioTag::Exc
                              : BioTag::BExc);
      } else {
        ls.sentence.tokens.push_back(inc_words[rng() % inc_words.size()]);
        ls.tags.push_back(BioTag::BInc);
      }
    }
  }
  return corpus;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int sentences = 20000;
  int repeats = 3;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--quick") {
      sentences = 2000;
      repeats = 1;
    }
  }

  auto corpus = synthetic_corpus(sentences, 24, 7);
  std::vector<Sentence> plain;
  plain.reserve(corpus.size());
  for (const auto& ls : corpus) plain.push_back(ls.sentence);

  // One quick epoch populates the symbol table with realistic weights.
  TrainConfig tcfg;
  tcfg.epochs = 1;
  features::FeatureConfig fcfg;
  auto model = tagger::train(corpus, fcfg, tcfg);

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled in this build\n");
#endif
  std::printf("corpus: %d sentences, features: %d\n", sentences,
              model.symbols.size());

  double serial_tag = 1e300, parallel_tag = 1e300;
  double serial_nll = 1e300, parallel_nll = 1e300;
  std::vector<std::vector<BioTag>> ref, par;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    ref = tagger::tag_corpus_serial(model, plain);
    serial_tag = std::min(serial_tag, seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    par = tagger::tag_corpus(model, plain, /*parallel=*/true);
    parallel_tag = std::min(parallel_tag, seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    double nll_s = tagger::corpus_nll(model, corpus, 0.1, /*parallel=*/false);
    serial_nll = std::min(serial_nll, seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    double nll_p = tagger::corpus_nll(model, corpus, 0.1, /*parallel=*/true);
    parallel_nll = std::min(parallel_nll, seconds_since(t0));

    if (nll_s != nll_p) {
      std::printf("FAIL: parallel NLL differs from serial\n");
      return 1;
    }
  }
  if (ref != par) {
    std::printf("FAIL: parallel tagging differs from serial\n");
    return 1;
  }

  std::printf("%-22s %10s %10s %8s\n", "kernel", "serial(s)", "openmp(s)",
              "speedup");
  std::printf("%-22s %10.3f %10.3f %7.2fx\n", "viterbi tagging", serial_tag,
              parallel_tag, serial_tag / parallel_tag);
  std::printf("%-22s %10.3f %10.3f %7.2fx\n", "corpus nll", serial_nll,
              parallel_nll, serial_nll / parallel_nll);
  std::printf("outputs identical: yes\n");
  return 0;
}
