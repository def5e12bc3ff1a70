#pragma once

// Shared helpers and independent oracles for the test suite. Oracles here
// stay deliberately naive and separate from the library code paths they check.

#include "fbc/words.hpp"

#include <random>
#include <vector>

namespace testutil {

using fbc::Letter;
using fbc::ReducedWord;

inline std::vector<Letter> random_letters(std::mt19937_64& rng, int rank, int len) {
  std::vector<Letter> out;
  for (int i = 0; i < len; ++i) {
    int k = static_cast<int>(rng() % (2 * rank));
    out.push_back(static_cast<Letter>((k / 2 + 1) * (k % 2 == 0 ? 1 : -1)));
  }
  return out;
}

inline ReducedWord random_reduced_word(std::mt19937_64& rng, int rank, int len) {
  std::vector<Letter> out;
  while (static_cast<int>(out.size()) < len) {
    int k = static_cast<int>(rng() % (2 * rank));
    Letter x = static_cast<Letter>((k / 2 + 1) * (k % 2 == 0 ? 1 : -1));
    if (!out.empty() && out.back() == fbc::inverse(x)) continue;
    out.push_back(x);
  }
  return ReducedWord(std::move(out));
}

// Repeated-scan reduction, independent of the stack-based library routine.
inline std::vector<Letter> naive_reduce(std::vector<Letter> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] == fbc::inverse(w[i + 1])) {
        w.erase(w.begin() + i, w.begin() + i + 2);
        changed = true;
        break;
      }
    }
  }
  return w;
}

// Substitution oracle: expand fully, then naive-reduce.
inline ReducedWord naive_apply(const fbc::FreeAutomorphism& phi, const ReducedWord& w) {
  std::vector<Letter> out;
  for (Letter x : w.letters()) {
    const ReducedWord& im = phi.image(fbc::generator_index(x));
    if (x > 0) {
      for (Letter y : im.letters()) out.push_back(y);
    } else {
      for (auto it = im.letters().rbegin(); it != im.letters().rend(); ++it)
        out.push_back(fbc::inverse(*it));
    }
  }
  return ReducedWord(naive_reduce(std::move(out)));
}

// Random automorphism assembled from at most `moves` elementary Nielsen moves.
inline fbc::FreeAutomorphism random_automorphism(std::mt19937_64& rng, int rank, int moves) {
  auto phi = fbc::FreeAutomorphism::identity(rank);
  for (int m = 0; m < moves; ++m) {
    int kind = static_cast<int>(rng() % 5);
    int i = static_cast<int>(rng() % rank) + 1;
    int j = static_cast<int>(rng() % rank) + 1;
    if (kind != 4 && i == j) continue;
    auto id = fbc::FreeAutomorphism::identity(rank);
    std::vector<ReducedWord> im = id.images();
    Letter xi = static_cast<Letter>(i), xj = static_cast<Letter>(j);
    switch (kind) {
      case 0: im[i - 1] = ReducedWord({xi, xj}); break;
      case 1: im[i - 1] = ReducedWord({xi, fbc::inverse(xj)}); break;
      case 2: im[i - 1] = ReducedWord({xj, xi}); break;
      case 3: im[i - 1] = ReducedWord({fbc::inverse(xj), xi}); break;
      case 4: im[i - 1] = ReducedWord({fbc::inverse(xi)}); break;
    }
    phi = fbc::compose(phi, fbc::FreeAutomorphism(rank, std::move(im)));
  }
  return phi;
}

inline ReducedWord word_from(std::initializer_list<int> xs) {
  std::vector<Letter> ls;
  for (int x : xs) ls.push_back(static_cast<Letter>(x));
  return ReducedWord(ls);
}

inline fbc::CyclicWord cyc_from(std::initializer_list<int> xs) {
  std::vector<Letter> ls;
  for (int x : xs) ls.push_back(static_cast<Letter>(x));
  return fbc::CyclicWord::from_cyclically_reduced(ls);
}

// The running examples: fib = (a -> ab, b -> a) on F2; e1 adds a fixed c.
inline fbc::FreeAutomorphism fibonacci() {
  return fbc::FreeAutomorphism(2, {word_from({1, 2}), word_from({1})});
}

inline fbc::FreeAutomorphism e1_automorphism() {
  return fbc::FreeAutomorphism(3, {word_from({1, 2}), word_from({1}), word_from({3})});
}

}  // namespace testutil
