#pragma once

// Exact algebra of a finitely generated free group F: reduced words,
// cyclic words (conjugacy classes), and automorphisms given by basis images.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbc {

// A letter is +k for the k-th basis generator (1-based) or -k for its inverse.
using Letter = std::int8_t;

constexpr int kMaxRank = 26;

inline Letter inverse(Letter x) { return static_cast<Letter>(-x); }
inline int generator_index(Letter x) { return x > 0 ? x : -x; }

// Fixed total order on letters: a < a' < b < b' < ...
inline int letter_key(Letter x) {
  return 2 * (generator_index(x) - 1) + (x < 0 ? 1 : 0);
}

struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ReducedWord {
 public:
  ReducedWord() = default;
  explicit ReducedWord(std::vector<Letter> reduced) : letters_(std::move(reduced)) {}

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  bool operator==(const ReducedWord& o) const { return letters_ == o.letters_; }
  bool operator!=(const ReducedWord& o) const { return !(*this == o); }
  bool operator<(const ReducedWord& o) const {
    return std::lexicographical_compare(
        letters_.begin(), letters_.end(), o.letters_.begin(), o.letters_.end(),
        [](Letter a, Letter b) { return letter_key(a) < letter_key(b); });
  }

  ReducedWord inverted() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& x : out) x = inverse(x);
    return ReducedWord(std::move(out));
  }

 private:
  std::vector<Letter> letters_;
};

// Free reduction: cancel adjacent x x^{-1} pairs. Idempotent.
inline ReducedWord reduce(const std::vector<Letter>& letters, int rank) {
  std::vector<Letter> stack;
  stack.reserve(letters.size());
  for (Letter x : letters) {
    if (x == 0 || generator_index(x) > rank)
      throw input_error("letter outside declared basis of rank " + std::to_string(rank));
    if (!stack.empty() && stack.back() == inverse(x))
      stack.pop_back();
    else
      stack.push_back(x);
  }
  return ReducedWord(std::move(stack));
}

// Concatenate two reduced words and reduce across the seam only.
inline ReducedWord concat(const ReducedWord& a, const ReducedWord& b) {
  std::vector<Letter> out = a.letters();
  for (Letter x : b.letters()) {
    if (!out.empty() && out.back() == inverse(x))
      out.pop_back();
    else
      out.push_back(x);
  }
  return ReducedWord(std::move(out));
}

// Conjugacy class of F as a canonical cyclic word: cyclically reduced and
// rotated to the lexicographically least position under the fixed letter
// order. A class and its inverse are distinct.
class CyclicWord {
 public:
  CyclicWord() : canonical_(true) {}

  static CyclicWord from_cyclically_reduced(std::vector<Letter> letters) {
    CyclicWord w;
    w.letters_ = std::move(letters);
    w.canonicalize();
    return w;
  }

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  bool canonical() const { return canonical_; }

  bool operator==(const CyclicWord& o) const { return letters_ == o.letters_; }
  bool operator!=(const CyclicWord& o) const { return !(*this == o); }
  bool operator<(const CyclicWord& o) const {
    if (letters_.size() != o.letters_.size()) return letters_.size() < o.letters_.size();
    return std::lexicographical_compare(
        letters_.begin(), letters_.end(), o.letters_.begin(), o.letters_.end(),
        [](Letter a, Letter b) { return letter_key(a) < letter_key(b); });
  }

  CyclicWord inverted() const {
    std::vector<Letter> out(letters_.rbegin(), letters_.rend());
    for (auto& x : out) x = inverse(x);
    return from_cyclically_reduced(std::move(out));
  }

  ReducedWord representative() const { return ReducedWord(letters_); }

 private:
  void canonicalize() {
    const std::size_t n = letters_.size();
    if (n <= 1) {
      canonical_ = true;
      return;
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        int kr = letter_key(letters_[(r + i) % n]);
        int kb = letter_key(letters_[(best + i) % n]);
        if (kr != kb) {
          if (kr < kb) best = r;
          break;
        }
      }
    }
    if (best != 0) std::rotate(letters_.begin(), letters_.begin() + best, letters_.end());
    canonical_ = true;
  }

  std::vector<Letter> letters_;
  bool canonical_;
};

// Peel conjugator: w = conjugator . core . conjugator^{-1}.
inline std::pair<CyclicWord, ReducedWord> cyclic_reduce(const ReducedWord& w) {
  std::vector<Letter> ls = w.letters();
  std::size_t lo = 0, hi = ls.size();
  while (hi - lo >= 2 && ls[lo] == inverse(ls[hi - 1])) {
    ++lo;
    --hi;
  }
  std::vector<Letter> conj(ls.begin(), ls.begin() + lo);
  std::vector<Letter> core(ls.begin() + lo, ls.begin() + hi);
  return {CyclicWord::from_cyclically_reduced(std::move(core)),
          ReducedWord(std::move(conj))};
}

struct not_an_automorphism : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct effort_exhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct missing_inverse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An automorphism of F presented by the images of the basis generators.
// An inverse, when present, has been verified by composition.
class FreeAutomorphism {
 public:
  FreeAutomorphism() : rank_(0) {}
  FreeAutomorphism(int rank, std::vector<ReducedWord> images)
      : rank_(rank), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != rank)
      throw input_error("automorphism needs one image per basis generator");
  }

  static FreeAutomorphism identity(int rank) {
    std::vector<ReducedWord> im;
    im.reserve(rank);
    for (int i = 1; i <= rank; ++i) im.emplace_back(std::vector<Letter>{static_cast<Letter>(i)});
    return FreeAutomorphism(rank, std::move(im));
  }

  int rank() const { return rank_; }
  const std::vector<ReducedWord>& images() const { return images_; }
  const ReducedWord& image(int gen_index) const { return images_[gen_index - 1]; }

  bool has_verified_inverse() const { return inverse_images_.has_value(); }
  const std::vector<ReducedWord>& inverse_images() const {
    if (!inverse_images_) throw missing_inverse("no verified inverse stored");
    return *inverse_images_;
  }
  void set_verified_inverse(std::vector<ReducedWord> inv) { inverse_images_ = std::move(inv); }

  bool is_identity() const {
    for (int i = 1; i <= rank_; ++i) {
      const auto& im = images_[i - 1];
      if (im.size() != 1 || im[0] != static_cast<Letter>(i)) return false;
    }
    return true;
  }

  bool operator==(const FreeAutomorphism& o) const {
    return rank_ == o.rank_ && images_ == o.images_;
  }

 private:
  int rank_;
  std::vector<ReducedWord> images_;
  std::optional<std::vector<ReducedWord>> inverse_images_;
};

namespace detail {
inline ReducedWord substitute(const std::vector<ReducedWord>& images, int rank,
                              const ReducedWord& w) {
  std::vector<Letter> out;
  for (Letter x : w.letters()) {
    if (generator_index(x) > rank) throw input_error("word letter outside automorphism basis");
    const ReducedWord& im = images[generator_index(x) - 1];
    if (x > 0) {
      for (Letter y : im.letters()) {
        if (!out.empty() && out.back() == inverse(y))
          out.pop_back();
        else
          out.push_back(y);
      }
    } else {
      for (auto it = im.letters().rbegin(); it != im.letters().rend(); ++it) {
        Letter y = inverse(*it);
        if (!out.empty() && out.back() == inverse(y))
          out.pop_back();
        else
          out.push_back(y);
      }
    }
  }
  return ReducedWord(std::move(out));
}
}  // namespace detail

inline ReducedWord apply(const FreeAutomorphism& phi, const ReducedWord& w) {
  return detail::substitute(phi.images(), phi.rank(), w);
}

inline ReducedWord apply_inverse(const FreeAutomorphism& phi, const ReducedWord& w) {
  return detail::substitute(phi.inverse_images(), phi.rank(), w);
}

// compose(phi, psi) = phi after psi: apply(compose(phi,psi), w) == apply(phi, apply(psi, w)).
inline FreeAutomorphism compose(const FreeAutomorphism& phi, const FreeAutomorphism& psi) {
  if (phi.rank() != psi.rank()) throw input_error("compose: rank mismatch");
  std::vector<ReducedWord> im;
  im.reserve(psi.rank());
  for (const auto& w : psi.images()) im.push_back(apply(phi, w));
  FreeAutomorphism out(phi.rank(), std::move(im));
  if (phi.has_verified_inverse() && psi.has_verified_inverse()) {
    // (phi psi)^{-1} = psi^{-1} phi^{-1}
    std::vector<ReducedWord> inv;
    inv.reserve(phi.rank());
    for (const auto& w : phi.inverse_images())
      inv.push_back(detail::substitute(psi.inverse_images(), psi.rank(), w));
    out.set_verified_inverse(std::move(inv));
  }
  return out;
}

inline bool fixes_basis(const std::vector<ReducedWord>& images, int rank) {
  for (int i = 1; i <= rank; ++i) {
    const auto& im = images[i - 1];
    if (im.size() != 1 || im[0] != static_cast<Letter>(i)) return false;
  }
  return true;
}

namespace detail {

struct NielsenState {
  std::vector<ReducedWord> tuple;   // current images, being reduced toward the basis
  FreeAutomorphism accumulated;     // product of the elementary moves applied so far
};

inline std::size_t total_length(const std::vector<ReducedWord>& t) {
  std::size_t s = 0;
  for (const auto& w : t) s += w.size();
  return s;
}

inline std::string tuple_key(const std::vector<ReducedWord>& t) {
  std::string k;
  for (const auto& w : t) {
    for (Letter x : w.letters()) k.push_back(static_cast<char>(letter_key(x) + 33));
    k.push_back(' ');
  }
  return k;
}

// Elementary Nielsen automorphism nu with u_i replaced per `kind`, so that the
// running tuple stays equal to (phi . nu_1 ... nu_m)(basis).
// kind 0: x_i -> x_i x_j   1: x_i -> x_i x_j^{-1}
// kind 2: x_i -> x_j x_i   3: x_i -> x_j^{-1} x_i   4: x_i -> x_i^{-1}
inline FreeAutomorphism elementary(int rank, int kind, int i, int j) {
  auto id = FreeAutomorphism::identity(rank);
  std::vector<ReducedWord> im = id.images();
  Letter xi = static_cast<Letter>(i);
  Letter xj = static_cast<Letter>(j);
  switch (kind) {
    case 0: im[i - 1] = ReducedWord({xi, xj}); break;
    case 1: im[i - 1] = ReducedWord({xi, inverse(xj)}); break;
    case 2: im[i - 1] = ReducedWord({xj, xi}); break;
    case 3: im[i - 1] = ReducedWord({inverse(xj), xi}); break;
    case 4: im[i - 1] = ReducedWord({inverse(xi)}); break;
    default: throw std::logic_error("bad Nielsen move kind");
  }
  return FreeAutomorphism(rank, std::move(im));
}

inline ReducedWord transformed(const std::vector<ReducedWord>& t, int kind, int i, int j) {
  switch (kind) {
    case 0: return concat(t[i - 1], t[j - 1]);
    case 1: return concat(t[i - 1], t[j - 1].inverted());
    case 2: return concat(t[j - 1], t[i - 1]);
    case 3: return concat(t[j - 1].inverted(), t[i - 1]);
    case 4: return t[i - 1].inverted();
    default: throw std::logic_error("bad Nielsen move kind");
  }
}

}  // namespace detail

// Inversion by greedy Nielsen reduction of the image tuple. Moves that
// strictly shorten the tuple are taken first (lowest generator index wins
// ties); when none exists, length-preserving moves that lower a fixed
// lexicographic key keep the reduction moving. A genuine automorphism
// terminates at a signed permutation of the basis, which is then unwound.
inline FreeAutomorphism invert(const FreeAutomorphism& phi, int effort_bound = 4096) {
  if (effort_bound <= 0) throw input_error("invert: effort_bound must be positive");
  const int rank = phi.rank();
  detail::NielsenState st{phi.images(), FreeAutomorphism::identity(rank)};

  int moves = 0;
  bool allow_equal = false;
  while (true) {
    for (const auto& w : st.tuple)
      if (w.empty())
        throw not_an_automorphism("images do not generate freely (trivial relation found)");

    // Finished when the tuple is a signed permutation of the basis.
    bool all_single = true;
    for (const auto& w : st.tuple)
      if (w.size() != 1) { all_single = false; break; }
    if (all_single) break;

    std::size_t len = detail::total_length(st.tuple);
    std::string key = allow_equal ? detail::tuple_key(st.tuple) : std::string();
    bool moved = false;
    for (int i = 1; i <= rank && !moved; ++i) {
      for (int j = 1; j <= rank && !moved; ++j) {
        if (i == j) continue;
        for (int kind = 0; kind < 4 && !moved; ++kind) {
          ReducedWord cand = detail::transformed(st.tuple, kind, i, j);
          std::size_t new_len = len - st.tuple[i - 1].size() + cand.size();
          bool take = new_len < len;
          if (!take && allow_equal && new_len == len) {
            auto t2 = st.tuple;
            t2[i - 1] = cand;
            take = detail::tuple_key(t2) < key;
          }
          if (take) {
            st.tuple[i - 1] = cand;
            st.accumulated = compose(st.accumulated, detail::elementary(rank, kind, i, j));
            moved = true;
          }
        }
      }
    }
    if (!moved) {
      if (!allow_equal) {
        allow_equal = true;
        continue;
      }
      throw not_an_automorphism("Nielsen reduction stabilized above basis length");
    }
    allow_equal = false;
    if (++moves > effort_bound)
      throw effort_exhausted("invert: effort bound hit before stabilization");
  }

  // Unwind the signed permutation: first fix signs, then sort by swaps.
  std::vector<Letter> perm(rank);
  for (int i = 1; i <= rank; ++i) {
    Letter x = st.tuple[i - 1][0];
    if (x < 0) {
      st.tuple[i - 1] = st.tuple[i - 1].inverted();
      st.accumulated = compose(st.accumulated, detail::elementary(rank, 4, i, i));
    }
    perm[i - 1] = st.tuple[i - 1][0];
  }
  // Permutation sort via x_i <-> x_j swaps, each realized by three Nielsen moves
  // composed into a single permutation automorphism.
  for (int i = 1; i <= rank; ++i) {
    if (perm[i - 1] == i) continue;
    int j = i + 1;
    for (; j <= rank; ++j)
      if (perm[j - 1] == i) break;
    if (j > rank) throw not_an_automorphism("tuple is not a signed permutation of the basis");
    auto id = FreeAutomorphism::identity(rank);
    std::vector<ReducedWord> im = id.images();
    std::swap(im[i - 1], im[j - 1]);
    st.accumulated = compose(st.accumulated, FreeAutomorphism(rank, std::move(im)));
    std::swap(perm[i - 1], perm[j - 1]);
  }

  // phi . accumulated = id, so accumulated is the inverse; verify both sides.
  FreeAutomorphism inv = st.accumulated;
  auto left = compose(phi, inv);
  auto right = compose(inv, phi);
  if (!fixes_basis(left.images(), rank) || !fixes_basis(right.images(), rank))
    throw not_an_automorphism("composition with candidate inverse is not the identity");
  return inv;
}

// Attach a verified inverse to phi (throws if phi is not an automorphism).
inline void ensure_inverse(FreeAutomorphism& phi, int effort_bound = 4096) {
  if (phi.has_verified_inverse()) return;
  phi.set_verified_inverse(invert(phi, effort_bound).images());
}

inline CyclicWord apply_class(const FreeAutomorphism& phi, const CyclicWord& c) {
  return cyclic_reduce(apply(phi, c.representative())).first;
}

// k-fold application to a conjugacy class; negative k uses the verified inverse.
inline CyclicWord iterate_class(const FreeAutomorphism& phi, const CyclicWord& c, long k) {
  if (k == 0) return c;
  const bool backward = k < 0;
  if (backward && !phi.has_verified_inverse())
    throw missing_inverse("iterate_class: negative power needs a verified inverse");
  long n = backward ? -k : k;
  CyclicWord cur = c;
  for (long s = 0; s < n; ++s) {
    ReducedWord w = backward ? apply_inverse(phi, cur.representative())
                             : apply(phi, cur.representative());
    cur = cyclic_reduce(w).first;
  }
  return cur;
}

// Rendering in the CLI text syntax: inverse letters carry a trailing apostrophe.
inline std::string to_string(Letter x) {
  std::string s(1, static_cast<char>('a' + generator_index(x) - 1));
  if (x < 0) s += '\'';
  return s;
}

inline std::string to_string(const ReducedWord& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += to_string(w[i]);
  }
  return s;
}

inline std::string to_string(const CyclicWord& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ' ';
    s += to_string(c.letters()[i]);
  }
  return s + "]";
}

}  // namespace fbc
