#pragma once

// Bundled graph-map fixtures used across the suite.

#include "fbc/graph_map.hpp"

#include "helpers.hpp"

namespace testutil {

// E1: a -> ab, b -> a, c -> c on the rank-3 rose, filtration {c} < {c,a,b}.
inline fbc::GraphSelfMap e1_map() {
  fbc::MarkedGraph rose = fbc::make_rose(3);
  std::map<std::string, fbc::EdgePath> images;
  images["a"] = {fbc::forward_dir(0), fbc::forward_dir(1)};
  images["b"] = {fbc::forward_dir(0)};
  images["c"] = {fbc::forward_dir(2)};
  return fbc::GraphSelfMap(std::move(rose), std::move(images), {{"c"}, {"c", "a", "b"}});
}

// Representative of E1^{-1}: a -> b, b -> b'a, c -> c, same filtration.
inline fbc::GraphSelfMap e1_inverse_map() {
  fbc::MarkedGraph rose = fbc::make_rose(3);
  std::map<std::string, fbc::EdgePath> images;
  images["a"] = {fbc::forward_dir(1)};
  images["b"] = {fbc::reverse_dir(fbc::forward_dir(1)), fbc::forward_dir(0)};
  images["c"] = {fbc::forward_dir(2)};
  return fbc::GraphSelfMap(std::move(rose), std::move(images), {{"c"}, {"c", "a", "b"}});
}

// Fibonacci on the rank-2 rose, single stratum.
inline fbc::GraphSelfMap fibonacci_map() {
  return fbc::GraphSelfMap::on_rose(2, {word_from({1, 2}), word_from({1})});
}

// a -> b, b -> c, c -> ab on the rank-3 rose (plastic stretch factor).
inline fbc::GraphSelfMap plastic_map() {
  return fbc::GraphSelfMap::on_rose(3, {word_from({2}), word_from({3}), word_from({1, 2})});
}

}  // namespace testutil
