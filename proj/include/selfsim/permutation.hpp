#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

/// A permutation of the letters {0, ..., d-1}, stored as its image array.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<int> images) : images_(std::move(images)) {
    validate();
  }

  static Permutation identity(int degree) {
    std::vector<int> img(static_cast<std::size_t>(degree));
    std::iota(img.begin(), img.end(), 0);
    return Permutation(std::move(img));
  }

  /// Parses disjoint-cycle notation over the given alphabet, e.g.
  /// "(0 1)(2 3)". "()" and the empty string denote the identity.
  static Permutation from_cycles(const std::string& text, int degree);

  int degree() const { return static_cast<int>(images_.size()); }
  int apply(int x) const { return images_[static_cast<std::size_t>(x)]; }
  int operator[](int x) const { return apply(x); }

  int preimage(int y) const {
    for (int x = 0; x < degree(); ++x)
      if (images_[static_cast<std::size_t>(x)] == y) return x;
    throw domain_error("permutation preimage: letter out of range");
  }

  Permutation inverse() const {
    std::vector<int> inv(images_.size());
    for (int x = 0; x < degree(); ++x) inv[static_cast<std::size_t>(images_[static_cast<std::size_t>(x)])] = x;
    return Permutation(std::move(inv));
  }

  bool is_identity() const {
    for (int x = 0; x < degree(); ++x)
      if (images_[static_cast<std::size_t>(x)] != x) return false;
    return true;
  }

  bool operator==(const Permutation& other) const { return images_ == other.images_; }
  bool operator!=(const Permutation& other) const { return !(*this == other); }

  std::string to_cycles() const {
    std::string out;
    std::vector<bool> seen(images_.size(), false);
    for (int x = 0; x < degree(); ++x) {
      if (seen[static_cast<std::size_t>(x)] || apply(x) == x) continue;
      out += '(';
      int y = x;
      bool first = true;
      while (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        if (!first) out += ' ';
        out += std::to_string(y);
        first = false;
        y = apply(y);
      }
      out += ')';
    }
    if (out.empty()) out = "()";
    return out;
  }

 private:
  void validate() const {
    std::vector<bool> seen(images_.size(), false);
    for (int y : images_) {
      if (y < 0 || y >= degree() || seen[static_cast<std::size_t>(y)])
        throw domain_error("permutation image array is not a bijection on 0.." +
                           std::to_string(degree() - 1));
      seen[static_cast<std::size_t>(y)] = true;
    }
  }

  std::vector<int> images_;
};

inline Permutation Permutation::from_cycles(const std::string& text, int degree) {
  std::vector<int> img(static_cast<std::size_t>(degree));
  std::iota(img.begin(), img.end(), 0);
  std::vector<bool> used(static_cast<std::size_t>(degree), false);

  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip_ws();
  while (i < text.size()) {
    if (text[i] != '(') throw domain_error("expected '(' in cycle notation: " + text);
    ++i;
    std::vector<int> cycle;
    while (true) {
      skip_ws();
      if (i >= text.size()) throw domain_error("unterminated cycle in: " + text);
      if (text[i] == ')') {
        ++i;
        break;
      }
      if (text[i] == ',') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
      if (j == i) throw domain_error(std::string("bad character '") + text[i] + "' in cycle notation");
      int letter = std::stoi(text.substr(i, j - i));
      i = j;
      if (letter < 0 || letter >= degree)
        throw domain_error("letter " + std::to_string(letter) + " out of range in permutation");
      if (used[static_cast<std::size_t>(letter)])
        throw domain_error("letter " + std::to_string(letter) + " repeated in permutation");
      used[static_cast<std::size_t>(letter)] = true;
      cycle.push_back(letter);
    }
    for (std::size_t k = 0; k < cycle.size(); ++k)
      img[static_cast<std::size_t>(cycle[k])] = cycle[(k + 1) % cycle.size()];
    skip_ws();
  }
  return Permutation(std::move(img));
}

}  // namespace selfsim
