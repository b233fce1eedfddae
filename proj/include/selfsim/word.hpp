#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

/// A letter of the alphabet {0, ..., d-1}.
using Letter = int;

/// A vertex of the rooted tree: a finite word over the alphabet, written
/// left to right. The leftmost letter is the level-1 letter (the one an
/// automorphism consumes first); the parent of a word is obtained by
/// dropping its last letter.
using Word = std::vector<Letter>;

inline Word parent(Word w) {
  if (!w.empty()) w.pop_back();
  return w;
}

/// Lexicographic index of a word among all words of its length, with the
/// leftmost letter as the most significant digit.
inline std::uint64_t lex_index(const Word& w, int alphabet_size) {
  std::uint64_t idx = 0;
  for (Letter x : w) idx = idx * static_cast<std::uint64_t>(alphabet_size) + static_cast<std::uint64_t>(x);
  return idx;
}

inline Word word_from_index(std::uint64_t idx, int length, int alphabet_size) {
  Word w(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = static_cast<Letter>(idx % static_cast<std::uint64_t>(alphabet_size));
    idx /= static_cast<std::uint64_t>(alphabet_size);
  }
  return w;
}

inline void check_letters(const Word& w, int alphabet_size) {
  for (Letter x : w)
    if (x < 0 || x >= alphabet_size)
      throw domain_error("letter " + std::to_string(x) + " out of range for alphabet of size " +
                         std::to_string(alphabet_size));
}

/// Formats a word as a compact digit string when all letters are single
/// digits, and as space-separated integers otherwise. The empty word is "-".
inline std::string format_word(const Word& w) {
  if (w.empty()) return "-";
  bool compact = true;
  for (Letter x : w)
    if (x > 9) compact = false;
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!compact && i > 0) out += ' ';
    out += std::to_string(w[i]);
  }
  return out;
}

/// Inverse of format_word. Accepts "-" or "" for the empty word, a digit
/// string ("0110"), or whitespace/comma separated integers ("10, 3, 2").
inline Word parse_word(const std::string& text, int alphabet_size) {
  Word w;
  if (text.empty() || text == "-") return w;
  bool separated = text.find_first_of(" ,\t") != std::string::npos;
  if (separated) {
    std::string cur;
    auto flush = [&] {
      if (cur.empty()) return;
      w.push_back(std::stoi(cur));
      cur.clear();
    };
    for (char c : text) {
      if (c == ' ' || c == ',' || c == '\t')
        flush();
      else if (c >= '0' && c <= '9')
        cur += c;
      else
        throw domain_error(std::string("bad character '") + c + "' in word");
    }
    flush();
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw domain_error(std::string("bad character '") + c + "' in word");
      w.push_back(c - '0');
    }
  }
  check_letters(w, alphabet_size);
  return w;
}

}  // namespace selfsim
