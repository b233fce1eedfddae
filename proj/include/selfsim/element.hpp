#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/presentation.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

/// Default cap on the number of distinct states a bisimulation may visit.
inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

/// A group element: a freely reduced word over the generators of a shared
/// presentation, evaluated lazily through the recursion.
///
/// Convention used throughout: actions are right actions and composition is
/// left to right, so in g*h the factor g acts first. Words are consumed
/// leftmost letter first.
class Element {
 public:
  Element(PresentationPtr pres, GenWord word)
      : pres_(std::move(pres)), word_(freely_reduce(word)) {}

  static Element identity(PresentationPtr pres) { return Element(std::move(pres), {}); }

  static Element generator(PresentationPtr pres, int index, int exp = 1) {
    return Element(std::move(pres), {GenLetter{index, exp}});
  }

  static Element generator(const PresentationPtr& pres, const std::string& name, int exp = 1) {
    return generator(pres, pres->generator_index(name), exp);
  }

  const PresentationPtr& presentation() const { return pres_; }
  const GenWord& word() const { return word_; }
  std::size_t length() const { return word_.size(); }
  bool trivial_word() const { return word_.empty(); }

  Element inverse() const {
    GenWord w;
    w.reserve(word_.size());
    for (auto it = word_.rbegin(); it != word_.rend(); ++it)
      w.push_back(GenLetter{it->gen, -it->exp});
    return Element(pres_, std::move(w));
  }

  friend Element operator*(const Element& a, const Element& b) {
    a.require_same_presentation(b);
    GenWord w = a.word_;
    reduced_append(w, b.word_);
    return Element(a.pres_, std::move(w));
  }

  std::string to_string() const { return format_gen_word(*pres_, word_); }

  /// Canonical key of the freely reduced word, for memoization.
  std::vector<std::int32_t> key() const {
    std::vector<std::int32_t> k;
    k.reserve(word_.size());
    for (const GenLetter& l : word_)
      k.push_back(static_cast<std::int32_t>(l.gen * 2 + (l.exp < 0 ? 1 : 0)));
    return k;
  }

  void require_same_presentation(const Element& other) const {
    if (pres_ == other.pres_) return;
    if (pres_ && other.pres_ && *pres_ == *other.pres_) return;
    throw domain_error("elements belong to different presentations");
  }

 private:
  PresentationPtr pres_;
  GenWord word_;
};

namespace detail {

struct KeyHash {
  std::size_t operator()(const std::vector<std::int32_t>& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t v : k) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Applies g to a single letter: returns (x^g, g|_x), the image letter and
/// the freely reduced restriction. Computed across the factors of g,
/// threading the image letter: for a product the restriction of each factor
/// is taken at the letter produced by the factors before it.
inline std::pair<Letter, Element> act_letter(const Element& g, Letter x) {
  const Presentation& p = *g.presentation();
  if (x < 0 || x >= p.alphabet_size()) throw domain_error("act_letter: letter out of range");
  Letter y = x;
  GenWord rest;
  for (const GenLetter& l : g.word()) {
    const GeneratorRule& rule = p.rule(l.gen);
    if (l.exp > 0) {
      reduced_append(rest, rule.restrictions[static_cast<std::size_t>(y)]);
      y = rule.perm.apply(y);
    } else {
      Letter z = rule.perm.preimage(y);  // z^g = y, so z = y^(g^-1)
      reduced_append_inverse(rest, rule.restrictions[static_cast<std::size_t>(z)]);
      y = z;
    }
  }
  return {y, Element(g.presentation(), std::move(rest))};
}

/// Image of a word under g, consuming it left to right.
inline Word act_word(const Element& g, const Word& v) {
  Word out;
  out.reserve(v.size());
  Element cur = g;
  for (Letter x : v) {
    auto [y, next] = act_letter(cur, x);
    out.push_back(y);
    cur = std::move(next);
  }
  return out;
}

/// The restriction g|_v. restrict_word(g, {}) is g itself.
inline Element restrict_word(const Element& g, const Word& v) {
  Element cur = g;
  for (Letter x : v) cur = act_letter(cur, x).second;
  return cur;
}

/// Decides whether g acts trivially on the whole tree by exploring the
/// restriction closure of g and checking that every state fixes every
/// letter. Throws budget_error if more than `budget` distinct states are
/// visited; never returns a wrong answer.
inline bool is_identity(const Element& g, std::size_t budget = kDefaultStateBudget) {
  const int d = g.presentation()->alphabet_size();
  std::unordered_set<std::vector<std::int32_t>, detail::KeyHash> seen;
  std::deque<Element> queue;
  seen.insert(g.key());
  queue.push_back(g);
  while (!queue.empty()) {
    Element e = std::move(queue.front());
    queue.pop_front();
    for (Letter x = 0; x < d; ++x) {
      auto [y, r] = act_letter(e, x);
      if (y != x) return false;
      if (seen.insert(r.key()).second) {
        if (seen.size() > budget)
          throw budget_error("identity test exceeded state budget of " + std::to_string(budget));
        queue.push_back(std::move(r));
      }
    }
  }
  return true;
}

/// Decides whether g and h act identically on every word.
inline bool equal(const Element& g, const Element& h, std::size_t budget = kDefaultStateBudget) {
  g.require_same_presentation(h);
  if (g.word() == h.word()) return true;
  return is_identity(g * h.inverse(), budget);
}

/// The permutation induced by g on the level-n words, as an index array:
/// result[lex_index(v)] = lex_index(v^g).
inline std::vector<std::uint64_t> permutation_on_level(const Element& g, int level,
                                                       std::uint64_t budget = 1u << 22) {
  const int d = g.presentation()->alphabet_size();
  if (level < 0) throw domain_error("level must be nonnegative");
  std::uint64_t count = 1;
  for (int i = 0; i < level; ++i) {
    count *= static_cast<std::uint64_t>(d);
    if (count > budget) throw budget_error("level permutation exceeds budget of " + std::to_string(budget));
  }
  std::vector<std::uint64_t> out(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Word v = word_from_index(idx, level, d);
    out[idx] = lex_index(act_word(g, v), d);
  }
  return out;
}

/// Parses a word over a presentation's generators ("a b^-1 a"; "1" is the
/// identity) into an element.
inline Element parse_element(const PresentationPtr& pres, const std::string& text) {
  std::map<std::string, int> names;
  for (int i = 0; i < pres->generator_count(); ++i) names[pres->rule(i).name] = i;
  GenWord w = detail::parse_gen_word_tokens(detail::split_tokens(text), names, 1);
  return Element(pres, std::move(w));
}

}  // namespace selfsim
