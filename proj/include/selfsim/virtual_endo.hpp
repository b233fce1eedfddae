#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/intmat.hpp"
#include "selfsim/presentation.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

/// Opaque element of a concrete group; every plugin here represents its
/// elements as a fixed-length integer coordinate vector.
using GroupElem = std::vector<long long>;

/// A group with computable arithmetic, a virtual endomorphism phi defined
/// on a finite-index subgroup, a right coset transversal {r_x} for the
/// domain, and conjugators {h_x} (identity by default). Together these data
/// define a self-similar action on the d-ary tree:
///
///   (x w)^g = y w^{h_x^-1 phi(r_x g r_y^-1) h_y},   r_x g r_y^-1 in Dom phi.
///
/// Implementations must be pure and value-semantic.
class ConcreteGroup {
 public:
  virtual ~ConcreteGroup() = default;

  virtual int degree() const = 0;  // d = number of cosets of Dom phi
  virtual GroupElem identity() const = 0;
  virtual GroupElem multiply(const GroupElem& a, const GroupElem& b) const = 0;
  virtual GroupElem invert(const GroupElem& a) const = 0;
  virtual bool is_equal(const GroupElem& a, const GroupElem& b) const { return a == b; }
  virtual bool dom_contains(const GroupElem& a) const = 0;
  virtual GroupElem phi_apply(const GroupElem& a) const = 0;  // defined exactly on dom_contains
  virtual GroupElem transversal(int x) const = 0;
  virtual GroupElem conjugator(int /*x*/) const { return identity(); }
  virtual std::string describe(const GroupElem& a) const { return format_vec(a); }
  virtual std::string name() const = 0;

  /// Checks that the transversal elements lie in pairwise distinct cosets.
  void validate_transversal() const {
    for (int x = 0; x < degree(); ++x)
      for (int y = x + 1; y < degree(); ++y)
        if (dom_contains(multiply(transversal(x), invert(transversal(y)))))
          throw domain_error(name() + ": transversal elements " + std::to_string(x) + " and " +
                             std::to_string(y) + " lie in the same coset");
  }
};

/// One step of the triple-defined action: finds the unique y with
/// r_x g r_y^-1 in Dom phi and returns (y, h_x^-1 phi(r_x g r_y^-1) h_y).
inline std::pair<Letter, GroupElem> triple_step(const ConcreteGroup& g, const GroupElem& elem,
                                                Letter x) {
  if (x < 0 || x >= g.degree()) throw domain_error("letter out of range for this group");
  GroupElem rxg = g.multiply(g.transversal(x), elem);
  int found = -1;
  for (int y = 0; y < g.degree(); ++y) {
    if (g.dom_contains(g.multiply(rxg, g.invert(g.transversal(y))))) {
      if (found >= 0)
        throw domain_error(g.name() + ": transversal is invalid (two cosets match letter " +
                           std::to_string(x) + ")");
      found = y;
    }
  }
  if (found < 0)
    throw domain_error(g.name() + ": transversal is invalid (no coset matches letter " +
                       std::to_string(x) + ")");
  GroupElem core = g.phi_apply(g.multiply(rxg, g.invert(g.transversal(found))));
  GroupElem next = g.multiply(g.multiply(g.invert(g.conjugator(x)), core), g.conjugator(found));
  return {found, next};
}

/// Image of a word under the action defined by the triple, consuming the
/// word left to right.
inline Word act_via_triple(const ConcreteGroup& g, GroupElem elem, const Word& v) {
  Word out;
  out.reserve(v.size());
  for (Letter x : v) {
    auto [y, next] = triple_step(g, elem, x);
    out.push_back(y);
    elem = std::move(next);
  }
  return out;
}

/// Closes a generating set under the state map g -> h_x^-1 phi(r_x g r_y^-1) h_y
/// and, when the closure is finite within the budget, packages the states as
/// a wreath-recursion presentation (one generator per state). The resulting
/// presentation reproduces the action letter for letter.
inline Presentation closure_presentation(const ConcreteGroup& g, const std::vector<GroupElem>& gens,
                                         std::size_t budget = 4096) {
  const int d = g.degree();
  std::vector<GroupElem> states;
  std::map<std::vector<long long>, int> index;  // exact coordinates; is_equal is coordinatewise

  auto intern = [&](const GroupElem& e) -> int {
    auto it = index.find(e);
    if (it != index.end()) return it->second;
    int idx = static_cast<int>(states.size());
    states.push_back(e);
    index.emplace(e, idx);
    if (states.size() > budget)
      throw budget_error("state closure exceeded budget of " + std::to_string(budget) + " states (" +
                         std::to_string(states.size()) + " reached)");
    return idx;
  };

  for (const GroupElem& e : gens) intern(e);
  if (states.empty()) intern(g.identity());

  std::vector<std::vector<std::pair<Letter, int>>> table;  // per state, per letter: (y, next index)
  for (std::size_t i = 0; i < states.size(); ++i) {
    GroupElem e = states[i];
    std::vector<std::pair<Letter, int>> row;
    for (Letter x = 0; x < d; ++x) {
      auto [y, next] = triple_step(g, e, x);
      row.emplace_back(y, intern(next));
    }
    table.push_back(std::move(row));
  }

  auto state_name = [&](std::size_t i) {
    if (states.size() <= 26) return std::string(1, static_cast<char>('a' + i));
    return "g" + std::to_string(i);
  };

  std::vector<GeneratorRule> rules;
  for (std::size_t i = 0; i < states.size(); ++i) {
    GeneratorRule rule;
    rule.name = state_name(i);
    std::vector<int> img(static_cast<std::size_t>(d));
    rule.restrictions.assign(static_cast<std::size_t>(d), GenWord{});
    for (Letter x = 0; x < d; ++x) {
      img[static_cast<std::size_t>(x)] = table[i][static_cast<std::size_t>(x)].first;
      int next = table[i][static_cast<std::size_t>(x)].second;
      if (!g.is_equal(states[static_cast<std::size_t>(next)], g.identity()))
        rule.restrictions[static_cast<std::size_t>(x)] = {GenLetter{next, 1}};
    }
    rule.perm = Permutation(std::move(img));
    rules.push_back(std::move(rule));
  }
  return Presentation(d, std::move(rules));
}

struct Survives {};
using KernelDepth = std::variant<int, Survives>;

/// Probes the kernel condition for a single element: the smallest n <= n_max
/// with g outside Dom phi^n (applying phi while membership holds), or
/// "survives" when g is in Dom phi^{n_max}. The conjugate sweep of the full
/// kernel description is deliberately not performed; this is a
/// necessary-condition probe only.
inline KernelDepth kernel_intersection_depth(const ConcreteGroup& g, GroupElem elem, int n_max) {
  if (n_max < 1) throw domain_error("n_max must be at least 1");
  for (int n = 1; n <= n_max; ++n) {
    if (!g.dom_contains(elem)) return n;
    elem = g.phi_apply(elem);
  }
  return Survives{};
}

}  // namespace selfsim
