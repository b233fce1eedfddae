#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selfsim/automaton.hpp"
#include "selfsim/element.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/presentation.hpp"

namespace selfsim {

namespace detail {

/// A set of pairwise non-equal elements. Lookup buckets candidates by a
/// shallow level-permutation signature before falling back to `equal`, so
/// insertion order fully determines the stored representatives.
class CanonicalSet {
 public:
  explicit CanonicalSet(PresentationPtr pres, std::size_t equal_budget = kDefaultStateBudget)
      : pres_(std::move(pres)), equal_budget_(equal_budget) {
    int d = pres_->alphabet_size();
    sig_level_ = 1;
    long long n = d;
    while (n < 8 && sig_level_ < 3) {
      n *= d;
      ++sig_level_;
    }
  }

  std::size_t size() const { return elems_.size(); }
  const Element& at(std::size_t i) const { return elems_[i]; }
  const std::vector<Element>& elements() const { return elems_; }

  std::optional<int> find(const Element& e) const {
    auto it = buckets_.find(signature(e));
    if (it == buckets_.end()) return std::nullopt;
    for (int i : it->second)
      if (equal(elems_[static_cast<std::size_t>(i)], e, equal_budget_)) return i;
    return std::nullopt;
  }

  /// Returns (index, true) when e was new, (index of the equal
  /// representative, false) otherwise.
  std::pair<int, bool> insert(const Element& e) {
    auto sig = signature(e);
    auto& bucket = buckets_[sig];
    for (int i : bucket)
      if (equal(elems_[static_cast<std::size_t>(i)], e, equal_budget_)) return {i, false};
    int idx = static_cast<int>(elems_.size());
    elems_.push_back(e);
    bucket.push_back(idx);
    return {idx, true};
  }

 private:
  std::vector<std::int32_t> signature(const Element& e) const {
    auto perm = permutation_on_level(e, sig_level_);
    std::vector<std::int32_t> sig(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) sig[i] = static_cast<std::int32_t>(perm[i]);
    return sig;
  }

  PresentationPtr pres_;
  std::size_t equal_budget_;
  int sig_level_;
  std::vector<Element> elems_;
  std::unordered_map<std::vector<std::int32_t>, std::vector<int>, KeyHash> buckets_;
};

/// Nodes of a finite digraph that admit arbitrarily long incoming paths,
/// i.e. lie on a directed cycle or are reachable from one. Computed by
/// repeatedly deleting in-degree-zero nodes.
inline std::vector<bool> omega_limit(const std::vector<std::vector<int>>& succ) {
  std::size_t n = succ.size();
  std::vector<int> indeg(n, 0);
  for (const auto& out : succ)
    for (int j : out) ++indeg[static_cast<std::size_t>(j)];
  std::deque<int> zero;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) zero.push_back(static_cast<int>(i));
  std::vector<bool> alive(n, true);
  while (!zero.empty()) {
    int i = zero.front();
    zero.pop_front();
    alive[static_cast<std::size_t>(i)] = false;
    for (int j : succ[static_cast<std::size_t>(i)])
      if (--indeg[static_cast<std::size_t>(j)] == 0) zero.push_back(j);
  }
  return alive;
}

}  // namespace detail

/// The nucleus of a contracting action: a finite set of canonical elements
/// closed under restriction and inversion, containing the identity, with
/// precomputed restriction and output tables.
class Nucleus {
 public:
  Nucleus(PresentationPtr pres, std::vector<Element> members,
          std::size_t equal_budget = kDefaultStateBudget)
      : pres_(std::move(pres)), set_(pres_, equal_budget) {
    for (const Element& m : members) set_.insert(m);
    const int d = pres_->alphabet_size();
    identity_index_ = -1;
    for (std::size_t i = 0; i < set_.size(); ++i)
      if (is_identity(set_.at(i), equal_budget)) {
        identity_index_ = static_cast<int>(i);
        break;
      }
    if (identity_index_ < 0) throw domain_error("nucleus must contain the identity");
    restriction_.assign(set_.size(), std::vector<int>(static_cast<std::size_t>(d)));
    output_.assign(set_.size(), std::vector<Letter>(static_cast<std::size_t>(d)));
    for (std::size_t i = 0; i < set_.size(); ++i) {
      for (Letter x = 0; x < d; ++x) {
        auto [y, r] = act_letter(set_.at(i), x);
        auto idx = set_.find(r);
        if (!idx) throw domain_error("nucleus is not closed under restriction");
        restriction_[i][static_cast<std::size_t>(x)] = *idx;
        output_[i][static_cast<std::size_t>(x)] = y;
      }
      if (!set_.find(set_.at(i).inverse()))
        throw domain_error("nucleus is not closed under inversion");
    }
  }

  const PresentationPtr& presentation() const { return pres_; }
  int alphabet_size() const { return pres_->alphabet_size(); }
  int size() const { return static_cast<int>(set_.size()); }
  const Element& member(int i) const { return set_.at(static_cast<std::size_t>(i)); }
  int identity_index() const { return identity_index_; }
  int restriction(int i, Letter x) const {
    return restriction_[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)];
  }
  Letter output(int i, Letter x) const {
    return output_[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)];
  }

  std::optional<int> find(const Element& e) const { return set_.find(e); }

  std::vector<std::string> member_names() const {
    std::vector<std::string> names;
    names.reserve(set_.size());
    for (std::size_t i = 0; i < set_.size(); ++i) names.push_back(set_.at(i).to_string());
    return names;
  }

 private:
  PresentationPtr pres_;
  detail::CanonicalSet set_;
  int identity_index_;
  std::vector<std::vector<int>> restriction_;
  std::vector<std::vector<Letter>> output_;
};

/// Moore diagram of the nucleus: lambda(h, x) = x^h, pi(h, x) = h|_x.
inline MooreAutomaton moore_diagram(const Nucleus& n) {
  std::vector<std::string> labels = n.member_names();
  std::vector<std::vector<int>> pi(labels.size());
  std::vector<std::vector<Letter>> lambda(labels.size());
  for (int q = 0; q < n.size(); ++q) {
    for (Letter x = 0; x < n.alphabet_size(); ++x) {
      pi[static_cast<std::size_t>(q)].push_back(n.restriction(q, x));
      lambda[static_cast<std::size_t>(q)].push_back(n.output(q, x));
    }
  }
  return MooreAutomaton(n.alphabet_size(), std::move(labels), std::move(pi), std::move(lambda));
}

struct NucleusBudgets {
  std::size_t max_set_size = 5000;
  int max_rounds = 50;
  int depth_per_round = 16;
  std::size_t state_budget = kDefaultStateBudget;
};

struct ContractionReport {
  enum class Status { contracting, budget_exceeded };

  Status status = Status::budget_exceeded;
  int rounds = 0;
  std::size_t peak_candidates = 0;
  int absorption_depth = 0;
  double rho_estimate = 0.0;
  std::optional<Nucleus> nucleus;
  std::vector<Element> partial;      // candidate set reached when the budget ran out
  std::string budget_note;

  bool contracting() const { return status == Status::contracting; }
};

/// Empirical estimate of the contraction coefficient: for random reduced
/// words g of increasing length, measures max over |v| = depth of
/// |g restricted at v| / |g| and returns the mean depth-th root. Worst-case
/// over the level, hence biased upward; advisory only.
inline double estimate_contraction_coefficient(const PresentationPtr& pres, int samples = 20,
                                               int depth = 0, std::uint64_t seed = 0xC0FFEE) {
  const int d = pres->alphabet_size();
  if (depth <= 0) {
    depth = 1;
    long long n = d;
    while (n * d <= 64) {
      n *= d;
      ++depth;
    }
  }
  if (samples < 1) throw domain_error("samples must be positive");
  std::mt19937_64 rng(seed);
  const int gens = pres->generator_count();
  std::uint64_t level_count = 1;
  for (int i = 0; i < depth; ++i) level_count *= static_cast<std::uint64_t>(d);

  double total = 0.0;
  for (int s = 0; s < samples; ++s) {
    // Words must dwarf the level count, or the +O(1) tail of the
    // restriction length drowns the geometric decay being measured.
    std::size_t target_len =
        std::min<std::size_t>(50000, static_cast<std::size_t>(4 + s) * level_count);
    GenWord w;
    while (w.size() < target_len) {
      GenLetter l{static_cast<int>(rng() % static_cast<std::uint64_t>(gens)), (rng() & 1) ? 1 : -1};
      reduced_push(w, l);
    }
    Element g(pres, std::move(w));
    if (g.length() == 0) continue;
    std::size_t worst = 0;
    for (std::uint64_t idx = 0; idx < level_count; ++idx) {
      Word v = word_from_index(idx, depth, d);
      worst = std::max(worst, restrict_word(g, v).length());
    }
    double ratio = static_cast<double>(worst) / static_cast<double>(g.length());
    total += ratio == 0.0 ? 0.0 : std::pow(ratio, 1.0 / static_cast<double>(depth));
  }
  return total / static_cast<double>(samples);
}

/// Semi-algorithm for the nucleus. Starts from the restriction-and-inverse
/// closure of the generators, then repeatedly checks every pair product:
/// its restriction closure is expanded with the candidate set absorbing,
/// and any state with unboundedly deep occurrences (a directed cycle among
/// the non-absorbed states, plus everything such a cycle reaches) is added.
/// Once a full round adds nothing, every deep enough restriction of every
/// element lands in the candidate set, and the nucleus is read off as the
/// states of its restriction digraph lying on a directed cycle or reachable
/// from one. Budget exhaustion reports partial data; non-contraction is
/// never claimed.
inline ContractionReport compute_nucleus(const PresentationPtr& pres,
                                         const NucleusBudgets& budgets = NucleusBudgets{}) {
  const int d = pres->alphabet_size();
  ContractionReport report;
  detail::CanonicalSet candidates(pres, budgets.state_budget);

  auto fail_budget = [&](const std::string& note) {
    report.status = ContractionReport::Status::budget_exceeded;
    report.budget_note = note;
    report.partial = candidates.elements();
    report.peak_candidates = std::max(report.peak_candidates, candidates.size());
    return report;
  };

  // Closure of a seed set under restriction and inversion.
  std::deque<int> work;
  auto insert_closed = [&](const Element& e) -> bool {
    auto [idx, fresh] = candidates.insert(e);
    if (fresh) work.push_back(idx);
    return candidates.size() <= budgets.max_set_size;
  };

  if (!insert_closed(Element::identity(pres))) return fail_budget("seed closure");
  for (int i = 0; i < pres->generator_count(); ++i) {
    if (!insert_closed(Element::generator(pres, i))) return fail_budget("seed closure");
    if (!insert_closed(Element::generator(pres, i, -1))) return fail_budget("seed closure");
  }
  auto drain_closure = [&]() -> bool {
    while (!work.empty()) {
      int i = work.front();
      work.pop_front();
      Element e = candidates.at(static_cast<std::size_t>(i));
      if (!insert_closed(e.inverse())) return false;
      for (Letter x = 0; x < d; ++x)
        if (!insert_closed(act_letter(e, x).second)) return false;
    }
    return true;
  };
  if (!drain_closure()) return fail_budget("seed closure");

  // Expands the restriction closure of `p` with the candidate set absorbing.
  // Returns the non-absorbed states that recur at unbounded depth, or
  // nullopt when the expansion ran out of depth budget.
  auto expand_product = [&](const Element& p, std::vector<Element>& to_add) -> bool {
    if (candidates.find(p)) return true;
    detail::CanonicalSet outside(pres, budgets.state_budget);
    std::vector<std::vector<int>> succ;
    std::deque<std::pair<int, int>> frontier;  // (index, depth)
    outside.insert(p);
    succ.emplace_back();
    frontier.emplace_back(0, 0);
    while (!frontier.empty()) {
      auto [i, depth] = frontier.front();
      frontier.pop_front();
      if (depth >= budgets.depth_per_round) return false;
      Element e = outside.at(static_cast<std::size_t>(i));
      for (Letter x = 0; x < d; ++x) {
        Element r = act_letter(e, x).second;
        if (candidates.find(r)) {
          report.absorption_depth = std::max(report.absorption_depth, depth + 1);
          continue;
        }
        auto [j, fresh] = outside.insert(r);
        if (fresh) {
          succ.emplace_back();
          frontier.emplace_back(j, depth + 1);
          if (outside.size() + candidates.size() > budgets.max_set_size) return false;
        }
        succ[static_cast<std::size_t>(i)].push_back(j);
      }
    }
    std::vector<bool> recurrent = detail::omega_limit(succ);
    for (std::size_t i = 0; i < recurrent.size(); ++i)
      if (recurrent[i]) to_add.push_back(outside.at(i));
    return true;
  };

  bool stable = false;
  for (int round = 1; round <= budgets.max_rounds && !stable; ++round) {
    report.rounds = round;
    report.peak_candidates = std::max(report.peak_candidates, candidates.size());
    std::vector<Element> to_add;
    std::size_t count = candidates.size();
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t b = 0; b < count; ++b) {
        Element p = candidates.at(a) * candidates.at(b);
        if (!expand_product(p, to_add))
          return fail_budget("pair expansion for " + p.to_string());
      }
    }
    if (to_add.empty()) {
      stable = true;
      break;
    }
    for (const Element& e : to_add)
      if (!insert_closed(e)) return fail_budget("candidate growth");
    if (!drain_closure()) return fail_budget("candidate growth");
  }
  report.peak_candidates = std::max(report.peak_candidates, candidates.size());
  if (!stable) return fail_budget("round limit reached");

  // Extraction: keep the states of the restriction digraph that lie on a
  // directed cycle or are reachable from one. Transient products that only
  // occur at bounded depth are pruned here.
  std::vector<std::vector<int>> succ(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    for (Letter x = 0; x < d; ++x) {
      auto j = candidates.find(act_letter(candidates.at(i), x).second);
      succ[i].push_back(*j);
    }
  std::vector<bool> keep = detail::omega_limit(succ);
  std::vector<Element> members;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i]) members.push_back(candidates.at(i));

  report.status = ContractionReport::Status::contracting;
  report.nucleus.emplace(pres, std::move(members), budgets.state_budget);
  report.rho_estimate = estimate_contraction_coefficient(pres, 8);
  return report;
}

/// Identity test accelerated by a nucleus: the exploration of g's
/// restriction closure stops as soon as a state is recognized as a nucleus
/// element, either finishing that branch (identity) or refuting g at once
/// (any other member moves some word). Agrees with is_identity; falls back
/// to plain bisimulation when states stay outside the nucleus.
inline bool wordproblem_contracting(const Element& g, const Nucleus& nucleus,
                                    std::size_t budget = kDefaultStateBudget) {
  g.require_same_presentation(Element::identity(nucleus.presentation()));
  const int d = nucleus.alphabet_size();
  std::unordered_set<std::vector<std::int32_t>, detail::KeyHash> seen;
  std::deque<Element> queue;
  seen.insert(g.key());
  queue.push_back(g);
  while (!queue.empty()) {
    Element e = std::move(queue.front());
    queue.pop_front();
    if (auto idx = nucleus.find(e)) {
      if (*idx != nucleus.identity_index()) return false;
      continue;
    }
    for (Letter x = 0; x < d; ++x) {
      auto [y, r] = act_letter(e, x);
      if (y != x) return false;
      if (seen.insert(r.key()).second) {
        if (seen.size() > budget)
          throw budget_error("word problem exceeded state budget of " + std::to_string(budget));
        queue.push_back(std::move(r));
      }
    }
  }
  return true;
}

}  // namespace selfsim
