#pragma once

#include <string>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

/// A finite automaton over the alphabet: states with a transition function
/// pi(state, letter) and an output function lambda(state, letter). The
/// Moore diagram has an edge state -> pi(state, x) labeled "x|lambda(state, x)".
class MooreAutomaton {
 public:
  MooreAutomaton(int alphabet_size, std::vector<std::string> state_labels,
                 std::vector<std::vector<int>> transitions, std::vector<std::vector<Letter>> outputs)
      : d_(alphabet_size),
        labels_(std::move(state_labels)),
        pi_(std::move(transitions)),
        lambda_(std::move(outputs)) {
    if (pi_.size() != labels_.size() || lambda_.size() != labels_.size())
      throw domain_error("automaton tables must cover every state");
    for (std::size_t q = 0; q < labels_.size(); ++q) {
      if (static_cast<int>(pi_[q].size()) != d_ || static_cast<int>(lambda_[q].size()) != d_)
        throw domain_error("automaton tables must cover every letter");
      for (int x = 0; x < d_; ++x) {
        if (pi_[q][static_cast<std::size_t>(x)] < 0 ||
            pi_[q][static_cast<std::size_t>(x)] >= static_cast<int>(labels_.size()))
          throw domain_error("automaton transition out of range");
        if (lambda_[q][static_cast<std::size_t>(x)] < 0 || lambda_[q][static_cast<std::size_t>(x)] >= d_)
          throw domain_error("automaton output out of range");
      }
    }
  }

  int alphabet_size() const { return d_; }
  int state_count() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int q) const { return labels_[static_cast<std::size_t>(q)]; }
  int next_state(int q, Letter x) const { return pi_[static_cast<std::size_t>(q)][static_cast<std::size_t>(x)]; }
  Letter output(int q, Letter x) const { return lambda_[static_cast<std::size_t>(q)][static_cast<std::size_t>(x)]; }

  /// Runs the automaton from state q on a word, returning the output word.
  Word run(int q, const Word& v) const {
    Word out;
    out.reserve(v.size());
    for (Letter x : v) {
      out.push_back(output(q, x));
      q = next_state(q, x);
    }
    return out;
  }

  std::string to_dot(const std::string& graph_name = "moore") const {
    std::string dot = "digraph " + graph_name + " {\n";
    for (int q = 0; q < state_count(); ++q)
      dot += "  n" + std::to_string(q) + " [label=\"" + label(q) + "\"];\n";
    for (int q = 0; q < state_count(); ++q)
      for (int x = 0; x < d_; ++x)
        dot += "  n" + std::to_string(q) + " -> n" + std::to_string(next_state(q, x)) + " [label=\"" +
               std::to_string(x) + "|" + std::to_string(output(q, x)) + "\"];\n";
    dot += "}\n";
    return dot;
  }

 private:
  int d_;
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> pi_;
  std::vector<std::vector<Letter>> lambda_;
};

}  // namespace selfsim
