#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/permutation.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

/// One letter of a word over the generators: generator index and exponent
/// +1 or -1.
struct GenLetter {
  int gen;
  int exp;

  friend bool operator==(const GenLetter& a, const GenLetter& b) {
    return a.gen == b.gen && a.exp == b.exp;
  }
};

using GenWord = std::vector<GenLetter>;

/// Appends a letter with free reduction (cancels g against g^-1).
inline void reduced_push(GenWord& w, GenLetter l) {
  if (!w.empty() && w.back().gen == l.gen && w.back().exp == -l.exp)
    w.pop_back();
  else
    w.push_back(l);
}

inline void reduced_append(GenWord& w, const GenWord& tail) {
  for (const GenLetter& l : tail) reduced_push(w, l);
}

inline void reduced_append_inverse(GenWord& w, const GenWord& tail) {
  for (auto it = tail.rbegin(); it != tail.rend(); ++it)
    reduced_push(w, GenLetter{it->gen, -it->exp});
}

inline GenWord freely_reduce(const GenWord& w) {
  GenWord out;
  out.reserve(w.size());
  reduced_append(out, w);
  return out;
}

/// A generator of a self-similar presentation: its action on single letters
/// and, for every letter x, the restriction word taking over below x.
struct GeneratorRule {
  std::string name;
  Permutation perm;
  std::vector<GenWord> restrictions;  // indexed by letter
};

/// A finitely generated self-similar group given by per-generator letter
/// permutations and restriction words (a wreath recursion). Immutable after
/// construction; shared by the elements built over it.
class Presentation {
 public:
  Presentation(int alphabet_size, std::vector<GeneratorRule> rules)
      : alphabet_size_(alphabet_size), rules_(std::move(rules)) {
    if (alphabet_size_ < 2) throw domain_error("alphabet size must be at least 2");
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const GeneratorRule& r = rules_[i];
      if (r.perm.degree() != alphabet_size_)
        throw domain_error("generator " + r.name + ": permutation degree mismatch");
      if (static_cast<int>(r.restrictions.size()) != alphabet_size_)
        throw domain_error("generator " + r.name + ": needs one restriction per letter");
      if (!index_by_name_.emplace(r.name, static_cast<int>(i)).second)
        throw domain_error("duplicate generator name " + r.name);
    }
    for (const GeneratorRule& r : rules_)
      for (const GenWord& w : r.restrictions)
        for (const GenLetter& l : w)
          if (l.gen < 0 || l.gen >= static_cast<int>(rules_.size()))
            throw domain_error("restriction references generator out of range");
  }

  int alphabet_size() const { return alphabet_size_; }
  int generator_count() const { return static_cast<int>(rules_.size()); }
  const GeneratorRule& rule(int i) const { return rules_[static_cast<std::size_t>(i)]; }
  const std::vector<GeneratorRule>& rules() const { return rules_; }

  int generator_index(const std::string& name) const {
    auto it = index_by_name_.find(name);
    if (it == index_by_name_.end()) throw domain_error("unknown generator " + name);
    return it->second;
  }

  bool has_generator(const std::string& name) const {
    return index_by_name_.count(name) != 0;
  }

  bool operator==(const Presentation& other) const {
    if (alphabet_size_ != other.alphabet_size_ || rules_.size() != other.rules_.size()) return false;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const GeneratorRule& a = rules_[i];
      const GeneratorRule& b = other.rules_[i];
      if (a.name != b.name || a.perm != b.perm || a.restrictions != b.restrictions) return false;
    }
    return true;
  }

 private:
  int alphabet_size_;
  std::vector<GeneratorRule> rules_;
  std::map<std::string, int> index_by_name_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Parses a word over named generators: space separated tokens, each
/// "name", "name^-1", or the identity token "1".
inline GenWord parse_gen_word_tokens(const std::vector<std::string>& toks,
                                     const std::map<std::string, int>& names, int line) {
  GenWord w;
  for (const std::string& tok : toks) {
    if (tok == "1") continue;
    std::string base = tok;
    int exp = 1;
    std::size_t caret = tok.find('^');
    if (caret != std::string::npos) {
      base = tok.substr(0, caret);
      std::string e = tok.substr(caret + 1);
      if (e == "-1")
        exp = -1;
      else if (e == "1")
        exp = 1;
      else
        throw parse_error(line, "unsupported exponent '" + e + "' (only ^-1 allowed)");
    }
    auto it = names.find(base);
    if (it == names.end()) throw parse_error(line, "undeclared generator '" + base + "'");
    reduced_push(w, GenLetter{it->second, exp});
  }
  return w;
}

}  // namespace detail

/// Parses the presentation file format:
///
///   alphabet = 2
///   gens = a b
///   a : perm = (0 1) ; 0 -> b ; 1 -> 1
///   b : perm = ()    ; 0 -> a ; 1 -> 1
///
/// '#' starts a comment; every generator must give a restriction for every
/// letter; restriction words are over the generators, `1`, and `g^-1`.
inline Presentation parse_presentation(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  int alphabet = -1;
  std::vector<std::string> gen_names;
  std::map<std::string, int> name_index;
  std::map<std::string, std::pair<int, std::string>> gen_lines;  // name -> (line, body)
  std::vector<std::string> gen_order_seen;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::strip(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    std::size_t colon = line.find(':');
    if (line.rfind("alphabet", 0) == 0 && (colon == std::string::npos || eq < colon)) {
      if (eq == std::string::npos) throw parse_error(lineno, "expected 'alphabet = <d>'");
      try {
        alphabet = std::stoi(detail::strip(line.substr(eq + 1)));
      } catch (const std::exception&) {
        throw parse_error(lineno, "bad alphabet size");
      }
      if (alphabet < 2) throw parse_error(lineno, "alphabet size must be at least 2");
    } else if (line.rfind("gens", 0) == 0 && (colon == std::string::npos || eq < colon)) {
      if (eq == std::string::npos) throw parse_error(lineno, "expected 'gens = name ...'");
      gen_names = detail::split_tokens(line.substr(eq + 1));
      if (gen_names.empty()) throw parse_error(lineno, "no generators declared");
      for (const std::string& n : gen_names) {
        if (n == "1") throw parse_error(lineno, "'1' is reserved for the identity");
        if (!name_index.emplace(n, static_cast<int>(name_index.size())).second)
          throw parse_error(lineno, "duplicate generator '" + n + "'");
      }
    } else {
      if (colon == std::string::npos)
        throw parse_error(lineno, "expected '<gen> : perm = ... ; x -> w ; ...'");
      std::string name = detail::strip(line.substr(0, colon));
      if (name_index.find(name) == name_index.end())
        throw parse_error(lineno, "rule for undeclared generator '" + name + "'");
      if (gen_lines.count(name)) throw parse_error(lineno, "duplicate rule for generator '" + name + "'");
      gen_lines[name] = {lineno, detail::strip(line.substr(colon + 1))};
      gen_order_seen.push_back(name);
    }
  }

  if (alphabet < 0) throw parse_error(lineno, "missing 'alphabet = <d>' line");
  if (gen_names.empty()) throw parse_error(lineno, "missing 'gens = ...' line");

  std::vector<GeneratorRule> rules;
  for (const std::string& name : gen_names) {
    auto it = gen_lines.find(name);
    if (it == gen_lines.end())
      throw parse_error(lineno, "generator '" + name + "' has no rule line");
    int gl = it->second.first;
    const std::string& body = it->second.second;

    GeneratorRule rule;
    rule.name = name;
    rule.restrictions.assign(static_cast<std::size_t>(alphabet), GenWord{});
    std::vector<bool> have(static_cast<std::size_t>(alphabet), false);

    std::vector<std::string> parts;
    std::string cur;
    for (char c : body) {
      if (c == ';') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);

    bool saw_perm = false;
    for (std::string part : parts) {
      part = detail::strip(part);
      if (part.empty()) continue;
      if (part.rfind("perm", 0) == 0) {
        std::size_t eq = part.find('=');
        if (eq == std::string::npos) throw parse_error(gl, "expected 'perm = (...)'");
        rule.perm = Permutation::from_cycles(detail::strip(part.substr(eq + 1)), alphabet);
        saw_perm = true;
        continue;
      }
      std::size_t arrow = part.find("->");
      if (arrow == std::string::npos)
        throw parse_error(gl, "expected '<letter> -> <word>' in '" + part + "'");
      int letter;
      try {
        letter = std::stoi(detail::strip(part.substr(0, arrow)));
      } catch (const std::exception&) {
        throw parse_error(gl, "bad letter in '" + part + "'");
      }
      if (letter < 0 || letter >= alphabet)
        throw parse_error(gl, "letter " + std::to_string(letter) + " out of range");
      if (have[static_cast<std::size_t>(letter)])
        throw parse_error(gl, "duplicate restriction for letter " + std::to_string(letter));
      have[static_cast<std::size_t>(letter)] = true;
      rule.restrictions[static_cast<std::size_t>(letter)] = detail::parse_gen_word_tokens(
          detail::split_tokens(part.substr(arrow + 2)), name_index, gl);
    }

    if (!saw_perm) throw parse_error(gl, "generator '" + name + "' has no 'perm = ...' part");
    for (int x = 0; x < alphabet; ++x)
      if (!have[static_cast<std::size_t>(x)])
        throw parse_error(gl, "generator '" + name + "' missing restriction for letter " + std::to_string(x));
    rules.push_back(std::move(rule));
  }

  return Presentation(alphabet, std::move(rules));
}

inline std::string format_gen_word(const Presentation& p, const GenWord& w) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += p.rule(w[i].gen).name;
    if (w[i].exp < 0) out += "^-1";
  }
  return out;
}

inline std::string format_presentation(const Presentation& p) {
  std::string out = "alphabet = " + std::to_string(p.alphabet_size()) + "\n";
  out += "gens =";
  for (const GeneratorRule& r : p.rules()) out += " " + r.name;
  out += "\n";
  for (const GeneratorRule& r : p.rules()) {
    out += r.name + " : perm = " + r.perm.to_cycles();
    for (int x = 0; x < p.alphabet_size(); ++x)
      out += " ; " + std::to_string(x) + " -> " + format_gen_word(p, r.restrictions[static_cast<std::size_t>(x)]);
    out += "\n";
  }
  return out;
}

inline PresentationPtr make_presentation(const std::string& text) {
  return std::make_shared<const Presentation>(parse_presentation(text));
}

}  // namespace selfsim
