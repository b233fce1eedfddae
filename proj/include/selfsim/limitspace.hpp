#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/element.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/intmat.hpp"
#include "selfsim/lattice.hpp"
#include "selfsim/nucleus.hpp"
#include "selfsim/presentation.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

/// An eventually periodic left-infinite sequence ...ppp.w over the
/// alphabet. Letters are indexed from the right: the rightmost letter of
/// the preperiod w is x_1, and the period p repeats leftward forever.
/// CLI syntax "<preperiod>:<period>", e.g. "10:1" denotes ...11110.
struct SequenceSpec {
  Word preperiod;
  Word period;

  SequenceSpec(Word pre, Word per) : preperiod(std::move(pre)), period(std::move(per)) {
    if (period.empty()) throw domain_error("sequence period must be non-empty");
  }

  /// The letter x_i (1-based, counted from the right end).
  Letter at(std::size_t i) const {
    if (i <= preperiod.size()) return preperiod[preperiod.size() - i];
    std::size_t j = (i - preperiod.size() - 1) % period.size();
    return period[period.size() - 1 - j];
  }

  /// Drops x_1 (the deepest letter, the one the shift map removes).
  SequenceSpec shifted() const {
    if (!preperiod.empty()) {
      Word pre = preperiod;
      pre.pop_back();
      return SequenceSpec(std::move(pre), period);
    }
    Word per(period.size());
    per[0] = period.back();
    std::copy(period.begin(), period.end() - 1, per.begin() + 1);
    return SequenceSpec({}, std::move(per));
  }

  static SequenceSpec parse(const std::string& text, int alphabet_size) {
    std::size_t colon = text.find(':');
    if (colon == std::string::npos)
      throw domain_error("sequence spec must be '<preperiod>:<period>'");
    Word pre = parse_word(text.substr(0, colon), alphabet_size);
    Word per = parse_word(text.substr(colon + 1), alphabet_size);
    return SequenceSpec(std::move(pre), std::move(per));
  }

  std::string to_string() const {
    return (preperiod.empty() ? "" : format_word(preperiod)) + ":" + format_word(period);
  }
};

/// Decides asymptotic equivalence of two eventually periodic sequences via
/// the Moore diagram of the nucleus: the sequences are equivalent exactly
/// when the pair labels (x_i, y_i) are read along a chain of nucleus states
/// extending to unbounded index. Both specs are aligned to a common
/// preperiod and period; a state survives the periodic part when its node
/// in the (state x phase) product graph is reachable from a directed cycle,
/// and the preperiod labels are then read off deterministically. Exact, no
/// tolerance.
inline bool asymptotic_equivalent(const Nucleus& nucleus, const SequenceSpec& s1,
                                  const SequenceSpec& s2) {
  const int d = nucleus.alphabet_size();
  for (Letter x : s1.preperiod) check_letters({x}, d);
  check_letters(s1.period, d);
  check_letters(s2.preperiod, d);
  check_letters(s2.period, d);

  const std::size_t m = std::max(s1.preperiod.size(), s2.preperiod.size());
  const std::size_t ell = std::lcm(s1.period.size(), s2.period.size());

  // Pair labels at positions m+1 .. m+ell (the common period, repeating).
  std::vector<std::pair<Letter, Letter>> periodic(ell);
  for (std::size_t j = 0; j < ell; ++j)
    periodic[j] = {s1.at(m + 1 + j), s2.at(m + 1 + j)};

  // Product graph: node (state q, phase c) stands for "q occupied at a
  // position congruent to m + c (mod ell)". Consuming the pair at position
  // m + c + 1 moves (q, c+1) -> (pi(q, x), c); each node has at most one
  // outgoing edge, so the graph is functional.
  const std::size_t states = static_cast<std::size_t>(nucleus.size());
  const std::size_t nodes = states * ell;
  auto node_id = [&](std::size_t q, std::size_t c) { return q * ell + c; };
  std::vector<int> next(nodes, -1);
  for (std::size_t q = 0; q < states; ++q)
    for (std::size_t c = 0; c < ell; ++c) {
      std::size_t pos = (c + ell - 1) % ell;  // consuming pair index pos
      auto [x, y] = periodic[pos];
      if (nucleus.output(static_cast<int>(q), x) == y)
        next[node_id(q, c)] =
            static_cast<int>(node_id(static_cast<std::size_t>(nucleus.restriction(static_cast<int>(q), x)), pos));
    }

  // Nodes with unboundedly long incoming chains in the functional graph.
  std::vector<std::vector<int>> succ(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    if (next[i] >= 0) succ[i].push_back(next[i]);
  std::vector<bool> persistent = detail::omega_limit(succ);

  // A sequence of states deep in the periodic part must reach phase 0
  // (position m) and then read the preperiod pairs down to position 1.
  for (std::size_t q = 0; q < states; ++q) {
    if (!persistent[node_id(q, 0)]) continue;
    int state = static_cast<int>(q);
    bool ok = true;
    for (std::size_t i = m; i >= 1 && ok; --i) {
      Letter x = s1.at(i);
      Letter y = s2.at(i);
      if (nucleus.output(state, x) != y)
        ok = false;
      else
        state = nucleus.restriction(state, x);
    }
    if (ok) return true;
  }
  return false;
}

/// The labeled graph of the generator action on one level of the tree:
/// vertices are the level-n words in lexicographic order, with one directed
/// edge v -> v^g per generator g.
struct LevelGraph {
  int level;
  int alphabet_size;
  std::vector<std::string> generator_names;
  // edges[g][i] = lex index of the image of word i under generator g.
  std::vector<std::vector<std::uint64_t>> edges;

  std::uint64_t vertex_count() const { return edges.empty() ? 0 : edges[0].size(); }

  std::string to_csv() const {
    std::string out = "src,dst,gen\n";
    for (std::size_t g = 0; g < edges.size(); ++g)
      for (std::uint64_t v = 0; v < edges[g].size(); ++v)
        out += std::to_string(v) + "," + std::to_string(edges[g][v]) + "," + generator_names[g] + "\n";
    return out;
  }

  /// DOT rendering; parallel edges between the same ordered pair are merged
  /// into one arrow with a combined label. The CSV keeps every edge.
  std::string to_dot(const std::string& name = "schreier") const {
    std::string out = "digraph " + name + " {\n";
    std::uint64_t n = vertex_count();
    for (std::uint64_t v = 0; v < n; ++v) {
      Word w = word_from_index(v, level, alphabet_size);
      out += "  n" + std::to_string(v) + " [label=\"" + format_word(w) + "\"];\n";
    }
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::string> merged;
    for (std::size_t g = 0; g < edges.size(); ++g)
      for (std::uint64_t v = 0; v < edges[g].size(); ++v) {
        auto key = std::make_pair(v, edges[g][v]);
        if (!merged[key].empty()) merged[key] += ",";
        merged[key] += generator_names[g];
      }
    for (const auto& [key, label] : merged)
      out += "  n" + std::to_string(key.first) + " -> n" + std::to_string(key.second) + " [label=\"" +
             label + "\"];\n";
    out += "}\n";
    return out;
  }
};

inline LevelGraph schreier_graph(const PresentationPtr& pres, int level,
                                 std::uint64_t budget = 1u << 22) {
  const int d = pres->alphabet_size();
  LevelGraph graph;
  graph.level = level;
  graph.alphabet_size = d;
  for (int g = 0; g < pres->generator_count(); ++g) {
    graph.generator_names.push_back(pres->rule(g).name);
    graph.edges.push_back(permutation_on_level(Element::generator(pres, g), level, budget));
  }
  return graph;
}

/// A finite list of real vectors with word provenance; rows follow the
/// lexicographic order of the generating words.
struct PointCloud {
  int dimension = 0;
  std::vector<std::vector<double>> points;
  std::vector<Word> words;

  std::string to_csv() const {
    std::string out;
    for (int j = 0; j < dimension; ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
    out += ",word\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      char buf[64];
      for (int j = 0; j < dimension; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", points[i][static_cast<std::size_t>(j)]);
        out += std::string(buf) + ",";
      }
      out += format_word(words[i]) + "\n";
    }
    return out;
  }
};

/// Digit expansions of depth N for an expanding lattice preset: the word
/// w_1...w_N maps to sum_{n=1..N} A^-n r_{w_n}, built level by level through
/// point(w) = A^-1(point of w with its first letter dropped) + A^-1 r_{w_1},
/// which makes the self-affinity identity hold exactly by construction.
inline PointCloud tile_cloud(const LatticePreset& preset, int depth) {
  if (!preset.is_expanding())
    throw domain_error("tile cloud requires an expanding matrix (all eigenvalues of modulus > 1)");
  if (depth < 0) throw domain_error("depth must be nonnegative");
  const int n = preset.dimension();
  const int d = preset.degree();
  const long long dt = det(preset.matrix());
  IntMat adj = adjugate(preset.matrix());

  auto apply_ainv = [&](const std::vector<double>& v) {
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int j = 0; j < n; ++j)
        acc += static_cast<double>(adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
               v[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = acc / static_cast<double>(dt);
    }
    return out;
  };

  std::vector<std::vector<double>> prev{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  for (int level = 1; level <= depth; ++level) {
    std::uint64_t count = prev.size() * static_cast<std::uint64_t>(d);
    std::vector<std::vector<double>> cur(count);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      int first = static_cast<int>(idx / prev.size());
      std::uint64_t tail = idx % prev.size();
      std::vector<double> v = prev[tail];
      const IntVec& r = preset.digits()[static_cast<std::size_t>(first)];
      for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] += static_cast<double>(r[static_cast<std::size_t>(j)]);
      cur[idx] = apply_ainv(v);
    }
    prev = std::move(cur);
  }

  PointCloud cloud;
  cloud.dimension = n;
  cloud.points = std::move(prev);
  cloud.words.reserve(cloud.points.size());
  for (std::uint64_t idx = 0; idx < cloud.points.size(); ++idx)
    cloud.words.push_back(word_from_index(idx, depth, d));
  return cloud;
}

namespace detail {

/// One-sided Hausdorff distance max_{p in a} min_{q in b} |p - q| with a
/// uniform grid to keep the scan near linear.
inline double one_sided_hausdorff(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty()) throw domain_error("hausdorff distance of empty cloud");
  const std::size_t dim = a[0].size();
  if (dim == 1) {
    std::vector<double> sorted;
    sorted.reserve(b.size());
    for (const auto& q : b) sorted.push_back(q[0]);
    std::sort(sorted.begin(), sorted.end());
    double worst = 0;
    for (const auto& p : a) {
      auto it = std::lower_bound(sorted.begin(), sorted.end(), p[0]);
      double best = std::numeric_limits<double>::infinity();
      if (it != sorted.end()) best = std::min(best, std::abs(*it - p[0]));
      if (it != sorted.begin()) best = std::min(best, std::abs(*(it - 1) - p[0]));
      worst = std::max(worst, best);
    }
    return worst;
  }

  auto dist2 = [&](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0;
    for (std::size_t j = 0; j < dim; ++j) s += (p[j] - q[j]) * (p[j] - q[j]);
    return s;
  };

  // Grid cell size from a rough density estimate.
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& q : b)
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], q[j]);
      hi[j] = std::max(hi[j], q[j]);
    }
  double extent = 0;
  for (std::size_t j = 0; j < dim; ++j) extent = std::max(extent, hi[j] - lo[j]);
  double cell = std::max(extent / std::max(1.0, std::pow(static_cast<double>(b.size()), 1.0 / dim)), 1e-12);

  auto cell_key = [&](const std::vector<double>& p) {
    long long kx = static_cast<long long>(std::floor((p[0] - lo[0]) / cell));
    long long ky = dim > 1 ? static_cast<long long>(std::floor((p[1] - lo[1]) / cell)) : 0;
    return std::make_pair(kx, ky);
  };
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < b.size(); ++i) grid[cell_key(b[i])].push_back(i);

  double worst2 = 0;
  for (const auto& p : a) {
    auto [cx, cy] = cell_key(p);
    double best2 = std::numeric_limits<double>::infinity();
    long long max_ring = 2 + static_cast<long long>(extent / cell);
    bool settled = false;
    for (long long ring = 0; ring <= max_ring && !settled; ++ring) {
      for (long long dx = -ring; dx <= ring; ++dx)
        for (long long dy = -ring; dy <= ring; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
          auto it = grid.find({cx + dx, cy + dy});
          if (it == grid.end()) continue;
          for (std::size_t i : it->second) best2 = std::min(best2, dist2(p, b[i]));
        }
      // Any point beyond ring R is at distance >= R*cell, so the current
      // best cannot be improved once it is within that bound.
      if (best2 <= std::pow(cell * static_cast<double>(ring), 2)) settled = true;
    }
    if (!settled)
      for (const auto& q : b) best2 = std::min(best2, dist2(p, q));
    worst2 = std::max(worst2, best2);
  }
  return std::sqrt(worst2);
}

}  // namespace detail

inline double hausdorff_distance(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b) {
  return std::max(detail::one_sided_hausdorff(a, b), detail::one_sided_hausdorff(b, a));
}

struct TileCheckReport {
  bool provenance_exact = false;  // depth-N points rebuild exactly from depth-(N-1)
  double hausdorff_to_previous = 0.0;
  int depth = 0;
};

/// Verifies the self-affinity of the digit tile at depth N: every depth-N
/// point must equal A^-1(prefix point + digit) exactly by word provenance,
/// and the one-sided Hausdorff distance from the depth-N cloud to the
/// depth-(N-1) cloud is reported (it shrinks geometrically with N for an
/// expanding matrix).
inline TileCheckReport tile_ifs_check(const LatticePreset& preset, int depth) {
  if (depth < 1) throw domain_error("tile check needs depth >= 1");
  PointCloud cur = tile_cloud(preset, depth);
  PointCloud prev = tile_cloud(preset, depth - 1);

  const int n = preset.dimension();
  const long long dt = det(preset.matrix());
  IntMat adj = adjugate(preset.matrix());

  TileCheckReport report;
  report.depth = depth;
  report.provenance_exact = true;
  for (std::size_t i = 0; i < cur.points.size(); ++i) {
    const Word& w = cur.words[i];
    std::uint64_t tail_idx = lex_index(Word(w.begin() + 1, w.end()), preset.degree());
    const std::vector<double>& parent = prev.points[tail_idx];
    const IntVec& r = preset.digits()[static_cast<std::size_t>(w[0])];
    for (int j = 0; j < n; ++j) {
      double acc = 0;
      for (int k = 0; k < n; ++k)
        acc += static_cast<double>(adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]) *
               (parent[static_cast<std::size_t>(k)] + static_cast<double>(r[static_cast<std::size_t>(k)]));
      if (acc / static_cast<double>(dt) != cur.points[i][static_cast<std::size_t>(j)])
        report.provenance_exact = false;
    }
  }
  report.hausdorff_to_previous = detail::one_sided_hausdorff(cur.points, prev.points);
  return report;
}

}  // namespace selfsim
