#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/element.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/presentation.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

using Complex = std::complex<double>;

/// Absolute tolerance for endpoint equations |f(z) - w| and for the
/// equivariance of the preimage table.
inline constexpr double kEpsMatch = 1e-9;

/// Loops must close to within this tolerance.
inline constexpr double kEpsClosure = 1e-12;

/// An ordered sequence of complex points approximating a path; closed when
/// it represents a loop.
struct Polyline {
  std::vector<Complex> points;
  bool closed = false;

  static Polyline constant(Complex z) { return Polyline{{z}, true}; }

  Complex start() const { return points.front(); }
  Complex end() const { return points.back(); }

  Polyline reversed() const {
    Polyline out = *this;
    std::reverse(out.points.begin(), out.points.end());
    return out;
  }

  void append_point(Complex z) {
    if (points.empty() || std::abs(points.back() - z) > 0) points.push_back(z);
  }

  /// Concatenation; the next path must start where this one ends.
  Polyline then(const Polyline& next) const {
    if (points.empty()) return next;
    if (std::abs(end() - next.start()) > 1e-7)
      throw domain_error("polyline concatenation: endpoints do not meet");
    Polyline out;
    out.points = points;
    for (const Complex& z : next.points) out.append_point(z);
    out.closed = std::abs(out.points.front() - out.points.back()) <= kEpsClosure;
    return out;
  }

  void validate_closed() const {
    if (closed && std::abs(points.front() - points.back()) > kEpsClosure)
      throw domain_error("loop does not close");
  }
};

inline Polyline segment(Complex a, Complex b, double max_step) {
  Polyline out;
  double len = std::abs(b - a);
  int steps = std::max(1, static_cast<int>(std::ceil(len / max_step)));
  for (int i = 0; i <= steps; ++i)
    out.append_point(a + (b - a) * (static_cast<double>(i) / steps));
  return out;
}

inline Polyline circle_arc(Complex center, double radius, double theta0, double theta1,
                           int samples_per_turn = 48) {
  Polyline out;
  double span = theta1 - theta0;
  int steps = std::max(2, static_cast<int>(std::ceil(std::abs(span) / (2 * M_PI) * samples_per_turn)));
  for (int i = 0; i <= steps; ++i) {
    double th = theta0 + span * (static_cast<double>(i) / steps);
    out.append_point(center + std::polar(radius, th));
  }
  return out;
}

/// A polynomial map on C, with special support for monic quadratics z^2+c.
class PolynomialMap {
 public:
  /// Coefficients low to high: coeffs[k] multiplies z^k.
  explicit PolynomialMap(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) == 0.0) coeffs_.pop_back();
    if (coeffs_.size() < 3) throw domain_error("polynomial degree must be at least 2");
  }

  static PolynomialMap quadratic(Complex c) {
    PolynomialMap f(std::vector<Complex>{c, 0.0, 1.0});
    f.quad_c_ = c;
    return f;
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_quadratic() const { return quad_c_.has_value(); }
  Complex quadratic_c() const { return *quad_c_; }

  Complex eval(Complex z) const {
    Complex acc = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * z + coeffs_[i];
    return acc;
  }

  Complex eval_derivative(Complex z) const {
    Complex acc = 0;
    for (std::size_t i = coeffs_.size(); i-- > 1;)
      acc = acc * z + coeffs_[i] * static_cast<double>(i);
    return acc;
  }

  /// Critical values: images of the roots of f'.
  std::vector<Complex> critical_values() const {
    if (quad_c_) return {*quad_c_};
    std::vector<Complex> out;
    for (Complex z : roots(derivative_coeffs())) out.push_back(eval(z));
    return out;
  }

  /// All d preimages of w. For quadratics this is the exact two-branch
  /// square root; otherwise a Durand-Kerner solve (polished by the caller).
  std::vector<Complex> preimages(Complex w, const std::vector<Complex>* warm_start = nullptr) const {
    if (quad_c_) {
      Complex r = std::sqrt(w - *quad_c_);
      return {r, -r};
    }
    std::vector<Complex> shifted = coeffs_;
    shifted[0] -= w;
    return roots(shifted, warm_start);
  }

  /// Forward orbit of the critical values, as a finite set when every
  /// critical orbit is preperiodic within the tolerance.
  std::vector<Complex> compute_postcritical(int max_iterations = 256, double tol = 1e-9,
                                            double escape = 1e8) const {
    std::vector<Complex> orbit;
    auto seen = [&](Complex z) {
      for (Complex p : orbit)
        if (std::abs(p - z) <= tol) return true;
      return false;
    };
    for (Complex v : critical_values()) {
      Complex z = v;
      int i = 0;
      while (!seen(z)) {
        if (++i > max_iterations)
          throw domain_error("critical orbit did not become periodic within the iteration budget; "
                             "supply the postcritical set explicitly");
        orbit.push_back(z);
        z = eval(z);
        if (std::abs(z) > escape)
          throw domain_error("critical orbit escapes: postcritical set is not finite");
      }
    }
    return orbit;
  }

 private:
  std::vector<Complex> derivative_coeffs() const {
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
      d[i - 1] = coeffs_[i] * static_cast<double>(i);
    return d;
  }

  /// Durand-Kerner; exact formulas for degree <= 2.
  static std::vector<Complex> roots(const std::vector<Complex>& coeffs,
                                    const std::vector<Complex>* warm_start = nullptr) {
    std::vector<Complex> c = coeffs;
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    int deg = static_cast<int>(c.size()) - 1;
    if (deg < 1) throw domain_error("cannot take roots of a constant");
    if (deg == 1) return {-c[0] / c[1]};
    if (deg == 2) {
      Complex a = c[2], b = c[1], c0 = c[0];
      Complex disc = std::sqrt(b * b - 4.0 * a * c0);
      if (std::real(std::conj(b) * disc) < 0) disc = -disc;
      Complex q = -(b + disc) / 2.0;
      if (std::abs(q) == 0.0) return {Complex(0), Complex(0)};
      return {q / a, c0 / q};
    }
    auto eval_poly = [&](Complex z) {
      Complex acc = 0;
      for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
      return acc;
    };
    std::vector<Complex> z(static_cast<std::size_t>(deg));
    if (warm_start && static_cast<int>(warm_start->size()) == deg) {
      z = *warm_start;
    } else {
      double scale = 1.0;
      for (std::size_t i = 0; i + 1 < c.size(); ++i)
        scale = std::max(scale,
                         std::pow(std::abs(c[i] / c.back()), 1.0 / static_cast<double>(c.size() - 1 - i)));
      for (int k = 0; k < deg; ++k)
        z[static_cast<std::size_t>(k)] = scale * std::polar(1.0, 0.4 + 2 * M_PI * k / deg);
    }
    for (int iter = 0; iter < 200; ++iter) {
      double worst = 0;
      for (int k = 0; k < deg; ++k) {
        Complex denom = c.back();
        for (int j = 0; j < deg; ++j)
          if (j != k) denom *= z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)];
        if (std::abs(denom) == 0.0) continue;
        Complex delta = eval_poly(z[static_cast<std::size_t>(k)]) / denom;
        z[static_cast<std::size_t>(k)] -= delta;
        worst = std::max(worst, std::abs(delta));
      }
      if (worst < 1e-13) break;
    }
    return z;
  }

  std::vector<Complex> coeffs_;
  std::optional<Complex> quad_c_;
};

struct LiftOptions {
  double eps = kEpsMatch;   // endpoint equation tolerance
  double min_step = 1e-9;   // smallest allowed subdivision interval
  double clearance = 1e-7;  // required distance of the path to critical values
  std::size_t max_points = 500000;

  /// Iterated lifts of an admissible path may come legitimately close to a
  /// critical value (they stay inside the lifted punctured plane); only the
  /// base path is held to the clearance, deeper levels rely on the
  /// subdivision guard.
  LiftOptions inner() const {
    LiftOptions o = *this;
    o.clearance = 0;
    return o;
  }
};

/// Lifts a path under f: the unique continuous preimage of `path` starting
/// at `start` (with f(start) = path.start()). The branch is tracked by
/// taking, at each sample, the preimage nearest to the previous lifted
/// point; the step is accepted only when the move stays below a third of
/// the distance to the nearest other preimage, and the interval is
/// subdivided otherwise. Subdivision below min_step raises a
/// branch-ambiguity error; samples within the clearance of a critical
/// value raise a clearance error.
inline Polyline lift_path(const PolynomialMap& f, const Polyline& path, Complex start,
                          const LiftOptions& opts = {}) {
  if (path.points.empty()) throw domain_error("cannot lift an empty path");
  if (std::abs(f.eval(start) - path.start()) > opts.eps)
    throw domain_error("lift start point does not project to the path start");

  const std::vector<Complex> critvals = opts.clearance > 0 ? f.critical_values() : std::vector<Complex>{};
  auto check_clearance = [&](Complex w) {
    for (Complex v : critvals)
      if (std::abs(w - v) < opts.clearance)
        throw domain_error("path passes within the clearance of a critical value");
  };

  Polyline out;
  out.points.push_back(start);
  Complex cur = start;
  check_clearance(path.points.front());

  auto newton_polish = [&](Complex z, Complex w) {
    for (int i = 0; i < 3; ++i) {
      Complex d = f.eval_derivative(z);
      if (std::abs(d) == 0.0) break;
      Complex step = (f.eval(z) - w) / d;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return z;
  };

  std::vector<Complex> warm;
  auto advance = [&](Complex w0, Complex w1) {
    struct Span {
      Complex a, b;
    };
    std::vector<Span> stack{{w0, w1}};
    while (!stack.empty()) {
      Span s = stack.back();
      stack.pop_back();
      check_clearance(s.b);
      std::vector<Complex> pre = f.preimages(s.b, warm.empty() ? nullptr : &warm);
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < pre.size(); ++i) {
        double di = std::abs(pre[i] - cur);
        if (di < best_d) {
          best_d = di;
          best = i;
        }
      }
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < pre.size(); ++i)
        if (i != best) gap = std::min(gap, std::abs(pre[i] - pre[best]));
      if (best_d > gap / 3.0) {
        if (std::abs(s.b - s.a) < opts.min_step)
          throw domain_error("branch ambiguity: candidate preimages closer than three times the "
                             "step at the minimum subdivision");
        Complex mid = (s.a + s.b) / 2.0;
        stack.push_back({mid, s.b});
        stack.push_back({s.a, mid});
        continue;
      }
      Complex z = pre[best];
      if (!f.is_quadratic()) z = newton_polish(z, s.b);
      cur = z;
      out.append_point(cur);
      warm = std::move(pre);
      if (out.points.size() > opts.max_points) throw budget_error("lift exceeded the point budget");
    }
  };

  for (std::size_t i = 0; i + 1 < path.points.size(); ++i)
    advance(path.points[i], path.points[i + 1]);

  if (std::abs(f.eval(out.points.back()) - path.end()) > opts.eps)
    throw domain_error("lift endpoint fails the projection tolerance");
  return out;
}

enum class DetourSide { above, below };

struct GeometryOptions {
  double radius_factor = 0.1;  // loop radius as a fraction of the minimal gap
  DetourSide detour = DetourSide::above;
  int arc_samples = 48;
  double max_seg_step = 0.05;  // straight pieces are sampled at least this finely
  std::optional<Complex> basepoint;                  // overrides the fixed-point choice
  std::optional<std::vector<Complex>> postcritical;  // overrides the computed orbit
};

/// Basepoint, generator loops and connecting paths for a quadratic z^2+c.
struct Geometry {
  Complex basepoint = 0;
  std::vector<Complex> postcritical;
  std::vector<std::string> loop_names;
  std::vector<Polyline> loops;       // one per finite postcritical point, orbit order
  std::vector<Polyline> connecting;  // ell_x, one per letter
  double radius = 0;
};

/// Default geometry for a quadratic with preperiodic critical orbit: the
/// basepoint is a fixed point of f outside the postcritical set (the
/// (1-sqrt(1-4c))/2 root preferred); each finite postcritical point gets a
/// positively oriented circular loop of radius 0.1 x (minimal gap) joined
/// to the basepoint by a straight spoke; ell_0 is constant at the basepoint
/// and ell_1 runs straight to its negative, detouring on a circular arc
/// past any postcritical point near the segment (above by default).
inline Geometry default_geometry(const PolynomialMap& f, const GeometryOptions& opts = {}) {
  if (!f.is_quadratic())
    throw domain_error("default geometry is provided for quadratics only; supply paths yourself "
                       "for higher degree");
  Complex c = f.quadratic_c();

  Geometry geom;
  geom.postcritical = opts.postcritical ? *opts.postcritical : f.compute_postcritical();
  const auto& post = geom.postcritical;
  if (post.empty()) throw domain_error("postcritical set is empty");

  if (opts.basepoint) {
    geom.basepoint = *opts.basepoint;
  } else {
    Complex disc = std::sqrt(Complex(1.0) - 4.0 * c);
    auto in_post = [&](Complex z) {
      for (Complex p : post)
        if (std::abs(p - z) < 1e-6) return true;
      return false;
    };
    Complex fixed_minus = (Complex(1.0) - disc) / 2.0;
    Complex fixed_plus = (Complex(1.0) + disc) / 2.0;
    if (!in_post(fixed_minus))
      geom.basepoint = fixed_minus;
    else if (!in_post(fixed_plus))
      geom.basepoint = fixed_plus;
    else
      throw domain_error("both fixed points are postcritical; supply a basepoint");
  }
  Complex t = geom.basepoint;
  for (Complex p : post)
    if (std::abs(p - t) < 1e-9) throw domain_error("basepoint lies in the postcritical set");

  double min_gap = std::numeric_limits<double>::infinity();
  {
    std::vector<Complex> pts = post;
    pts.push_back(t);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        min_gap = std::min(min_gap, std::abs(pts[i] - pts[j]));
  }
  double radius = opts.radius_factor * min_gap;
  geom.radius = radius;
  double seg_step = std::min(opts.max_seg_step, radius / 2.0);

  for (std::size_t i = 0; i < post.size(); ++i) {
    Complex p = post[i];
    Complex dir = (t - p) / std::abs(t - p);
    Complex touch = p + radius * dir;
    Polyline spoke = segment(t, touch, seg_step);
    double theta0 = std::arg(touch - p);
    Polyline circle = circle_arc(p, radius, theta0, theta0 + 2 * M_PI, opts.arc_samples);
    Polyline loop = spoke.then(circle).then(spoke.reversed());
    loop.closed = true;
    loop.validate_closed();
    geom.loop_names.push_back(std::string(1, static_cast<char>('a' + i)));
    geom.loops.push_back(std::move(loop));
  }

  // Connecting paths. The basepoint is a fixed point, hence one of its own
  // preimages; the other preimage is -t.
  Complex other = -t;
  geom.connecting.push_back(Polyline::constant(t));

  struct Near {
    double along;
    Complex p;
  };
  double len = std::abs(other - t);
  Complex u = (other - t) / len;
  std::vector<Near> nears;
  for (Complex p : post) {
    double s = std::real(std::conj(u) * (p - t));
    double h = std::abs(p - (t + s * u));
    if (s > radius / 2 && s < len - radius / 2 && h < radius) nears.push_back({s, p});
  }
  std::sort(nears.begin(), nears.end(), [](const Near& a, const Near& b) { return a.along < b.along; });

  Polyline ell1;
  double done = 0;
  for (const Near& nr : nears) {
    double enter = std::max(done, nr.along - radius);
    double leave = std::min(len, nr.along + radius);
    ell1 = ell1.then(segment(t + done * u, t + enter * u, seg_step));
    Complex a = t + enter * u;
    Complex b = t + leave * u;
    double tha = std::arg(a - nr.p);
    double thb = std::arg(b - nr.p);
    double want = (opts.detour == DetourSide::above) ? M_PI / 2 : -M_PI / 2;
    auto passes_through = [&](double from, double span) {
      for (int k = -2; k <= 2; ++k) {
        double target = want + 2 * M_PI * k;
        double lo = std::min(from, from + span), hi = std::max(from, from + span);
        if (target >= lo - 1e-12 && target <= hi + 1e-12) return true;
      }
      return false;
    };
    double span_ccw = thb - tha;
    while (span_ccw <= 0) span_ccw += 2 * M_PI;
    double span = passes_through(tha, span_ccw) ? span_ccw : span_ccw - 2 * M_PI;
    double ra = std::abs(a - nr.p);
    double rb = std::abs(b - nr.p);
    Polyline arc;
    int steps = std::max(2, static_cast<int>(std::ceil(std::abs(span) / (2 * M_PI) * opts.arc_samples)));
    for (int i = 0; i <= steps; ++i) {
      double fr = static_cast<double>(i) / steps;
      arc.append_point(nr.p + std::polar(ra + (rb - ra) * fr, tha + span * fr));
    }
    ell1 = ell1.then(arc);
    done = leave;
  }
  ell1 = ell1.then(segment(t + done * u, other, seg_step));
  geom.connecting.push_back(ell1);
  return geom;
}

/// The numeric word-to-point table: for every word of length up to the
/// built depth, the corresponding preimage of the basepoint. Level n+1 is
/// produced from level n by one single-step lift of the stored
/// connecting-path lifts, so each node costs one lift. Node separation and
/// the equivariance bound are enforced as every level completes.
class PreimageTree {
 public:
  PreimageTree(PolynomialMap f, Geometry geom, LiftOptions opts = {})
      : f_(std::move(f)), geom_(std::move(geom)), opts_(opts),
        d_(static_cast<int>(geom_.connecting.size())) {
    if (d_ != f_.degree()) throw domain_error("need one connecting path per preimage of the basepoint");
    for (int x = 0; x < d_; ++x)
      if (std::abs(geom_.connecting[static_cast<std::size_t>(x)].start() - geom_.basepoint) > kEpsClosure)
        throw domain_error("connecting paths must start at the basepoint");
    levels_.push_back({geom_.basepoint});
    table_ = {geom_.connecting};  // lifts of ell_x at the single level-0 node
    table_level_ = 0;
  }

  const PolynomialMap& map() const { return f_; }
  const Geometry& geometry() const { return geom_; }
  const LiftOptions& lift_options() const { return opts_; }
  int alphabet_size() const { return d_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }

  const std::vector<Complex>& level(int n) const { return levels_[static_cast<std::size_t>(n)]; }

  Complex point(const Word& w) const { return levels_[w.size()][lex_index(w, d_)]; }

  void extend_to(int target) {
    while (depth() < target) step();
  }

  /// Nearest node at a level, with the 10x ratio test against the second
  /// nearest; an ambiguous match is an error, never a silent guess.
  std::uint64_t match_node(int level, Complex z) const {
    const std::vector<Complex>& pts = levels_[static_cast<std::size_t>(level)];
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity(), second = bd;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double di = std::abs(pts[i] - z);
      if (di < bd) {
        second = bd;
        bd = di;
        best = i;
      } else {
        second = std::min(second, di);
      }
    }
    if (pts.size() > 1 && !(10 * bd <= second))
      throw domain_error("ambiguous endpoint match at level " + std::to_string(level) +
                         "; decrease the step or the depth");
    return best;
  }

  /// Largest equivariance residual |f(node) - parent node| over all stored
  /// nodes below the root.
  double max_equivariance_residual() const {
    double worst = 0;
    for (std::size_t n = 1; n < levels_.size(); ++n)
      for (std::size_t i = 0; i < levels_[n].size(); ++i)
        worst = std::max(worst, std::abs(f_.eval(levels_[n][i]) -
                                         levels_[n - 1][i / static_cast<std::size_t>(d_)]));
    return worst;
  }

 private:
  // The lift of ell_x at node w extends the lift at w's tree parent,
  // starting from the node's own point. The table trails the top level by
  // one step so the deepest level never pays for lifts it will not use.
  void advance_table() {
    const std::size_t lvl = static_cast<std::size_t>(table_level_) + 1;
    const std::vector<Complex>& pts = levels_[lvl];
    const LiftOptions opts = table_level_ == 0 ? opts_ : opts_.inner();
    std::vector<std::vector<Polyline>> next_table(pts.size());
    for (std::size_t iw = 0; iw < pts.size(); ++iw) {
      next_table[iw].reserve(static_cast<std::size_t>(d_));
      for (int x = 0; x < d_; ++x)
        next_table[iw].push_back(
            lift_path(f_, table_[iw / static_cast<std::size_t>(d_)][static_cast<std::size_t>(x)],
                      pts[iw], opts));
    }
    table_ = std::move(next_table);
    ++table_level_;
  }

  void step() {
    if (table_level_ < depth()) advance_table();
    const std::size_t n = levels_.size() - 1;  // current top level == table level
    const std::vector<Complex>& cur = levels_[n];

    // New level: endpoints of the stored lifts. Node x.u gets index
    // x*d^n + index(u); its tree parent (drop the last letter) has index
    // (x*d^n + index(u)) / d.
    std::vector<Complex> next(cur.size() * static_cast<std::size_t>(d_));
    for (std::size_t iu = 0; iu < cur.size(); ++iu)
      for (int x = 0; x < d_; ++x)
        next[static_cast<std::size_t>(x) * cur.size() + iu] =
            table_[iu][static_cast<std::size_t>(x)].end();

    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < next.size(); ++i)
      for (std::size_t j = i + 1; j < next.size(); ++j)
        min_sep = std::min(min_sep, std::abs(next[i] - next[j]));
    if (next.size() > 1 && min_sep <= 10 * kEpsMatch)
      throw domain_error("node separation failed at level " + std::to_string(n + 1) +
                         ": depth refused");
    for (std::size_t iw = 0; iw < next.size(); ++iw)
      if (std::abs(f_.eval(next[iw]) - cur[iw / static_cast<std::size_t>(d_)]) > kEpsMatch)
        throw domain_error("preimage table equivariance violated at level " + std::to_string(n + 1));

    levels_.push_back(std::move(next));
  }

  PolynomialMap f_;
  Geometry geom_;
  LiftOptions opts_;
  int d_;
  std::vector<std::vector<Complex>> levels_;
  std::vector<std::vector<Polyline>> table_;
  int table_level_ = 0;
};

inline PreimageTree build_lambda(const PolynomialMap& f, const Geometry& geom, int depth,
                                 const LiftOptions& opts = {}) {
  PreimageTree tree(f, geom, opts);
  tree.extend_to(depth);
  return tree;
}

/// Level permutations of the action of one loop, computed by lifting the
/// loop along the image chain of every node: the lift at node w extends
/// the lift at w's tree parent, and its endpoint is matched against the
/// level's nodes. Each level map is verified to be a bijection.
inline std::vector<std::vector<std::uint64_t>> loop_level_permutations(const PreimageTree& tree,
                                                                       const Polyline& loop,
                                                                       int depth) {
  if (depth > tree.depth()) throw domain_error("preimage table is too shallow for this depth");
  loop.validate_closed();
  const int d = tree.alphabet_size();
  const PolynomialMap& f = tree.map();

  std::vector<std::vector<std::uint64_t>> perms;
  std::vector<Polyline> prev{loop};
  for (int n = 1; n <= depth; ++n) {
    const LiftOptions opts = n == 1 ? tree.lift_options() : tree.lift_options().inner();
    const std::vector<Complex>& pts = tree.level(n);
    std::vector<Polyline> lifts(pts.size());
    std::vector<std::uint64_t> perm(pts.size());
    std::vector<bool> hit(pts.size(), false);
    for (std::size_t iw = 0; iw < pts.size(); ++iw) {
      lifts[iw] = lift_path(f, prev[iw / static_cast<std::size_t>(d)], pts[iw], opts);
      std::uint64_t target = tree.match_node(n, lifts[iw].end());
      perm[iw] = target;
      if (hit[target])
        throw domain_error("endpoint collision: level map is not a bijection at level " +
                           std::to_string(n));
      hit[target] = true;
    }
    perms.push_back(std::move(perm));
    prev = std::move(lifts);
  }
  return perms;
}

/// Per generator loop, the permutations of every level up to the depth.
struct MonodromyAction {
  int alphabet_size = 0;
  int depth = 0;
  std::vector<std::string> loop_names;
  // perms[g][n-1] is the level-n permutation of generator g.
  std::vector<std::vector<std::vector<std::uint64_t>>> perms;
};

inline MonodromyAction monodromy_permutations(const PreimageTree& tree, int depth) {
  MonodromyAction action;
  action.alphabet_size = tree.alphabet_size();
  action.depth = depth;
  action.loop_names = tree.geometry().loop_names;
  for (const Polyline& loop : tree.geometry().loops)
    action.perms.push_back(loop_level_permutations(tree, loop, depth));
  return action;
}

namespace detail {

/// The permutation of level-n words induced by relabeling letters with pi.
inline std::vector<std::uint64_t> letterwise_map(const std::vector<int>& pi, int level, int d) {
  std::uint64_t count = 1;
  for (int i = 0; i < level; ++i) count *= static_cast<std::uint64_t>(d);
  std::vector<std::uint64_t> out(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Word w = word_from_index(idx, level, d);
    for (Letter& x : w) x = pi[static_cast<std::size_t>(x)];
    out[idx] = lex_index(w, d);
  }
  return out;
}

inline std::vector<std::vector<int>> all_letter_permutations(int d) {
  std::vector<int> pi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) pi[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(pi);
  } while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

}  // namespace detail

struct VerifyReport {
  bool matched = false;
  std::vector<int> relabeling;  // letter map applied to the presentation's action
  int depth = 0;
  std::string mismatch;  // description of the first failure (identity relabeling)

  std::string summary() const {
    if (!matched) return "MISMATCH " + mismatch;
    std::string label = "identity";
    for (std::size_t i = 0; i < relabeling.size(); ++i)
      if (relabeling[i] != static_cast<int>(i)) {
        label = "";
        for (std::size_t j = 0; j < relabeling.size(); ++j)
          label += (j ? " " : "") + std::to_string(relabeling[j]);
        break;
      }
    return "MATCH (relabeling: " + label + ")";
  }
};

/// Compares the numeric level permutations with the wreath-recursion action
/// of a presentation, generator by generator and level by level, retrying
/// over all letter relabelings. Mismatch is a report, not an error.
inline VerifyReport verify_recursion(const PresentationPtr& pres, const MonodromyAction& action,
                                     int depth) {
  VerifyReport report;
  report.depth = depth;
  const int d = action.alphabet_size;
  if (pres->alphabet_size() != d) {
    report.mismatch = "alphabet sizes differ";
    return report;
  }
  if (pres->generator_count() != static_cast<int>(action.perms.size())) {
    report.mismatch = "generator counts differ";
    return report;
  }
  if (depth > action.depth) {
    report.mismatch = "numeric action is too shallow";
    return report;
  }

  std::vector<std::vector<std::vector<std::uint64_t>>> algebraic(
      static_cast<std::size_t>(pres->generator_count()));
  for (int g = 0; g < pres->generator_count(); ++g)
    for (int n = 1; n <= depth; ++n)
      algebraic[static_cast<std::size_t>(g)].push_back(
          permutation_on_level(Element::generator(pres, g), n));

  std::string first_mismatch;
  for (const std::vector<int>& pi : detail::all_letter_permutations(d)) {
    bool ok = true;
    std::string why;
    for (int n = 1; n <= depth && ok; ++n) {
      std::vector<std::uint64_t> big = detail::letterwise_map(pi, n, d);
      for (int g = 0; g < pres->generator_count() && ok; ++g) {
        const auto& alg = algebraic[static_cast<std::size_t>(g)][static_cast<std::size_t>(n - 1)];
        const auto& num = action.perms[static_cast<std::size_t>(g)][static_cast<std::size_t>(n - 1)];
        for (std::uint64_t i = 0; i < alg.size(); ++i) {
          // Conjugated action: relabel, act algebraically, relabel back.
          if (num[big[i]] != big[alg[i]]) {
            ok = false;
            why = "generator " + pres->rule(g).name + " at level " + std::to_string(n) + ", word " +
                  format_word(word_from_index(i, n, d));
            break;
          }
        }
      }
    }
    bool is_id = true;
    for (std::size_t i = 0; i < pi.size(); ++i)
      if (pi[i] != static_cast<int>(i)) is_id = false;
    if (is_id && !ok) first_mismatch = why;
    if (ok) {
      report.matched = true;
      report.relabeling = pi;
      return report;
    }
  }
  report.mismatch = first_mismatch.empty() ? "no relabeling matches" : first_mismatch;
  return report;
}

namespace detail {

inline std::vector<std::uint64_t> compose_perms(const std::vector<std::uint64_t>& first,
                                                const std::vector<std::uint64_t>& then) {
  std::vector<std::uint64_t> out(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) out[i] = then[first[i]];
  return out;
}

inline std::vector<std::uint64_t> invert_perm(const std::vector<std::uint64_t>& p) {
  std::vector<std::uint64_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<std::uint64_t>(i);
  return out;
}

}  // namespace detail

/// Reads the wreath recursion off the numeric action: for each generator
/// loop and letter x the restriction loop ell_x . (lifted loop) . ell_y^-1
/// is built numerically, its level permutations are computed, and the
/// shortest word over the generators matching them on every level up to
/// `depth` is emitted. Two distinct shortest matches force a retry two
/// levels deeper; a tie that survives every retry is broken in
/// breadth-first order (the tied words act identically on every checked
/// level). No match within max_word_len is an explicit failure.
inline Presentation infer_recursion(const PolynomialMap& f, const Geometry& geom, int max_word_len,
                                    int depth, const LiftOptions& opts = {}, int max_retries = 2) {
  const int d = static_cast<int>(geom.connecting.size());
  const int gens = static_cast<int>(geom.loops.size());

  PreimageTree tree(f, geom, opts);
  tree.extend_to(depth + 2 * max_retries);

  for (int attempt = 0;; ++attempt) {
    int use_depth = depth + 2 * attempt;

    std::vector<std::vector<std::vector<std::uint64_t>>> gen_perms;
    for (const Polyline& loop : geom.loops)
      gen_perms.push_back(loop_level_permutations(tree, loop, use_depth));

    // Candidate words over the generators, freely reduced, by length; the
    // identity comes first so the shortest match wins.
    struct Candidate {
      GenWord word;
      std::vector<std::vector<std::uint64_t>> perms;  // per level
    };
    std::vector<std::vector<std::uint64_t>> id_perms;
    for (int n = 1; n <= use_depth; ++n) {
      std::uint64_t count = 1;
      for (int i = 0; i < n; ++i) count *= static_cast<std::uint64_t>(d);
      std::vector<std::uint64_t> id(count);
      for (std::uint64_t i = 0; i < count; ++i) id[i] = i;
      id_perms.push_back(std::move(id));
    }
    std::vector<std::vector<std::vector<std::uint64_t>>> inv_gen_perms(gen_perms.size());
    for (std::size_t g = 0; g < gen_perms.size(); ++g)
      for (const auto& p : gen_perms[g]) inv_gen_perms[g].push_back(detail::invert_perm(p));

    std::vector<Candidate> frontier{{GenWord{}, id_perms}};
    std::vector<std::vector<Candidate>> by_length{frontier};
    for (int len = 1; len <= max_word_len; ++len) {
      std::vector<Candidate> next;
      for (const Candidate& c : by_length.back()) {
        for (int g = 0; g < gens; ++g)
          for (int e : {1, -1}) {
            if (!c.word.empty() && c.word.back().gen == g && c.word.back().exp == -e) continue;
            Candidate ext;
            ext.word = c.word;
            ext.word.push_back(GenLetter{g, e});
            const auto& tail = e > 0 ? gen_perms[static_cast<std::size_t>(g)]
                                     : inv_gen_perms[static_cast<std::size_t>(g)];
            for (int n = 0; n < use_depth; ++n)
              ext.perms.push_back(detail::compose_perms(c.perms[static_cast<std::size_t>(n)],
                                                        tail[static_cast<std::size_t>(n)]));
            next.push_back(std::move(ext));
          }
      }
      by_length.push_back(std::move(next));
    }

    bool ambiguous = false;
    std::vector<GeneratorRule> rules;
    for (int g = 0; g < gens && !ambiguous; ++g) {
      GeneratorRule rule;
      rule.name = geom.loop_names[static_cast<std::size_t>(g)];
      std::vector<int> img(static_cast<std::size_t>(d));
      rule.restrictions.assign(static_cast<std::size_t>(d), GenWord{});
      for (Letter x = 0; x < d && !ambiguous; ++x) {
        // Restriction loop: ell_x, then the level-1 lift of the loop from
        // the node of x, then ell_y reversed.
        Polyline lifted = lift_path(f, geom.loops[static_cast<std::size_t>(g)],
                                    tree.level(1)[static_cast<std::size_t>(x)], opts);
        Letter y = static_cast<Letter>(tree.match_node(1, lifted.end()));
        img[static_cast<std::size_t>(x)] = y;
        Polyline restriction_loop = geom.connecting[static_cast<std::size_t>(x)]
                                        .then(lifted)
                                        .then(geom.connecting[static_cast<std::size_t>(y)].reversed());
        auto target = loop_level_permutations(tree, restriction_loop, use_depth);

        std::optional<GenWord> found;
        bool tie = false;
        for (const auto& bucket : by_length) {
          for (const Candidate& cand : bucket) {
            if (cand.perms != target) continue;
            if (found) {
              tie = true;
              break;
            }
            found = cand.word;
          }
          if (found || tie) break;
        }
        if (tie && attempt < max_retries) {
          ambiguous = true;
          break;
        }
        // A persistent tie means the tied words act identically on every
        // checked level (both match the target), so they cannot be told
        // apart at any inference depth; the breadth-first-first word is as
        // good an answer as any. Happens when generators satisfy relations,
        // e.g. an involution makes g and g^-1 the same element.
        if (!found)
          throw domain_error("no word of length <= " + std::to_string(max_word_len) +
                             " matches the restriction of loop " + rule.name + " at letter " +
                             std::to_string(x) +
                             "; increase the word length or adjust the geometry");
        rule.restrictions[static_cast<std::size_t>(x)] = *found;
      }
      if (!ambiguous) {
        rule.perm = Permutation(std::move(img));
        rules.push_back(std::move(rule));
      }
    }
    if (!ambiguous) return Presentation(d, std::move(rules));
    if (attempt >= max_retries)
      throw domain_error("recursion inference stayed ambiguous after deepening; increase the depth");
  }
}

/// The level-n points as an n-th order approximation of the Julia set, in
/// lexicographic word order.
inline std::vector<Complex> julia_cloud(const PreimageTree& tree, int depth) {
  if (depth > tree.depth()) throw domain_error("preimage table is too shallow for this depth");
  return tree.level(depth);
}

inline std::string cloud_to_csv(const std::vector<Complex>& cloud) {
  std::string out = "re,im\n";
  char buf[80];
  for (Complex z : cloud) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", z.real(), z.imag());
    out += buf;
  }
  return out;
}

}  // namespace selfsim
