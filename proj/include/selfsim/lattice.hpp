#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/intmat.hpp"
#include "selfsim/virtual_endo.hpp"

namespace selfsim {

/// Z^n with the virtual endomorphism A^-1 on the sublattice A Z^n and a
/// digit set as coset transversal. The induced action realizes the base-A
/// numeration system on Z^n; group arithmetic is exact integer arithmetic
/// throughout.
class LatticePreset : public ConcreteGroup {
 public:
  LatticePreset(IntMat a, std::vector<IntVec> digits) : a_(std::move(a)), digits_(std::move(digits)) {
    check_square(a_);
    n_ = rows(a_);
    det_ = det(a_);
    long long d = det_ < 0 ? -det_ : det_;
    if (d < 2) throw domain_error("lattice matrix must have |det| > 1");
    if (static_cast<long long>(digits_.size()) != d)
      throw domain_error("digit set must have exactly |det A| = " + std::to_string(d) + " elements");
    for (const IntVec& r : digits_)
      if (static_cast<int>(r.size()) != n_) throw domain_error("digit dimension mismatch");
    validate_transversal();
  }

  const IntMat& matrix() const { return a_; }
  int dimension() const { return n_; }
  const std::vector<IntVec>& digits() const { return digits_; }

  int degree() const override { return static_cast<int>(digits_.size()); }
  GroupElem identity() const override { return GroupElem(static_cast<std::size_t>(n_), 0); }

  GroupElem multiply(const GroupElem& a, const GroupElem& b) const override {
    GroupElem out(a);
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] += b[static_cast<std::size_t>(i)];
    return out;
  }

  GroupElem invert(const GroupElem& a) const override {
    GroupElem out(a);
    for (long long& v : out) v = -v;
    return out;
  }

  bool dom_contains(const GroupElem& a) const override { return in_lattice(a_, a); }

  GroupElem phi_apply(const GroupElem& a) const override {
    auto w = solve_integer(a_, a);
    if (!w) throw domain_error("phi applied outside its domain");
    return *w;
  }

  GroupElem transversal(int x) const override { return digits_[static_cast<std::size_t>(x)]; }
  std::string name() const override { return "lattice"; }

  /// All eigenvalues of A outside the closed unit disk (modulus > 1 + margin).
  bool is_expanding(double margin = 1e-9) const {
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        m(i, j) = static_cast<double>(a_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    Eigen::VectorXcd ev = m.eigenvalues();
    for (int i = 0; i < n_; ++i)
      if (std::abs(ev(i)) <= 1.0 + margin) return false;
    return true;
  }

 private:
  IntMat a_;
  int n_;
  long long det_;
  std::vector<IntVec> digits_;
};

struct FaithfulnessReport {
  enum class Verdict { faithful, unfaithful, unknown };
  Verdict verdict = Verdict::unknown;
  std::optional<IntVec> witness;  // nonzero vector v with A^-k v integral for all k
  std::string note;
};

/// Two-stage faithfulness check for the lattice action. When A is expanding
/// the intersection of the sublattices A^k Z^n is trivial and the action is
/// faithful. Otherwise a box search looks for a sublattice W with
/// A^-1 W contained in W; such a W certifies a nontrivial kernel and any of
/// its nonzero vectors is a witness. If neither applies the outcome is an
/// honest "unknown".
inline FaithfulnessReport lattice_faithfulness_check(const LatticePreset& p, int k_max = 24,
                                                     long long box = 6) {
  FaithfulnessReport report;
  if (p.is_expanding()) {
    report.verdict = FaithfulnessReport::Verdict::faithful;
    report.note = "all eigenvalues of A have modulus > 1";
    return report;
  }

  const int n = p.dimension();
  const IntMat& a = p.matrix();

  // Vectors in a small box whose entire backward A-orbit up to k_max stays
  // integral.
  std::vector<IntVec> survivors;
  IntVec v(static_cast<std::size_t>(n), -box);
  while (true) {
    bool zero = true;
    for (long long c : v)
      if (c != 0) zero = false;
    if (!zero) {
      IntVec cur = v;
      bool ok = true;
      for (int k = 0; k < k_max && ok; ++k) {
        auto next = solve_integer(a, cur);
        if (!next)
          ok = false;
        else
          cur = *next;
      }
      if (ok) survivors.push_back(v);
    }
    int i = n - 1;
    while (i >= 0) {
      if (++v[static_cast<std::size_t>(i)] <= box) break;
      v[static_cast<std::size_t>(i)] = -box;
      --i;
    }
    if (i < 0) break;
  }

  if (!survivors.empty()) {
    // Certify: every survivor's preimage must again be a survivor-box
    // combination; it is enough that A^-1 maps each survivor into the
    // integer span of the survivors. With the box closed under A^-1 the
    // whole span W satisfies A^-1 W within W, so W sits inside every
    // A^k Z^n.
    bool certified = true;
    for (const IntVec& s : survivors) {
      auto pre = solve_integer(a, s);
      if (!pre) {
        certified = false;
        break;
      }
      bool inside = true;
      for (long long c : *pre)
        if (c < -box || c > box) inside = false;
      if (!inside || (std::find(survivors.begin(), survivors.end(), *pre) == survivors.end() &&
                      !std::all_of(pre->begin(), pre->end(), [](long long c) { return c == 0; }))) {
        certified = false;
        break;
      }
    }
    if (certified) {
      // Smallest witness by max-norm, preferring nonnegative entries.
      auto rank = [](const IntVec& w) {
        long long m = 0, sum = 0;
        IntVec abs_w(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
          long long c = w[i];
          abs_w[i] = c < 0 ? -c : c;
          m = std::max(m, abs_w[i]);
          sum += c;
        }
        return std::make_tuple(m, abs_w, -sum);
      };
      IntVec best = survivors.front();
      for (const IntVec& s : survivors)
        if (rank(s) < rank(best)) best = s;
      report.verdict = FaithfulnessReport::Verdict::unfaithful;
      report.witness = best;
      report.note = "A^-1-stable sublattice found through " + format_vec(best);
      return report;
    }
  }

  report.verdict = FaithfulnessReport::Verdict::unknown;
  report.note = "no certificate within k_max = " + std::to_string(k_max) + ", box = " + std::to_string(box);
  return report;
}

}  // namespace selfsim
