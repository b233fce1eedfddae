#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"
#include "selfsim/intmat.hpp"
#include "selfsim/virtual_endo.hpp"

namespace selfsim {

/// The group of affine maps z -> (-1)^k z + omega with omega in a lattice
/// Gamma = Z w1 + Z w2 in C, together with the virtual endomorphism
/// (-1)^k z + omega -> (-1)^k z + omega/alpha defined when omega lies in
/// alpha Gamma. Elements are stored as integer coordinates (k, m, n) for
/// the map z -> (-1)^k z + m w1 + n w2; the multiplier alpha acts on
/// coordinates through an integer 2x2 matrix that is validated exactly
/// against the complex data at construction.
class LattesPreset : public ConcreteGroup {
 public:
  LattesPreset(std::complex<double> w1, std::complex<double> w2, std::complex<double> alpha)
      : w1_(w1), w2_(w2), alpha_(alpha) {
    double area = w1.real() * w2.imag() - w1.imag() * w2.real();
    if (std::abs(area) < 1e-12) throw domain_error("lattice basis is degenerate");
    if (std::abs(std::abs(alpha) - 1.0) < 1e-12)
      throw domain_error("lattes preset needs |alpha| != 1");
    m_ = IntMat(2, IntVec(2, 0));
    // alpha * w_j expressed in the basis; must come out integral.
    for (int j = 0; j < 2; ++j) {
      std::complex<double> target = alpha * (j == 0 ? w1 : w2);
      // Solve x*w1 + y*w2 = target over the reals.
      double a11 = w1.real(), a12 = w2.real(), a21 = w1.imag(), a22 = w2.imag();
      double det2 = a11 * a22 - a12 * a21;
      double x = (target.real() * a22 - a12 * target.imag()) / det2;
      double y = (a11 * target.imag() - target.real() * a21) / det2;
      if (std::abs(x - std::round(x)) > 1e-9 || std::abs(y - std::round(y)) > 1e-9)
        throw domain_error("alpha does not map the lattice into itself");
      m_[0][static_cast<std::size_t>(j)] = static_cast<long long>(std::llround(x));
      m_[1][static_cast<std::size_t>(j)] = static_cast<long long>(std::llround(y));
    }
    long long dm = det(m_);
    degree_ = dm < 0 ? -dm : dm;
    if (degree_ < 2) throw domain_error("alpha must properly contract the lattice (|det| > 1)");
    residues_ = residue_system(m_);
    validate_transversal();
  }

  const IntMat& alpha_matrix() const { return m_; }

  int degree() const override { return static_cast<int>(degree_); }
  GroupElem identity() const override { return {0, 0, 0}; }

  /// Composition "first a, then b": z -> (-1)^{kb}((-1)^{ka} z + wa) + wb.
  GroupElem multiply(const GroupElem& a, const GroupElem& b) const override {
    long long sign = (b[0] % 2 == 0) ? 1 : -1;
    return {(a[0] + b[0]) & 1, sign * a[1] + b[1], sign * a[2] + b[2]};
  }

  GroupElem invert(const GroupElem& a) const override {
    long long sign = (a[0] % 2 == 0) ? 1 : -1;
    return {a[0], -sign * a[1], -sign * a[2]};
  }

  bool dom_contains(const GroupElem& a) const override {
    return in_lattice(m_, {a[1], a[2]});
  }

  GroupElem phi_apply(const GroupElem& a) const override {
    auto w = solve_integer(m_, {a[1], a[2]});
    if (!w) throw domain_error("phi applied outside its domain");
    return {a[0], (*w)[0], (*w)[1]};
  }

  GroupElem transversal(int x) const override {
    const IntVec& r = residues_[static_cast<std::size_t>(x)];
    return {0, r[0], r[1]};
  }

  std::string name() const override { return "lattes"; }

  std::complex<double> to_complex(const GroupElem& a) const {
    return w1_ * static_cast<double>(a[1]) + w2_ * static_cast<double>(a[2]);
  }

 private:
  std::complex<double> w1_, w2_, alpha_;
  IntMat m_;
  long long degree_;
  std::vector<IntVec> residues_;
};

}  // namespace selfsim
