#pragma once

#include <string>

#include "selfsim/errors.hpp"
#include "selfsim/virtual_endo.hpp"

namespace selfsim {

/// The discrete Heisenberg group with elements (a, b, c) multiplied as
/// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+b*a'), carrying the virtual
/// endomorphism (a,b,c) -> (a/p, b/q, c/(pq)) on the index-p^2q^2 subgroup
/// {a in pZ, b in qZ, c in pqZ}. The transversal enumerates
/// a in 0..p-1, b in 0..q-1, c in 0..pq-1 with a fastest.
class HeisenbergPreset : public ConcreteGroup {
 public:
  HeisenbergPreset(int p, int q) : p_(p), q_(q) {
    if (p < 2 || q < 2) throw domain_error("heisenberg preset needs p, q >= 2");
    validate_transversal();
  }

  int p() const { return p_; }
  int q() const { return q_; }

  int degree() const override { return p_ * p_ * q_ * q_; }
  GroupElem identity() const override { return {0, 0, 0}; }

  GroupElem multiply(const GroupElem& x, const GroupElem& y) const override {
    return {x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[1] * y[0]};
  }

  GroupElem invert(const GroupElem& x) const override {
    return {-x[0], -x[1], -x[2] + x[1] * x[0]};
  }

  bool dom_contains(const GroupElem& x) const override {
    long long pq = static_cast<long long>(p_) * q_;
    return x[0] % p_ == 0 && x[1] % q_ == 0 && x[2] % pq == 0;
  }

  GroupElem phi_apply(const GroupElem& x) const override {
    if (!dom_contains(x)) throw domain_error("phi applied outside its domain");
    long long pq = static_cast<long long>(p_) * q_;
    return {x[0] / p_, x[1] / q_, x[2] / pq};
  }

  GroupElem transversal(int idx) const override {
    long long pq = static_cast<long long>(p_) * q_;
    long long a = idx % p_;
    long long b = (idx / p_) % q_;
    long long c = idx / (p_ * q_);
    if (c >= pq) throw domain_error("letter out of range for this group");
    return {a, b, c};
  }

  std::string name() const override { return "heisenberg"; }

 private:
  int p_;
  int q_;
};

}  // namespace selfsim
