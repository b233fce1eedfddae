#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "selfsim/element.hpp"
#include "selfsim/presentation.hpp"
#include "selfsim/word.hpp"

namespace testutil {

using namespace selfsim;

/// Independent odometer oracle: a length-n word with the leftmost letter as
/// the least significant binary digit, read as an integer mod 2^n.
inline std::uint64_t odometer_value(const Word& w) {
  std::uint64_t v = 0;
  for (std::size_t i = w.size(); i-- > 0;) v = v * 2 + static_cast<std::uint64_t>(w[i]);
  return v;
}

inline Word odometer_word(std::uint64_t value, int length) {
  Word w(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    w[static_cast<std::size_t>(i)] = static_cast<int>(value & 1);
    value >>= 1;
  }
  return w;
}

inline Word random_word(std::mt19937_64& rng, int length, int alphabet) {
  Word w(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i)
    w[static_cast<std::size_t>(i)] = static_cast<int>(rng() % static_cast<std::uint64_t>(alphabet));
  return w;
}

inline Element random_element(std::mt19937_64& rng, const PresentationPtr& pres, int length) {
  GenWord w;
  while (static_cast<int>(w.size()) < length) {
    GenLetter l{static_cast<int>(rng() % static_cast<std::uint64_t>(pres->generator_count())),
                (rng() & 1) ? 1 : -1};
    reduced_push(w, l);
  }
  return Element(pres, std::move(w));
}

/// Exact value of the binary expansion sum x_i 2^-i (mod 1) of an
/// eventually periodic sequence, as a reduced fraction.
struct Fraction {
  long long num;
  long long den;
  bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
};

inline Fraction binary_fraction_mod1(const std::vector<int>& preperiod_x1_first,
                                     const std::vector<int>& period_from_x_m_plus_1) {
  const auto& pre = preperiod_x1_first;       // pre[0] = x_1
  const auto& per = period_from_x_m_plus_1;   // per[0] = x_{m+1}
  int m = static_cast<int>(pre.size());
  int l = static_cast<int>(per.size());
  // sum_{i<=m} x_i 2^-i = (binary digits x_1 x_2 ... x_m after the point)
  long long head = 0;
  for (int i = 0; i < m; ++i) head = head * 2 + pre[static_cast<std::size_t>(i)];
  long long tail = 0;
  for (int j = 0; j < l; ++j) tail = tail * 2 + per[static_cast<std::size_t>(j)];
  __int128 den = (static_cast<__int128>(1) << m) * ((1ll << l) - 1);
  __int128 num = static_cast<__int128>(head) * ((1ll << l) - 1) + tail;
  num %= den;
  if (num < 0) num += den;
  __int128 a = num, b = den;
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return {static_cast<long long>(num), static_cast<long long>(den)};
}

}  // namespace testutil
