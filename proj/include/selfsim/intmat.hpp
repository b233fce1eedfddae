#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

using IntVec = std::vector<long long>;
using IntMat = std::vector<IntVec>;  // row major, square or rectangular

inline int rows(const IntMat& m) { return static_cast<int>(m.size()); }
inline int cols(const IntMat& m) { return m.empty() ? 0 : static_cast<int>(m[0].size()); }

inline void check_square(const IntMat& m) {
  if (m.empty() || rows(m) != cols(m)) throw domain_error("matrix must be square and nonempty");
  for (const IntVec& r : m)
    if (static_cast<int>(r.size()) != cols(m)) throw domain_error("ragged matrix");
}

inline IntVec mat_vec(const IntMat& a, const IntVec& v) {
  IntVec out(static_cast<std::size_t>(rows(a)), 0);
  for (int i = 0; i < rows(a); ++i) {
    __int128 acc = 0;
    for (int j = 0; j < cols(a); ++j)
      acc += static_cast<__int128>(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
             v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = static_cast<long long>(acc);
  }
  return out;
}

inline IntMat mat_mul(const IntMat& a, const IntMat& b) {
  IntMat out(static_cast<std::size_t>(rows(a)), IntVec(static_cast<std::size_t>(cols(b)), 0));
  for (int i = 0; i < rows(a); ++i)
    for (int k = 0; k < cols(a); ++k) {
      long long aik = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (aik == 0) continue;
      for (int j = 0; j < cols(b); ++j)
        out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
            aik * b[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    }
  return out;
}

/// Determinant by fraction-free (Bareiss) elimination. Exact for the small
/// matrices used here; intermediate products are taken in 128 bits.
inline long long det(IntMat m) {
  check_square(m);
  const int n = rows(m);
  long long sign = 1;
  long long prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      std::swap(m[static_cast<std::size_t>(k)], m[static_cast<std::size_t>(p)]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        __int128 num = static_cast<__int128>(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
                           m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] -
                       static_cast<__int128>(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) *
                           m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<long long>(num / prev);
      }
    prev = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  }
  return sign * m[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(n - 1)];
}

/// Solves A x = b exactly over the integers; returns nullopt when the
/// solution is non-integral. Requires det(A) != 0.
inline std::optional<IntVec> solve_integer(const IntMat& a, const IntVec& b) {
  check_square(a);
  const int n = rows(a);
  // Cramer's rule on exact determinants; n is tiny throughout the library.
  long long d = det(a);
  if (d == 0) throw domain_error("singular matrix in integer solve");
  IntVec x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    IntMat m = a;
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = b[static_cast<std::size_t>(i)];
    long long dj = det(m);
    if (dj % d != 0) return std::nullopt;
    x[static_cast<std::size_t>(j)] = dj / d;
  }
  return x;
}

inline bool in_lattice(const IntMat& a, const IntVec& v) { return solve_integer(a, v).has_value(); }

/// Adjugate matrix: adj(A) * A = det(A) * I. Exact.
inline IntMat adjugate(const IntMat& a) {
  check_square(a);
  const int n = rows(a);
  IntMat adj(static_cast<std::size_t>(n), IntVec(static_cast<std::size_t>(n), 0));
  if (n == 1) {
    adj[0][0] = 1;
    return adj;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      IntMat minor;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        IntVec row;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          row.push_back(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        }
        minor.push_back(std::move(row));
      }
      long long cof = det(minor);
      if ((i + j) % 2 != 0) cof = -cof;
      adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = cof;  // transpose of cofactors
    }
  return adj;
}

/// Column-style Hermite normal form: returns H lower triangular with
/// positive diagonal such that the columns of H span the same lattice as
/// the columns of A. Requires det(A) != 0.
inline IntMat hermite_normal_form(IntMat a) {
  check_square(a);
  const int n = rows(a);
  if (det(a) == 0) throw domain_error("HNF requires a nonsingular matrix");
  auto col_swap = [&](int c1, int c2) {
    for (int r = 0; r < n; ++r)
      std::swap(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c1)],
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)]);
  };
  auto col_axpy = [&](int dst, int src, long long f) {  // col dst += f * col src
    for (int r = 0; r < n; ++r)
      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(dst)] +=
          f * a[static_cast<std::size_t>(r)][static_cast<std::size_t>(src)];
  };
  for (int r = 0; r < n; ++r) {
    // Euclid across columns r..n-1 on row r.
    while (true) {
      int nz = -1;
      for (int c = r; c < n; ++c)
        if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0 && (nz < 0 ||
            std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) <
                std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(nz)])))
          nz = c;
      if (nz < 0) throw domain_error("HNF: unexpected zero row");
      if (nz != r) col_swap(r, nz);
      bool done = true;
      for (int c = r + 1; c < n; ++c) {
        long long q = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
        col_axpy(c, r, -q);
        if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0) done = false;
      }
      if (done) break;
    }
    if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)] < 0) col_axpy(r, r, -2);
  }
  return a;
}

/// A complete residue system for Z^n / (A Z^n): one representative per
/// coset, enumerated deterministically from the HNF diagonal box.
inline std::vector<IntVec> residue_system(const IntMat& a) {
  IntMat h = hermite_normal_form(a);
  const int n = rows(h);
  std::vector<IntVec> out;
  IntVec counter(static_cast<std::size_t>(n), 0);
  while (true) {
    out.push_back(counter);
    int i = n - 1;
    while (i >= 0) {
      if (++counter[static_cast<std::size_t>(i)] <
          h[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)])
        break;
      counter[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return out;
}

inline std::string format_vec(const IntVec& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

}  // namespace selfsim
