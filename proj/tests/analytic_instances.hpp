#pragma once

#include "topp/solver.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testing {

/// Conic program with a known optimal value.
struct AnalyticInstance {
  std::string name;
  topp::StandardConicForm form;
  double optimum;
};

inline topp::SparseMatrix sparse(const topp::MatrixX& m) { return m.sparseView(); }

inline topp::StandardConicForm make_form(const topp::VectorX& c, const topp::MatrixX& A, const topp::VectorX& b,
                                         const topp::MatrixX& G, const topp::VectorX& h, int orthant,
                                         std::vector<int> socs = {}) {
  topp::StandardConicForm f;
  f.c = c;
  f.A = sparse(A);
  f.b = b;
  f.G = sparse(G);
  f.h = h;
  f.orthant = orthant;
  f.soc_dims = std::move(socs);
  f.validate();
  return f;
}

inline topp::VectorX vec(std::initializer_list<double> v) {
  topp::VectorX out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline topp::MatrixX mat(int rows, int cols, std::initializer_list<double> v) {
  topp::MatrixX out(rows, cols);
  auto it = v.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = *it++;
  return out;
}

inline topp::MatrixX none(int cols) { return topp::MatrixX::Zero(0, cols); }
inline topp::VectorX empty() { return topp::VectorX::Zero(0); }

/// Random instance built from a chosen primal-dual pair: x*, s* and z*
/// complementary in the cone, y* free; c, b and h follow from the KKT system.
inline AnalyticInstance planted(const std::string& name, unsigned seed, int n, int p, int orthant,
                                std::vector<int> socs) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N;
  int m = orthant;
  for (int d : socs) m += d;
  topp::MatrixX A(p, n), G(m, n);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = N(rng);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = N(rng);
  topp::VectorX x(n), y(p), s = topp::VectorX::Zero(m), z = topp::VectorX::Zero(m);
  for (int j = 0; j < n; ++j) x(j) = N(rng);
  for (int i = 0; i < p; ++i) y(i) = N(rng);
  for (int i = 0; i < orthant; ++i) {
    // Alternate strictly complementary pairs.
    (i % 2 ? s(i) : z(i)) = 0.5 + std::abs(N(rng));
  }
  int off = orthant;
  for (std::size_t c = 0; c < socs.size(); ++c) {
    const int d = socs[c];
    topp::VectorX u(d - 1);
    for (int i = 0; i < d - 1; ++i) u(i) = N(rng);
    u.normalize();
    const double alpha = 0.5 + std::abs(N(rng)), beta = 0.5 + std::abs(N(rng));
    switch (c % 3) {
      case 0:  // both on the boundary, opposite rays
        s(off) = alpha, s.segment(off + 1, d - 1) = alpha * u;
        z(off) = beta, z.segment(off + 1, d - 1) = -beta * u;
        break;
      case 1:  // s interior, z = 0
        s(off) = alpha + 1.0, s.segment(off + 1, d - 1) = 0.5 * alpha * u;
        break;
      default:  // z interior, s = 0
        z(off) = beta + 1.0, z.segment(off + 1, d - 1) = 0.5 * beta * u;
        break;
    }
    off += d;
  }
  const topp::VectorX c = -(A.transpose() * y + G.transpose() * z);
  return {name, make_form(c, A, A * x, G, G * x + s, orthant, socs), c.dot(x)};
}

inline std::vector<AnalyticInstance> analytic_instances() {
  using topp::MatrixX;
  using topp::VectorX;
  std::vector<AnalyticInstance> out;

  // min x  s.t.  x >= 1
  out.push_back({"lower bound", make_form(vec({1}), none(1), empty(), mat(1, 1, {-1}), vec({-1}), 1), 1.0});

  // min -x1 - x2  s.t.  x1 + 2 x2 <= 4, 3 x1 + x2 <= 6, x >= 0
  out.push_back({"two-variable LP",
                 make_form(vec({-1, -1}), none(2), empty(), mat(4, 2, {1, 2, 3, 1, -1, 0, 0, -1}), vec({4, 6, 0, 0}), 4),
                 -2.8});

  // min x1 + x2  s.t.  x1 + x2 = 2, x >= 0
  out.push_back({"degenerate LP", make_form(vec({1, 1}), mat(1, 2, {1, 1}), vec({2}), mat(2, 2, {-1, 0, 0, -1}),
                                            vec({0, 0}), 2),
                 2.0});

  // Box: min sum_i w_i x_i with -1 <= x_i <= 2.
  {
    const VectorX w = vec({1, -2, 0.5, -0.25});
    MatrixX G(8, 4);
    G << MatrixX::Identity(4, 4), -MatrixX::Identity(4, 4);
    VectorX h(8);
    h << VectorX::Constant(4, 2.0), VectorX::Constant(4, 1.0);
    out.push_back({"box LP", make_form(w, none(4), empty(), G, h, 8), -1 - 4 + -0.5 - 0.5});
  }

  // min t  s.t.  ||x|| <= t, x = (1, 2)
  out.push_back({"fixed point norm",
                 make_form(vec({1, 0, 0}), mat(2, 3, {0, 1, 0, 0, 0, 1}), vec({1, 2}),
                           -MatrixX::Identity(3, 3), VectorX::Zero(3), 0, {3}),
                 std::sqrt(5.0)});

  // min c'x  s.t.  ||x|| <= 1, with |c| = 3
  {
    MatrixX G = MatrixX::Zero(4, 3);
    G.bottomRows(3) = -MatrixX::Identity(3, 3);
    out.push_back({"linear over ball", make_form(vec({1, 2, 2}), none(3), empty(), G, vec({1, 0, 0, 0}), 0, {4}), -3.0});
  }

  // Distance from p = (1, 1, 1) to the plane x + y + z = 0: sqrt(3).
  {
    // Variables (t, x1, x2, x3); cone (t, x - p).
    MatrixX G = -MatrixX::Identity(4, 4);
    const VectorX h = vec({0, -1, -1, -1});
    out.push_back({"distance to plane", make_form(vec({1, 0, 0, 0}), mat(1, 4, {0, 1, 1, 1}), vec({0}), G, h, 0, {4}),
                   std::sqrt(3.0)});
  }

  // max c  s.t.  c^2 <= b, b = 4. Rotated cone: ||(2c, b - 1)|| <= b + 1.
  {
    // Variables (c, b).
    const MatrixX G = mat(3, 2, {0, -1, -2, 0, 0, -1});
    out.push_back({"square root epigraph",
                   make_form(vec({-1, 0}), mat(1, 2, {0, 1}), vec({4}), G, vec({1, 0, -1}), 0, {3}), -2.0});
  }

  // min d  s.t.  d c >= 1, c <= 2. Cone: ||(2, d - c)|| <= d + c.
  {
    // Variables (d, c).
    const MatrixX G = mat(4, 2, {0, 1, -1, -1, 0, 0, -1, 1});
    out.push_back({"reciprocal epigraph", make_form(vec({1, 0}), none(2), empty(), G, vec({2, 0, 2, 0}), 1, {3}), 0.5});
  }

  // Minimum-norm solution of x1 + x2 + x3 = 3: (1, 1, 1).
  {
    // Variables (t, x).
    out.push_back({"minimum norm", make_form(vec({1, 0, 0, 0}), mat(1, 4, {0, 1, 1, 1}), vec({3}),
                                             -MatrixX::Identity(4, 4), VectorX::Zero(4), 0, {4}),
                   std::sqrt(3.0)});
  }

  // Scalar cone (dimension 1) behaves like an orthant entry.
  out.push_back({"one-dimensional cone", make_form(vec({2}), none(1), empty(), mat(1, 1, {-1}), vec({-3}), 0, {1}), 6.0});

  // Two cones sharing a variable: min t  s.t. ||x - 1|| <= t, ||x + 1|| <= t in 1D: t = 1.
  {
    // Variables (t, x).
    const MatrixX G = mat(4, 2, {-1, 0, 0, -1, -1, 0, 0, -1});
    out.push_back({"shared variable cones", make_form(vec({1, 0}), none(2), empty(), G, vec({0, -1, 0, 1}), 0, {2, 2}),
                   1.0});
  }

  for (int i = 0; i < 6; ++i) {
    out.push_back(planted("planted LP " + std::to_string(i), 100 + i, 6 + i, 2, 10 + 2 * i, {}));
  }
  for (int i = 0; i < 6; ++i) {
    out.push_back(planted("planted SOCP " + std::to_string(i), 200 + i, 8 + i, 2, 3, {3, 4, 2, 5, 3}));
  }
  out.push_back(planted("planted large SOCP", 300, 40, 6, 30, std::vector<int>(12, 4)));
  return out;
}

/// x >= 1 and x <= 0.
inline topp::StandardConicForm primal_infeasible_lp() {
  return make_form(vec({1}), none(1), empty(), mat(2, 1, {-1, 1}), vec({-1, 0}), 2);
}

/// t >= ||x|| with t <= 1 and x1 = 2.
inline topp::StandardConicForm primal_infeasible_socp() {
  // Variables (t, x1, x2).
  topp::MatrixX G = topp::MatrixX::Zero(4, 3);
  G(0, 0) = 1;
  G.bottomRows(3) = -topp::MatrixX::Identity(3, 3);
  return make_form(vec({1, 0, 0}), mat(1, 3, {0, 1, 0}), vec({2}), G, vec({1, 0, 0, 0}), 1, {3});
}

/// min -x  s.t.  x >= 0.
inline topp::StandardConicForm dual_infeasible_lp() {
  return make_form(vec({-1}), none(1), empty(), mat(1, 1, {-1}), vec({0}), 1);
}

/// min -t  s.t.  ||x|| <= t.
inline topp::StandardConicForm dual_infeasible_socp() {
  return make_form(vec({-1, 0, 0}), none(3), empty(), -topp::MatrixX::Identity(3, 3), topp::VectorX::Zero(3), 0, {3});
}

}  // namespace testing
