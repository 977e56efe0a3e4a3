#include "topp/solver.hpp"

#include <Eigen/OrderingMethods>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace topp {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::DualInfeasible: return "DualInfeasible";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

void StandardConicForm::validate() const {
  const auto n = c.size();
  if (A.cols() != n || G.cols() != n) throw std::invalid_argument("standard form: column count mismatch");
  if (A.rows() != b.size()) throw std::invalid_argument("standard form: A and b disagree");
  if (G.rows() != h.size()) throw std::invalid_argument("standard form: G and h disagree");
  if (orthant < 0) throw std::invalid_argument("standard form: negative orthant dimension");
  long rows = orthant;
  for (int d : soc_dims) {
    if (d < 1) throw std::invalid_argument("standard form: empty second-order cone");
    rows += d;
  }
  if (rows != h.size()) throw std::invalid_argument("standard form: cones do not partition the slack vector");
}

// ---------------------------------------------------------------------------
// Canonicalization

std::map<std::string, VectorX> CanonicalProgram::unpack(const VectorX& x) const {
  std::map<std::string, VectorX> out;
  for (const auto& s : slices) out[s.name] = x.segment(s.offset, s.size);
  return out;
}

CanonicalProgram canonicalize(const ConicProgram& program) {
  using Triplet = Eigen::Triplet<double>;
  const int n = program.num_variables();
  for (const auto& cone : program.cones()) {
    for (const auto& e : cone.entries) {
      for (const auto& t : e.terms) {
        if (t.var < 0 || t.var >= n) throw std::invalid_argument("canonicalize: cone references a missing variable");
      }
    }
  }

  CanonicalProgram out;
  out.slices = program.slices();
  std::vector<Triplet> a_trip, g_trip;
  std::vector<double> b_vals, h_vals;

  auto add_eq = [&](const std::vector<LinearTerm>& terms, double rhs, RowOrigin origin) {
    const int r = static_cast<int>(b_vals.size());
    for (const auto& t : terms) a_trip.emplace_back(r, t.var, t.coef);
    b_vals.push_back(rhs);
    out.equality_origin.push_back(std::move(origin));
  };
  // sum(coef * x) <= rhs  ->  G row = terms, h = rhs.
  auto add_le = [&](const std::vector<LinearTerm>& terms, double scale, double rhs, RowOrigin origin) {
    const int r = static_cast<int>(h_vals.size());
    for (const auto& t : terms) g_trip.emplace_back(r, t.var, scale * t.coef);
    h_vals.push_back(rhs);
    out.cone_origin.push_back(std::move(origin));
  };

  const auto& rows = program.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].is_equality()) add_eq(rows[i].terms, rows[i].lower, {rows[i].tag, static_cast<int>(i)});
  }
  for (const auto& f : program.fixed()) add_eq({{f.var, 1.0}}, f.value, {{"fixed", -1}, -1});
  for (int v : program.pinned()) add_eq({{v, 1.0}}, 0.0, {{"pinned", -1}, -1});

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.is_equality()) continue;
    if (std::isfinite(row.upper)) add_le(row.terms, 1.0, row.upper, {row.tag, static_cast<int>(i)});
    if (std::isfinite(row.lower)) add_le(row.terms, -1.0, -row.lower, {row.tag, static_cast<int>(i)});
  }
  const int orthant = static_cast<int>(h_vals.size());

  // s = h - G x must equal the affine entry value, so G = -terms, h = constant.
  std::vector<int> soc_dims;
  const auto& cones = program.cones();
  for (std::size_t i = 0; i < cones.size(); ++i) {
    for (const auto& e : cones[i].entries) add_le(e.terms, -1.0, e.constant, {cones[i].tag, static_cast<int>(i)});
    soc_dims.push_back(static_cast<int>(cones[i].entries.size()));
  }

  StandardConicForm& f = out.form;
  f.c = program.objective();
  f.A.resize(static_cast<int>(b_vals.size()), n);
  f.A.setFromTriplets(a_trip.begin(), a_trip.end());
  f.b = Eigen::Map<const VectorX>(b_vals.data(), static_cast<Eigen::Index>(b_vals.size()));
  f.G.resize(static_cast<int>(h_vals.size()), n);
  f.G.setFromTriplets(g_trip.begin(), g_trip.end());
  f.h = Eigen::Map<const VectorX>(h_vals.data(), static_cast<Eigen::Index>(h_vals.size()));
  f.orthant = orthant;
  f.soc_dims = std::move(soc_dims);
  f.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Cone algebra

namespace {

struct Cones {
  int orthant = 0;
  std::vector<int> dims;
  std::vector<int> offsets;  // start row of each second-order cone
  int size = 0;

  explicit Cones(const StandardConicForm& f) : orthant(f.orthant), dims(f.soc_dims) {
    int off = orthant;
    for (int d : dims) {
      offsets.push_back(off);
      off += d;
    }
    size = off;
  }

  VectorX identity() const {
    VectorX e = VectorX::Zero(size);
    e.head(orthant).setOnes();
    for (int off : offsets) e(off) = 1.0;
    return e;
  }
};

// x0^2 - |x1|^2 in factored form, which keeps its sign near the boundary.
double soc_residual(const Eigen::Ref<const VectorX>& x) {
  const double t = x.tail(x.size() - 1).norm();
  return (x(0) - t) * (x(0) + t);
}

/// Largest alpha >= 0 keeping x + alpha dx in the cone product (x interior).
double max_step(const Cones& k, const VectorX& x, const VectorX& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.orthant; ++i) {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int d = k.dims[c];
    const double t = x(off);
    const double dt = dx(off);
    if (d == 1) {
      if (dt < 0.0) alpha = std::min(alpha, -t / dt);
      continue;
    }
    const auto u = x.segment(off + 1, d - 1);
    const auto du = dx.segment(off + 1, d - 1);
    // q(alpha) = qa alpha^2 + 2 qb alpha + qc, qc > 0; smallest positive root.
    const double qa = dt * dt - du.squaredNorm();
    const double qb = t * dt - u.dot(du);
    const double qc = std::max(t * t - u.squaredNorm(), 0.0);
    double root = std::numeric_limits<double>::infinity();
    if (std::abs(qa) < 1e-300) {
      if (qb < 0.0) root = -qc / (2.0 * qb);
    } else {
      const double disc = qb * qb - qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // Roots of qa a^2 + 2 qb a + qc: (-qb +- sq) / qa, computed stably.
        const double r1 = (qb >= 0.0) ? -(qb + sq) / qa : qc / (-qb + sq);
        const double r2 = (qb >= 0.0) ? qc / (-(qb + sq)) : (-qb + sq) / qa;
        for (double r : {r1, r2}) {
          if (r > 0.0 && std::isfinite(r)) root = std::min(root, r);
        }
      }
    }
    // Guard the head sign as well.
    if (dt < 0.0) root = std::min(root, -t / dt);
    alpha = std::min(alpha, root);
  }
  return alpha;
}

/// Nesterov-Todd scaling at (s, z): W z = W^{-1} s = lambda.
struct Scaling {
  const Cones* k = nullptr;
  VectorX d;                 // orthant: sqrt(s / z)
  std::vector<MatrixX> w;    // per SOC: W
  std::vector<MatrixX> winv; // per SOC: W^{-1}
  VectorX lambda;
  VectorX lambda_det;        // per SOC: det(lambda) = sqrt(det s det z), free of cancellation

  bool compute(const Cones& cones, const VectorX& s, const VectorX& z) {
    k = &cones;
    d = (s.head(cones.orthant).array() / z.head(cones.orthant).array()).sqrt();
    w.resize(cones.dims.size());
    winv.resize(cones.dims.size());
    lambda_det.resize(cones.dims.size());
    for (std::size_t c = 0; c < cones.dims.size(); ++c) {
      const int off = cones.offsets[c];
      const int dim = cones.dims[c];
      const VectorX sc = s.segment(off, dim);
      const VectorX zc = z.segment(off, dim);
      const double sres = soc_residual(sc);
      const double zres = soc_residual(zc);
      if (!(sres > 0.0) || !(zres > 0.0)) {
        return false;
      }
      const VectorX sbar = sc / std::sqrt(sres);
      const VectorX zbar = zc / std::sqrt(zres);
      const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
      VectorX wbar(dim);
      wbar(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
      wbar.tail(dim - 1) = (sbar.tail(dim - 1) - zbar.tail(dim - 1)) / (2.0 * gamma);
      const double eta = std::pow(sres / zres, 0.25);
      const VectorX q = wbar.tail(dim - 1);
      const double a = wbar(0);
      MatrixX m(dim, dim);
      m(0, 0) = a;
      m.block(0, 1, 1, dim - 1) = q.transpose();
      m.block(1, 0, dim - 1, 1) = q;
      m.block(1, 1, dim - 1, dim - 1) = MatrixX::Identity(dim - 1, dim - 1) + q * q.transpose() / (1.0 + a);
      MatrixX mi = m;
      mi.block(0, 1, 1, dim - 1) *= -1.0;
      mi.block(1, 0, dim - 1, 1) *= -1.0;
      lambda_det(c) = std::sqrt(sres * zres);
      w[c] = eta * m;
      winv[c] = mi / eta;
    }
    lambda = apply(z);
    return lambda.allFinite();
  }

  VectorX apply(const VectorX& v) const {
    VectorX out(v.size());
    out.head(k->orthant) = d.cwiseProduct(v.head(k->orthant));
    for (std::size_t c = 0; c < w.size(); ++c) {
      out.segment(k->offsets[c], k->dims[c]) = w[c] * v.segment(k->offsets[c], k->dims[c]);
    }
    return out;
  }

  VectorX apply_inverse(const VectorX& v) const {
    VectorX out(v.size());
    out.head(k->orthant) = v.head(k->orthant).cwiseQuotient(d);
    for (std::size_t c = 0; c < w.size(); ++c) {
      out.segment(k->offsets[c], k->dims[c]) = winv[c] * v.segment(k->offsets[c], k->dims[c]);
    }
    return out;
  }
};

/// Jordan product u o v.
VectorX jordan_product(const Cones& k, const VectorX& u, const VectorX& v) {
  VectorX out(u.size());
  out.head(k.orthant) = u.head(k.orthant).cwiseProduct(v.head(k.orthant));
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int d = k.dims[c];
    out(off) = u.segment(off, d).dot(v.segment(off, d));
    out.segment(off + 1, d - 1) = u(off) * v.segment(off + 1, d - 1) + v(off) * u.segment(off + 1, d - 1);
  }
  return out;
}

/// Solves lambda o u = v for u.
VectorX jordan_divide(const Cones& k, const VectorX& lambda, const VectorX& lambda_det, const VectorX& v) {
  VectorX out(v.size());
  out.head(k.orthant) = v.head(k.orthant).cwiseQuotient(lambda.head(k.orthant));
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int d = k.dims[c];
    const double l0 = lambda(off);
    const auto l1 = lambda.segment(off + 1, d - 1);
    const double v0 = v(off);
    const auto v1 = v.segment(off + 1, d - 1);
    const double det = lambda_det(c);
    const double u0 = (l0 * v0 - l1.dot(v1)) / det;
    out(off) = u0;
    out.segment(off + 1, d - 1) = (v1 - l1 * u0) / l0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse LDL' for quasi-definite matrices. Pivots whose sign disagrees with
// the expected inertia (or that vanish) are replaced by +-delta.

class QuasiDefiniteLdl {
 public:
  /// `lower` holds the lower triangle; `signs` the expected pivot signs.
  /// Indices from `eliminate_first` on are pivoted before the rest, which is
  /// then ordered by AMD on its Schur-complement pattern.
  void analyze(const SparseMatrix& lower, const std::vector<int>& signs, int eliminate_first) {
    n_ = static_cast<int>(lower.rows());
    const int head = eliminate_first;
    const int tail = n_ - head;
    SparseMatrix pattern = SparseMatrix(lower.selfadjointView<Eigen::Lower>());
    for (int j = 0; j < pattern.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator it(pattern, j); it; ++it) it.valueRef() = 1.0;
    }
    const SparseMatrix top = pattern.topLeftCorner(head, head);
    const SparseMatrix coupling = pattern.bottomLeftCorner(tail, head);
    const SparseMatrix reduced = SparseMatrix(top + SparseMatrix(coupling.transpose() * coupling));
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> rp;
    amd(reduced, rp);
    const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> rpos = rp.inverse();
    p_.resize(n_);
    for (int i = 0; i < head; ++i) p_.indices()(i) = tail + rpos.indices()(i);
    for (int i = head; i < n_; ++i) p_.indices()(i) = i - head;
    pinv_ = p_.inverse();
    const SparseMatrix up = permuted_upper(lower);

    etree_.assign(n_, -1);
    std::vector<int> lnz(n_, 0), work(n_, -1);
    for (int j = 0; j < n_; ++j) {
      work[j] = j;
      for (SparseMatrix::InnerIterator it(up, j); it; ++it) {
        int i = static_cast<int>(it.row());
        while (i < j && work[i] != j) {
          if (etree_[i] == -1) etree_[i] = j;
          ++lnz[i];
          work[i] = j;
          i = etree_[i];
        }
      }
    }
    lp_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) lp_[i + 1] = lp_[i] + lnz[i];
    li_.assign(lp_[n_], 0);
    lx_.assign(lp_[n_], 0.0);
    d_.assign(n_, 0.0);
    dinv_.assign(n_, 0.0);
    signs_.assign(n_, 1);
    for (int orig = 0; orig < n_; ++orig) signs_[p_.indices()(orig)] = signs[orig];
  }

  void factor(const SparseMatrix& lower, double delta) {
    const SparseMatrix up = permuted_upper(lower);
    std::vector<double> y(n_, 0.0);
    std::vector<char> marked(n_, 0);
    std::vector<int> next(lp_.begin(), lp_.end() - 1), pattern, stack;
    pattern.reserve(n_);
    stack.reserve(n_);
    for (int k = 0; k < n_; ++k) {
      pattern.clear();
      d_[k] = 0.0;
      for (SparseMatrix::InnerIterator it(up, k); it; ++it) {
        const int i = static_cast<int>(it.row());
        if (i == k) {
          d_[k] = it.value();
          continue;
        }
        y[i] = it.value();
        if (marked[i]) continue;
        stack.clear();
        for (int j = i; j != -1 && j < k && !marked[j]; j = etree_[j]) {
          marked[j] = 1;
          stack.push_back(j);
        }
        while (!stack.empty()) {
          pattern.push_back(stack.back());
          stack.pop_back();
        }
      }
      for (auto it = pattern.rbegin(); it != pattern.rend(); ++it) {
        const int c = *it;
        const double yc = y[c];
        for (int j = lp_[c]; j < next[c]; ++j) y[li_[j]] -= lx_[j] * yc;
        const double l = yc * dinv_[c];
        li_[next[c]] = k;
        lx_[next[c]] = l;
        ++next[c];
        d_[k] -= yc * l;
        y[c] = 0.0;
        marked[c] = 0;
      }
      if (!(signs_[k] * d_[k] > delta)) d_[k] = signs_[k] * delta;
      dinv_[k] = 1.0 / d_[k];
    }
  }

  VectorX solve(const VectorX& b) const {
    VectorX x = p_ * b;
    for (int i = 0; i < n_; ++i) {
      for (int j = lp_[i]; j < lp_[i + 1]; ++j) x(li_[j]) -= lx_[j] * x(i);
    }
    for (int i = 0; i < n_; ++i) x(i) *= dinv_[i];
    for (int i = n_ - 1; i >= 0; --i) {
      for (int j = lp_[i]; j < lp_[i + 1]; ++j) x(i) -= lx_[j] * x(li_[j]);
    }
    return pinv_ * x;
  }

 private:
  SparseMatrix permuted_upper(const SparseMatrix& lower) const {
    SparseMatrix up(n_, n_);
    up.selfadjointView<Eigen::Upper>() = lower.selfadjointView<Eigen::Lower>().twistedBy(p_);
    return up;
  }

  int n_ = 0;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p_, pinv_;
  std::vector<int> etree_, lp_, li_, signs_;
  std::vector<double> lx_, d_, dinv_;
};

// ---------------------------------------------------------------------------
// KKT system in scaled form: with G~ = W^{-1} G and z~ = W z,
//   [0 A' G~'; A 0 0; G~ 0 -I] [x; y; z~] = [r1; r2; W^{-1} r3]
// is equivalent to [0 A' G'; A 0 0; G 0 -W'W] but keeps the cone block at -I,
// which survives the extreme conditioning of W near the boundary.

class KktSolver {
 public:
  static constexpr double kDelta = 1e-8;

  KktSolver(const SparseMatrix& a, const SparseMatrix& g, const Cones& k)
      : n_(static_cast<int>(a.cols())), p_(static_cast<int>(a.rows())), m_(static_cast<int>(g.rows())), a_(a), g_(g), k_(k) {}

  /// `delta` is the static regularization on the x and y diagonals.
  bool factor(const Scaling& w, double delta = kDelta) {
    using Triplet = Eigen::Triplet<double>;
    w_ = &w;
    std::vector<Triplet> wt;
    for (int i = 0; i < k_.orthant; ++i) wt.emplace_back(i, i, 1.0 / w.d(i));
    for (std::size_t c = 0; c < k_.dims.size(); ++c) {
      const int off = k_.offsets[c];
      for (int j = 0; j < k_.dims[c]; ++j) {
        for (int i = 0; i < k_.dims[c]; ++i) wt.emplace_back(off + i, off + j, w.winv[c](i, j));
      }
    }
    SparseMatrix winv(m_, m_);
    winv.setFromTriplets(wt.begin(), wt.end());
    const SparseMatrix gs = winv * g_;

    const int dim = n_ + p_ + m_;
    std::vector<Triplet> exact;
    exact.reserve(a_.nonZeros() + gs.nonZeros() + dim);
    for (int i = 0; i < n_ + p_; ++i) exact.emplace_back(i, i, 0.0);  // keep the diagonal in the pattern
    for (int i = 0; i < m_; ++i) exact.emplace_back(n_ + p_ + i, n_ + p_ + i, -1.0);
    for (int col = 0; col < a_.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(a_, col); it; ++it) exact.emplace_back(n_ + it.row(), col, it.value());
    }
    for (int col = 0; col < gs.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(gs, col); it; ++it) exact.emplace_back(n_ + p_ + it.row(), col, it.value());
    }
    exact_.resize(dim, dim);
    exact_.setFromTriplets(exact.begin(), exact.end());
    if (!analyzed_) {
      std::vector<int> signs(dim, -1);
      std::fill(signs.begin(), signs.begin() + n_, 1);
      ldl_.analyze(exact_, signs, n_ + p_);
      analyzed_ = true;
    }
    // Static regularization on top of the dynamic pivot guard.
    SparseMatrix reg = exact_;
    for (int i = 0; i < n_ + p_; ++i) reg.coeffRef(i, i) += i < n_ ? delta : -delta;
    ldl_.factor(reg, delta);
    return true;
  }

  /// Solves the unscaled system for rhs = [r1; r2; r3]; returns [x; y; z].
  VectorX solve(const VectorX& rhs) const {
    VectorX b = rhs;
    b.tail(m_) = w_->apply_inverse(rhs.tail(m_));
    VectorX sol = ldl_.solve(b);
    const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < kRefinements; ++it) {
      const VectorX r = b - exact_.selfadjointView<Eigen::Lower>() * sol;
      if (r.lpNorm<Eigen::Infinity>() <= 1e-14 * scale) break;
      sol += ldl_.solve(r);
    }
    sol.tail(m_) = w_->apply_inverse(VectorX(sol.tail(m_)));
    return sol;
  }

 private:
  static constexpr int kRefinements = 8;
  int n_, p_, m_;
  const SparseMatrix& a_;
  const SparseMatrix& g_;
  const Cones& k_;
  const Scaling* w_ = nullptr;
  SparseMatrix exact_;
  QuasiDefiniteLdl ldl_;
  bool analyzed_ = false;
};

/// Ruiz-style equilibration: A_hat = E A D, G_hat = F G D, with F constant
/// on every second-order cone.
struct Equilibration {
  VectorX d, e, f;

  void compute(const StandardConicForm& form, const Cones& k, bool enabled) {
    const int n = form.num_variables();
    d = VectorX::Ones(n);
    e = VectorX::Ones(form.A.rows());
    f = VectorX::Ones(form.G.rows());
    if (!enabled) return;
    SparseMatrix a = form.A;
    SparseMatrix g = form.G;
    auto clamp_norm = [](double v) { return v < 1e-4 ? 1.0 : std::min(v, 1e4); };
    for (int pass = 0; pass < 10; ++pass) {
      VectorX col = VectorX::Zero(n), arow = VectorX::Zero(a.rows()), grow = VectorX::Zero(g.rows());
      for (int j = 0; j < a.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
          col(j) = std::max(col(j), std::abs(it.value()));
          arow(it.row()) = std::max(arow(it.row()), std::abs(it.value()));
        }
      }
      for (int j = 0; j < g.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(g, j); it; ++it) {
          col(j) = std::max(col(j), std::abs(it.value()));
          grow(it.row()) = std::max(grow(it.row()), std::abs(it.value()));
        }
      }
      for (std::size_t c = 0; c < k.dims.size(); ++c) {
        const double mx = grow.segment(k.offsets[c], k.dims[c]).maxCoeff();
        grow.segment(k.offsets[c], k.dims[c]).setConstant(mx);
      }
      VectorX dc(n), ec(a.rows()), fc(g.rows());
      for (int j = 0; j < n; ++j) dc(j) = 1.0 / std::sqrt(clamp_norm(col(j)));
      for (int i = 0; i < a.rows(); ++i) ec(i) = 1.0 / std::sqrt(clamp_norm(arow(i)));
      for (int i = 0; i < g.rows(); ++i) fc(i) = 1.0 / std::sqrt(clamp_norm(grow(i)));
      a = ec.asDiagonal() * a * dc.asDiagonal();
      g = fc.asDiagonal() * g * dc.asDiagonal();
      d = d.cwiseProduct(dc);
      e = e.cwiseProduct(ec);
      f = f.cwiseProduct(fc);
    }
  }
};

double norm_or_zero(const VectorX& v) { return v.size() ? v.norm() : 0.0; }

Residuals residuals_of(const StandardConicForm& form, const VectorX& x, const VectorX& y, const VectorX& z,
                       const VectorX& s) {
  Residuals r;
  const double pscale = 1.0 + std::max(norm_or_zero(form.b), norm_or_zero(form.h));
  const double ra = form.A.rows() ? (form.A * x - form.b).norm() : 0.0;
  const double rg = form.G.rows() ? (form.G * x + s - form.h).norm() : 0.0;
  r.primal = std::max(ra, rg) / pscale;
  VectorX dual = form.c;
  if (form.A.rows()) dual += form.A.transpose() * y;
  if (form.G.rows()) dual += form.G.transpose() * z;
  r.dual = dual.norm() / (1.0 + form.c.norm());
  r.gap = s.dot(z);
  const double pcost = form.c.dot(x);
  const double dcost = -form.b.dot(y) - form.h.dot(z);
  r.relative_gap = std::abs(r.gap) / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
  return r;
}

}  // namespace

double cone_violation(const StandardConicForm& form, const VectorX& v) {
  const Cones k(form);
  double worst = 0.0;
  for (int i = 0; i < k.orthant; ++i) worst = std::max(worst, -v(i));
  for (std::size_t c = 0; c < k.dims.size(); ++c) {
    const int off = k.offsets[c];
    const int d = k.dims[c];
    const double tail = d > 1 ? v.segment(off + 1, d - 1).norm() : 0.0;
    worst = std::max(worst, tail - v(off));
  }
  return worst;
}

double primal_certificate_violation(const StandardConicForm& form, const VectorX& y, const VectorX& z) {
  VectorX r = VectorX::Zero(form.num_variables());
  if (form.A.rows()) r += form.A.transpose() * y;
  if (form.G.rows()) r += form.G.transpose() * z;
  const double inner = form.b.dot(y) + form.h.dot(z);
  // Normalize so the certificate has b'y + h'z = -1.
  if (!(inner < 0.0)) return std::numeric_limits<double>::infinity();
  const double scale = -1.0 / inner;
  return std::max(r.norm() * scale, cone_violation(form, z) * scale);
}

double dual_certificate_violation(const StandardConicForm& form, const VectorX& x, const VectorX& s) {
  const double inner = form.c.dot(x);
  if (!(inner < 0.0)) return std::numeric_limits<double>::infinity();
  const double scale = -1.0 / inner;
  const double ra = form.A.rows() ? (form.A * x).norm() : 0.0;
  const double rg = form.G.rows() ? (form.G * x + s).norm() : 0.0;
  return std::max({ra * scale, rg * scale, cone_violation(form, s) * scale});
}

Residuals verify_kkt(const StandardConicForm& form, const SolveReport& report) {
  return residuals_of(form, report.x, report.y, report.z, report.s);
}

// ---------------------------------------------------------------------------
// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
// Mehrotra predictor-corrector steps.

SolveReport solve(const StandardConicForm& form, const SolverSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  form.validate();
  const Cones k(form);
  const int n = form.num_variables();
  const int p = static_cast<int>(form.A.rows());
  const int m = static_cast<int>(form.G.rows());

  Equilibration eq;
  eq.compute(form, k, settings.equilibrate);
  const SparseMatrix a = eq.e.asDiagonal() * form.A * eq.d.asDiagonal();
  const SparseMatrix g = eq.f.asDiagonal() * form.G * eq.d.asDiagonal();
  const VectorX c = eq.d.cwiseProduct(form.c);
  const VectorX b = eq.e.cwiseProduct(form.b);
  const VectorX h = eq.f.cwiseProduct(form.h);
  const double nu = form.degree();

  VectorX x = VectorX::Zero(n), y = VectorX::Zero(p);
  VectorX s = k.identity(), z = k.identity();
  double tau = 1.0, kappa = 1.0;

  SolveReport report;
  KktSolver kkt(a, g, k);
  Scaling w;

  // Unscaled, dehomogenized copies of the current iterate.
  auto unscale = [&](double divisor) {
    report.x = eq.d.cwiseProduct(x) / divisor;
    report.y = eq.e.cwiseProduct(y) / divisor;
    report.z = eq.f.cwiseProduct(z) / divisor;
    report.s = s.cwiseQuotient(eq.f) / divisor;
  };
  auto finish = [&](SolveStatus status) {
    report.status = status;
    report.primal_objective = form.c.dot(report.x);
    report.dual_objective = -form.b.dot(report.y) - form.h.dot(report.z);
    report.residuals = residuals_of(form, report.x, report.y, report.z, report.s);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  };

  for (int iter = 0;; ++iter) {
    report.iterations = iter;
    // Residuals of the homogeneous embedding.
    VectorX rx = -c * tau;
    if (p) rx -= a.transpose() * y;
    if (m) rx -= g.transpose() * z;
    const VectorX ry = p ? VectorX(a * x - b * tau) : VectorX::Zero(0);
    const VectorX rz = m ? VectorX(s + g * x - h * tau) : VectorX::Zero(0);
    const double cx = c.dot(x);
    const double by_hz = b.dot(y) + h.dot(z);
    const double rt = kappa + cx + by_hz;
    const double mu = (s.dot(z) + tau * kappa) / (nu + 1.0);

    unscale(tau);
    const Residuals res = residuals_of(form, report.x, report.y, report.z, report.s);
    if (settings.verbose) {
      std::fprintf(stderr, "%3d  pcost %+.6e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kap %.2e\n", iter,
                   form.c.dot(report.x), res.primal, res.dual, res.gap, tau, kappa);
    }
    if (res.primal <= settings.tol_feas && res.dual <= settings.tol_feas && res.relative_gap <= settings.tol_gap) {
      return finish(SolveStatus::Optimal);
    }
    // Infeasibility certificates.
    if (by_hz < 0.0) {
      unscale(-by_hz);
      const double viol = primal_certificate_violation(form, report.y, report.z);
      if ((tau < kappa && viol <= settings.tol_feas) || (tau / kappa <= settings.tol_infeas && viol <= 1e-6)) {
        return finish(SolveStatus::PrimalInfeasible);
      }
    }
    if (cx < 0.0) {
      unscale(-cx);
      const double viol = dual_certificate_violation(form, report.x, report.s);
      if ((tau < kappa && viol <= settings.tol_feas) || (tau / kappa <= settings.tol_infeas && viol <= 1e-6)) {
        return finish(SolveStatus::DualInfeasible);
      }
    }
    if (iter >= settings.max_iter) {
      unscale(tau);
      return finish(SolveStatus::MaxIterations);
    }

    if (!w.compute(k, s, z)) {
      if (settings.verbose) std::fprintf(stderr, "scaling failed\n");
      unscale(tau);
      return finish(SolveStatus::NumericalFailure);
    }
    const VectorX& lambda = w.lambda;

    struct Direction {
      VectorX dx, dy, dz, ds;
      double dtau = 0.0, dkappa = 0.0;
    };
    Direction dir;
    double alpha = 0.0;
    // Near the optimum of degenerate problems the x block can lose its
    // smallest eigenvalues to rounding; retry with heavier regularization,
    // which iterative refinement then corrects.
    for (double delta = KktSolver::kDelta; delta <= 1e-4; delta *= 100.0) {
      kkt.factor(w, delta);
      VectorX rhs1(n + p + m);
      rhs1 << -c, b, h;
      const VectorX sol1 = kkt.solve(rhs1);
      const VectorX x1 = sol1.head(n), y1 = sol1.segment(n, p), z1 = sol1.tail(m);
      const double denom = c.dot(x1) + b.dot(y1) + h.dot(z1) - kappa / tau;

      auto direction = [&](double eta, const VectorX& ds_target, double dkappa_target) {
        const VectorX l_div = jordan_divide(k, lambda, w.lambda_det, ds_target);
        VectorX rhs2(n + p + m);
        rhs2 << eta * rx, -eta * ry, -eta * rz - w.apply(l_div);
        const VectorX sol2 = kkt.solve(rhs2);
        const VectorX x2 = sol2.head(n), y2 = sol2.segment(n, p), z2 = sol2.tail(m);
        Direction d;
        d.dtau = (-eta * rt - dkappa_target / tau - c.dot(x2) - b.dot(y2) - h.dot(z2)) / denom;
        d.dx = x2 + d.dtau * x1;
        d.dy = y2 + d.dtau * y1;
        d.dz = z2 + d.dtau * z1;
        // From G dx + ds - h dtau = -eta rz; equal to W (l_div - W dz) but free of
        // the cancellation in W'W dz near the boundary.
        d.ds = -eta * rz - (m ? VectorX(g * d.dx) : VectorX::Zero(0)) + h * d.dtau;
        d.dkappa = (dkappa_target - kappa * d.dtau) / tau;
        if (max_step(k, s, d.ds) < 1e-8) {
          // Rounding in the primal form can point out of the cone when some s_i
          // is already tiny; the complementarity form stays inside.
          d.ds = w.apply(l_div - w.apply(d.dz));
        }
        return d;
      };
      auto step_length = [&](const Direction& d) {
        double alpha = std::min(max_step(k, s, d.ds), max_step(k, z, d.dz));
        if (d.dtau < 0.0) alpha = std::min(alpha, -tau / d.dtau);
        if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa / d.dkappa);
        return alpha;
      };

      // Predictor.
      const VectorX lambda_sq = jordan_product(k, lambda, lambda);
      const Direction aff = direction(1.0, -lambda_sq, -kappa * tau);
      const double alpha_aff = std::min(1.0, step_length(aff));
      const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 1e-6, 1.0);

      // Corrector.
      const VectorX second = jordan_product(k, w.apply_inverse(aff.ds), w.apply(aff.dz));
      const VectorX target = -lambda_sq - second + sigma * mu * k.identity();
      const double kappa_target = -kappa * tau - aff.dkappa * aff.dtau + sigma * mu;
      dir = direction(1.0 - sigma, target, kappa_target);
      alpha = std::min(1.0, 0.99 * step_length(dir));
      if (alpha > 1e-12 && dir.dx.allFinite()) break;
      if (settings.verbose) std::fprintf(stderr, "step failed at delta %.0e: alpha %.3e\n", delta, alpha);
    }
    if (!(alpha > 1e-12) || !dir.dx.allFinite()) {
      unscale(tau);
      return finish(SolveStatus::NumericalFailure);
    }

    x += alpha * dir.dx;
    y += alpha * dir.dy;
    z += alpha * dir.dz;
    s += alpha * dir.ds;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
  }
}

}  // namespace topp
