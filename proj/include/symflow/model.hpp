#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symflow/indices.hpp"
#include "symflow/spectral_flow.hpp"

namespace symflow {

// D = gamma (d/dx + A) on an interval [0, L] or a circle of circumference C.

struct Geometry {
  enum class Kind { Interval, Circle };
  Kind kind = Kind::Interval;
  double length = 1.0;

  static Geometry interval(double l) { return Geometry{Kind::Interval, l}; }
  static Geometry circle(double c) { return Geometry{Kind::Circle, c}; }
  bool is_interval() const { return kind == Kind::Interval; }
};

// span(psi, gamma psi) for an eigenvector A psi = mu psi, mu > 0.
struct ModeBlock {
  double mu = 0.0;
  Mat basis;  // 2n x 2
};

struct ModelOperator {
  SpacePtr space;
  Mat A;
  Geometry geometry;
  std::vector<ModeBlock> blocks;  // mu ascending
  Mat kernel_frame;               // 2n x 2m orthonormal frame of ker A
  SpacePtr kernel_space;          // ker A with the restricted gamma (null when m = 0)
  SpacePtr adapted;               // H with eigenbases (psi -+ i gamma psi)/sqrt2, then ker A
  SpacePtr boundary;              // H ⊕ H with gamma ⊕ (-gamma)
  SpacePtr adapted_boundary;

  int n() const { return space->n; }
  int block_count() const { return static_cast<int>(blocks.size()); }
  int kernel_half_dim() const { return static_cast<int>(kernel_frame.cols() / 2); }
  double length() const { return geometry.length; }
};

inline ModelOperator build_model(const SpacePtr& space, const Mat& a, Geometry geometry, double tol = default_tol()) {
  const Eigen::Index d = space->dim();
  if (a.rows() != d || a.cols() != d) throw Error(ErrorKind::DimensionMismatch, "A must match the space dimension");
  if (!(geometry.length > 0.0) || !std::isfinite(geometry.length))
    throw Error(ErrorKind::DimensionMismatch, "geometry length must be positive");
  const double scale = std::max(1.0, max_abs(a));
  if (max_abs(a - a.adjoint()) > 1e-9 * scale) throw Error(ErrorKind::NotHermitian, "A is not Hermitian");
  double anti = max_abs(space->gamma * a + a * space->gamma);
  if (anti > std::max(tol, 1e-12) * scale)
    throw Error(ErrorKind::AnticommutationFailure, "gamma A + A gamma has size " + std::to_string(anti));

  Mat herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm);
  const RVec& ev = es.eigenvalues();
  const Mat& vecs = es.eigenvectors();
  for (Eigen::Index i = 0; i < d; ++i)
    if (std::abs(ev(i) + ev(d - 1 - i)) > 1e-7 * scale)
      throw Error(ErrorKind::AsymmetricSpectrum, "spectrum of A is not symmetric about 0");

  const double zero_thr = 10.0 * std::max(tol, 1e-12) * scale;
  ModelOperator op;
  op.space = space;
  op.A = herm;
  op.geometry = geometry;

  // Positive eigenvalues, clustered; each cluster gets a deterministic basis.
  Eigen::Index i = 0;
  std::vector<Eigen::Index> kernel_idx;
  while (i < d) {
    if (std::abs(ev(i)) <= zero_thr) {
      kernel_idx.push_back(i++);
      continue;
    }
    if (ev(i) < 0) {
      ++i;
      continue;
    }
    Eigen::Index j = i;
    while (j + 1 < d && ev(j + 1) - ev(i) < 1e-8 * scale) ++j;
    const Eigen::Index k = j - i + 1;
    Mat v = vecs.middleCols(i, k);
    double mu = ev.segment(i, k).mean();
    Mat basis = canonical_range_basis(v * v.adjoint(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
      ModeBlock b;
      b.mu = mu;
      b.basis.resize(d, 2);
      b.basis.col(0) = basis.col(c);
      b.basis.col(1) = space->gamma * basis.col(c);
      op.blocks.push_back(b);
    }
    i = j + 1;
  }
  const Eigen::Index kdim = static_cast<Eigen::Index>(kernel_idx.size());
  if (kdim % 2 != 0 || 2 * static_cast<Eigen::Index>(op.blocks.size()) + kdim != d)
    throw Error(ErrorKind::AsymmetricSpectrum, "eigenvalues of A do not pair up");
  Mat kv(d, kdim);
  for (Eigen::Index c = 0; c < kdim; ++c) kv.col(c) = vecs.col(kernel_idx[c]);
  op.kernel_frame = kdim ? canonical_range_basis(kv * kv.adjoint(), kdim) : Mat(d, 0);

  const Eigen::Index nb = static_cast<Eigen::Index>(op.blocks.size());
  const Eigen::Index m = kdim / 2;
  Mat plus(d, nb + m), minus(d, nb + m);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Vec& psi = op.blocks[b].basis.col(0);
    const Vec& gpsi = op.blocks[b].basis.col(1);
    plus.col(b) = (psi - I_unit * gpsi) / std::sqrt(2.0);
    minus.col(b) = (psi + I_unit * gpsi) / std::sqrt(2.0);
  }
  if (m > 0) {
    Mat gk = op.kernel_frame.adjoint() * space->gamma * op.kernel_frame;
    gk = 0.5 * (gk - gk.adjoint());
    op.kernel_space = space_from_gamma(gk, 1e-8);
    plus.rightCols(m) = op.kernel_frame * op.kernel_space->basis_plus;
    minus.rightCols(m) = op.kernel_frame * op.kernel_space->basis_minus;
  }
  op.adapted = space_with_bases(space->gamma, plus, minus);
  op.boundary = doubled_space(space);
  op.adapted_boundary = doubled_space(op.adapted);
  return op;
}

// Transfer matrix of one block, exp(L M(lambda)) with M = [[-mu, lambda], [-lambda, mu]]
// in (psi, gamma psi) coordinates, written as e^{log_scale} (c I + s M).
struct BlockTransfer {
  double c = 1.0;
  double s = 0.0;
  double log_scale = 0.0;
};

inline BlockTransfer block_transfer(double mu, double lambda, double len) {
  BlockTransfer t;
  const double k2 = mu * mu - lambda * lambda;
  if (k2 > 0) {
    const double kap = std::sqrt(k2), x = kap * len;
    t.c = 1.0;
    t.s = x < 1e-4 ? len * (1.0 - x * x / 3.0 + 2.0 * x * x * x * x / 15.0) : std::tanh(x) / kap;
    t.log_scale = x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
  } else {
    const double w = std::sqrt(-k2), x = w * len;
    t.c = std::cos(x);
    t.s = x < 1e-4 ? len * (1.0 - x * x / 6.0 + x * x * x * x / 120.0) : std::sin(x) / w;
  }
  return t;
}

inline RMat block_transfer_matrix(double mu, double lambda, double len) {
  BlockTransfer t = block_transfer(mu, lambda, len);
  RMat m(2, 2);
  m << t.c - t.s * mu, t.s * lambda, -t.s * lambda, t.c + t.s * mu;
  return m;  // scaled by e^{-log_scale}
}

// Graph unitary of {(v, exp(len (-A - lambda gamma)) v)} in the adapted boundary bases.
inline Mat graph_phi(const ModelOperator& op, double lambda, double len) {
  const Eigen::Index n = op.n();
  const Eigen::Index nb = op.block_count();
  Mat phi = Mat::Zero(2 * n, 2 * n);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const double mu = op.blocks[b].mu;
    BlockTransfer t = block_transfer(mu, lambda, len);
    const cplx dd = cplx(t.c, lambda * t.s);
    const cplx diag = mu * t.s / dd;
    const cplx off = std::exp(-t.log_scale) / dd;
    phi(b, b) = diag;
    phi(b, n + b) = off;
    phi(n + b, b) = off;
    phi(n + b, n + b) = -diag;
  }
  const cplx rot = std::polar(1.0, -lambda * len);
  for (Eigen::Index r = nb; r < n; ++r) {
    phi(r, n + r) = rot;
    phi(n + r, r) = rot;
  }
  return phi;
}

inline Lagrangian cauchy_data_at(const ModelOperator& op, double len) {
  Mat phi = graph_phi(op, 0.0, len);
  Mat frame = frame_from_phi(*op.adapted_boundary, phi);
  return lagrangian_from_frame(op.boundary, frame, 1e-8);
}

// {(v, e^{-LA} v)} in H ⊕ H.
inline Lagrangian cauchy_data(const ModelOperator& op) {
  if (!op.geometry.is_interval()) throw Error(ErrorKind::DimensionMismatch, "Cauchy data needs an interval");
  return cauchy_data_at(op, op.length());
}

// Exchange the two copies of H in a frame of H ⊕ H.
inline Mat swap_copies(const Mat& frame) {
  const Eigen::Index h = frame.rows() / 2;
  Mat out(frame.rows(), frame.cols());
  out.topRows(h) = frame.bottomRows(h);
  out.bottomRows(h) = frame.topRows(h);
  return out;
}

inline Lagrangian swap_copies(const Lagrangian& l) {
  return lagrangian_from_frame(l.space, swap_copies(l.frame), 1e-8);
}

inline Lagrangian boundary_product(const ModelOperator& op, const Lagrangian& left, const Lagrangian& right) {
  const Eigen::Index d = op.space->dim(), n = op.n();
  Mat f = Mat::Zero(2 * d, 2 * n);
  f.block(0, 0, d, n) = left.frame;
  f.block(d, n, d, n) = right.frame;
  return lagrangian_from_frame(op.boundary, f, 1e-8);
}

// The diagonal {(v, v)}.
inline Lagrangian diagonal(const ModelOperator& op) {
  const Eigen::Index d = op.space->dim();
  Mat f(2 * d, d);
  f.topRows(d) = identity(d);
  f.bottomRows(d) = identity(d);
  return lagrangian_from_frame(op.boundary, f / std::sqrt(2.0));
}

// Eigenvalues of D with boundary values (beta(0), beta(L)) in a Lagrangian K of
// H ⊕ H. lambda is an eigenvalue iff phi(L_lambda) phi(K)^* has eigenvalue 1;
// its eigenphases decrease strictly in lambda, so roots are tracked per step.
class CoupledSpectrum {
 public:
  CoupledSpectrum(const ModelOperator& op, const Lagrangian& k, double len)
      : op_(&op), len_(len), phi_k_(lagrangian_from_frame(op.adapted_boundary, k.frame, 1e-8).phi) {}

  Mat transition(double lambda) const { return graph_phi(*op_, lambda, len_) * phi_k_.adjoint(); }

  std::vector<double> phases(double lambda) const { return eigenphases(transition(lambda)); }

  double length() const { return len_; }
  int half_dim() const { return static_cast<int>(phi_k_.rows()); }

  // Number of eigenvalues in (a, b].
  int count(double a, double b) const {
    int total = 0;
    scan(a, b, [&](double, std::vector<double>&, double, std::vector<double>&, int c) { total += c; });
    return total;
  }

  // Eigenvalues in (a, b], ascending, repeated by multiplicity.
  std::vector<double> eigenvalues(double a, double b) const {
    std::vector<double> out;
    scan(a, b, [&](double u, std::vector<double>& pu, double v, std::vector<double>& pv, int c) {
      locate(u, pu, v, pv, c, 0, out);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static int crossings(const std::vector<double>& pa, const std::vector<double>& pb, int* negative) {
    double worst = 0.0;
    std::vector<double> d = detail::match_displacements(pa, pb, &worst);
    int c = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      int ci = static_cast<int>(std::ceil(pa[i] / (2.0 * pi)) - std::ceil((pa[i] + d[i]) / (2.0 * pi)));
      if (ci < 0 && negative) *negative = 1;
      c += ci;
    }
    return c;
  }

  template <class F>
  void scan(double a, double b, F&& on_step) const {
    if (!(b > a)) return;
    const double h0 = pi / (4.0 * len_);
    const long steps = std::max(1L, static_cast<long>(std::ceil((b - a) / h0)));
    const double h = (b - a) / static_cast<double>(steps);
    double x0 = a;
    std::vector<double> p0 = phases(a);
    for (long s = 1; s <= steps; ++s) {
      double x1 = s == steps ? b : a + h * static_cast<double>(s);
      std::vector<double> p1 = phases(x1);
      step(x0, p0, x1, p1, 0, on_step);
      x0 = x1;
      p0 = std::move(p1);
    }
  }

  template <class F>
  void step(double u, std::vector<double>& pu, double v, std::vector<double>& pv, int depth, F& on_step) const {
    double worst = 0.0;
    std::vector<double> d = detail::match_displacements(pu, pv, &worst);
    // A forward displacement means the matching is unreliable at this step size.
    bool backward = false;
    for (double x : d) backward = backward || x > 1e-9;
    if (worst >= pi / 3.0 || (backward && depth < 30)) {
      if (depth > 40) throw Error(ErrorKind::RefinementExhausted, "eigenphase step unresolved near " + std::to_string(u));
      double m = 0.5 * (u + v);
      std::vector<double> pm = phases(m);
      step(u, pu, m, pm, depth + 1, on_step);
      step(m, pm, v, pv, depth + 1, on_step);
      return;
    }
    int negative = 0;
    int c = crossings(pu, pv, &negative);
    if (negative)
      throw Error(ErrorKind::BracketingFailure,
                  "eigenphase moved against the expected direction on [" + std::to_string(u) + ", " + std::to_string(v) + "]");
    if (c > 0) on_step(u, pu, v, pv, c);
  }

  void locate(double u, std::vector<double>& pu, double v, std::vector<double>& pv, int c, int depth,
              std::vector<double>& out) const {
    const double width_tol = 1e-13 * std::max(1.0, std::max(std::abs(u), std::abs(v)));
    if (c == 1) {
      // Regula falsi (Illinois) on the crossing eigenphase, tracked from u.
      double worst = 0.0;
      std::vector<double> d = detail::match_displacements(pu, pv, &worst);
      std::size_t idx = 0;
      for (std::size_t i = 0; i < d.size(); ++i)
        if (std::ceil(pu[i] / (2.0 * pi)) - std::ceil((pu[i] + d[i]) / (2.0 * pi)) > 0) idx = i;
      const double target = 2.0 * pi * (std::ceil(pu[idx] / (2.0 * pi)) - 1.0);
      auto g = [&](double x) {
        std::vector<double> px = phases(x);
        double w = 0.0;
        std::vector<double> dx = detail::match_displacements(pu, px, &w);
        return pu[idx] + dx[idx] - target;
      };
      double lo = u, hi = v, glo = pu[idx] - target, ghi = pu[idx] + d[idx] - target;
      int side = 0;
      for (int it = 0; it < 100 && hi - lo > width_tol; ++it) {
        double x = (glo - ghi) != 0.0 ? hi - ghi * (hi - lo) / (ghi - glo) : 0.5 * (lo + hi);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        double gx = g(x);
        if (gx > 0) {
          lo = x;
          glo = gx;
          if (side == -1) ghi *= 0.5;
          side = -1;
        } else {
          hi = x;
          ghi = gx;
          if (side == 1) glo *= 0.5;
          side = 1;
        }
        if (gx == 0.0) break;
      }
      out.push_back(std::abs(ghi) <= std::abs(glo) ? hi : lo);
      return;
    }
    if (v - u <= width_tol || depth > 80) {
      for (int q = 0; q < c; ++q) out.push_back(0.5 * (u + v));
      return;
    }
    double m = 0.5 * (u + v);
    std::vector<double> pm = phases(m);
    int c1 = crossings(pu, pm, nullptr);
    int c2 = c - c1;
    if (c1 > 0) locate(u, pu, m, pm, c1, depth + 1, out);
    if (c2 > 0) locate(m, pm, v, pv, c2, depth + 1, out);
  }

  const ModelOperator* op_;
  double len_;
  Mat phi_k_;
};

// Lagrangian of H that splits along the mode blocks: the real line
// cos(a_j) psi_j + sin(a_j) gamma psi_j in block j, plus a Lagrangian of ker A.
inline Lagrangian split_lagrangian(const ModelOperator& op, const std::vector<double>& angles,
                                   const Lagrangian* kernel_part = nullptr) {
  const Eigen::Index nb = op.block_count(), m = op.kernel_half_dim();
  if (static_cast<Eigen::Index>(angles.size()) != nb)
    throw Error(ErrorKind::DimensionMismatch, "one angle per mode block is required");
  if (m > 0 && (!kernel_part || kernel_part->space->dim() != 2 * m))
    throw Error(ErrorKind::DimensionMismatch, "a Lagrangian of ker A is required");
  Mat f(op.space->dim(), nb + m);
  for (Eigen::Index b = 0; b < nb; ++b)
    f.col(b) = std::cos(angles[b]) * op.blocks[b].basis.col(0) + std::sin(angles[b]) * op.blocks[b].basis.col(1);
  if (m > 0) f.rightCols(m) = op.kernel_frame * kernel_part->frame;
  return lagrangian_from_frame(op.space, f, 1e-8);
}

// Kernel of D for boundary condition K: dim(L_X ∩ K).
inline int kernel_dimension(const ModelOperator& op, const Lagrangian& k, double tol = default_tol()) {
  return intersection_dim(cauchy_data(op), k, std::max(tol, 1e-8));
}

inline Lagrangian interval_condition(const ModelOperator& op, const Lagrangian& p, const Lagrangian& q) {
  return boundary_product(op, gamma_image(p), q);
}

namespace detail {

// Real unit vector spanning l ∩ span(basis) in the coordinates of basis.
inline RVec block_line(const Mat& frame, const Mat& basis, const char* what) {
  Mat inter = subspace_intersection(frame, basis, 1e-7);
  if (inter.cols() != 1)
    throw Error(ErrorKind::IncompatibleBoundary,
                std::string(what) + " meets a mode block in dimension " + std::to_string(inter.cols()) + ", expected 1");
  Vec c = basis.adjoint() * inter.col(0);
  Eigen::Index k = 0;
  c.cwiseAbs().maxCoeff(&k);
  c *= std::conj(c(k)) / std::abs(c(k));
  if (c.imag().cwiseAbs().maxCoeff() > 1e-7)
    throw Error(ErrorKind::IncompatibleBoundary, std::string(what) + " is not a real line in a mode block");
  RVec r = c.real();
  return r / r.norm();
}

inline int kernel_meet(const Mat& frame, const Mat& kernel) {
  if (kernel.cols() == 0) return 0;
  return static_cast<int>(subspace_intersection(frame, kernel, 1e-7).cols());
}

inline double block_secular(double mu, double lambda, double len, const RVec& p, const RVec& q_perp) {
  return q_perp.dot(block_transfer_matrix(mu, lambda, len) * p);
}

}  // namespace detail

// Spectrum in [-window, window] for boundary values beta(0) ∈ gamma P and
// beta(L) ∈ Q, with P and Q decomposing along the mode blocks.
inline std::vector<double> interval_spectrum(const ModelOperator& op, const Lagrangian& p, const Lagrangian& q,
                                             double window, double tol = default_tol()) {
  if (!op.geometry.is_interval()) throw Error(ErrorKind::DimensionMismatch, "interval_spectrum needs an interval");
  const double len = op.length();
  const Lagrangian gp = gamma_image(p);
  int covered_p = detail::kernel_meet(gp.frame, op.kernel_frame), covered_q = detail::kernel_meet(q.frame, op.kernel_frame);
  std::vector<RVec> pl, ql;
  for (const ModeBlock& b : op.blocks) {
    pl.push_back(detail::block_line(gp.frame, b.basis, "ker P"));
    ql.push_back(detail::block_line(q.frame, b.basis, "im Q"));
    ++covered_p;
    ++covered_q;
  }
  if (covered_p != op.n() || covered_q != op.n())
    throw Error(ErrorKind::IncompatibleBoundary, "boundary Lagrangians do not split along the mode blocks");

  const Lagrangian k = interval_condition(op, p, q);
  CoupledSpectrum coupled(op, k, len);
  const double lo = -window * (1.0 + 1e-12) - 1e-12;
  const std::vector<double> reference = coupled.eigenvalues(lo, window);

  std::vector<double> roots;
  // Kernel block: lattice from the eigenphases at lambda = 0.
  const Eigen::Index n = op.n(), nb = op.block_count(), m = op.kernel_half_dim();
  if (m > 0) {
    Mat u = coupled.transition(0.0);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index r = nb; r < n; ++r) idx.push_back(r);
    for (Eigen::Index r = nb; r < n; ++r) idx.push_back(n + r);
    Mat uk(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < 2 * m; ++i)
      for (Eigen::Index j = 0; j < 2 * m; ++j) uk(i, j) = u(idx[i], idx[j]);
    for (double psi : eigenphases(uk)) {
      if (psi < 0) psi += 2.0 * pi;
      if (2.0 * pi - psi < 1e-12) psi = 0.0;
      const double step = 2.0 * pi / len;
      long kmin = static_cast<long>(std::ceil((lo - psi / len) / step));
      for (long kk = kmin;; ++kk) {
        double lam = (psi + 2.0 * pi * static_cast<double>(kk)) / len;
        if (lam > window) break;
        if (lam > lo) roots.push_back(lam);
      }
    }
  }
  // Mode blocks: sign changes of <q_perp, T(lambda) p>.
  for (int refine = 0;; ++refine) {
    std::vector<double> block_roots;
    const double h = pi / (4.0 * len) / std::pow(4.0, refine);
    for (std::size_t b = 0; b < op.blocks.size(); ++b) {
      const double mu = op.blocks[b].mu;
      RVec qp(2);
      qp << -ql[b](1), ql[b](0);
      auto f = [&](double x) { return detail::block_secular(mu, x, len, pl[b], qp); };
      const long steps = std::max(2L, static_cast<long>(std::ceil((window - lo) / h)));
      double x0 = lo, f0 = f(lo);
      for (long s = 1; s <= steps; ++s) {
        double x1 = s == steps ? window : lo + (window - lo) * static_cast<double>(s) / static_cast<double>(steps);
        double f1 = f(x1);
        if (f1 == 0.0) {
          block_roots.push_back(x1);
        } else if (f0 != 0.0 && (f0 < 0) != (f1 < 0)) {
          double a = x0, bb = x1, fa = f0;
          for (int it = 0; it < 200 && bb - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
            double mid = 0.5 * (a + bb);
            double fm = f(mid);
            if (fm == 0.0) {
              a = bb = mid;
              break;
            }
            if ((fm < 0) == (fa < 0)) {
              a = mid;
              fa = fm;
            } else {
              bb = mid;
            }
          }
          block_roots.push_back(0.5 * (a + bb));
        }
        x0 = x1;
        f0 = f1;
      }
    }
    std::vector<double> all = roots;
    all.insert(all.end(), block_roots.begin(), block_roots.end());
    std::sort(all.begin(), all.end());
    if (all.size() == reference.size()) {
      for (std::size_t i = 0; i < all.size(); ++i)
        if (std::abs(all[i] - reference[i]) > 1e-6 * std::max(1.0, std::abs(all[i])))
          throw Error(ErrorKind::BracketingFailure,
                      "root " + std::to_string(all[i]) + " disagrees with the eigenphase count near " +
                          std::to_string(reference[i]));
      return all;
    }
    if (refine >= 3) {
      std::size_t i = 0;
      while (i < all.size() && i < reference.size() && std::abs(all[i] - reference[i]) < 1e-6) ++i;
      double where = i < reference.size() ? reference[i] : (i < all.size() ? all[i] : window);
      throw Error(ErrorKind::BracketingFailure, "sign bracketing found " + std::to_string(all.size()) + " roots, count gives " +
                                                    std::to_string(reference.size()) + "; first mismatch near " +
                                                    std::to_string(where) + " in [" + std::to_string(where - h) + ", " +
                                                    std::to_string(where + h) + "]");
    }
  }
}

// Spectrum for boundary values in an arbitrary Lagrangian K of H ⊕ H.
inline std::vector<double> coupled_spectrum(const ModelOperator& op, const Lagrangian& k, double window) {
  CoupledSpectrum cs(op, k, op.length());
  return cs.eigenvalues(-window * (1.0 + 1e-12) - 1e-12, window);
}

inline std::vector<double> circle_spectrum(const ModelOperator& op, double window) {
  if (op.geometry.is_interval()) throw Error(ErrorKind::DimensionMismatch, "circle_spectrum needs a circle");
  const double c = op.length();
  const double xi = 2.0 * pi / c;
  std::vector<double> out;
  const long kmax = static_cast<long>(std::floor(window / xi)) + 1;
  for (const ModeBlock& b : op.blocks)
    for (long k = -kmax; k <= kmax; ++k) {
      double lam = std::sqrt(std::pow(xi * static_cast<double>(k), 2) + b.mu * b.mu);
      if (lam <= window) {
        out.push_back(lam);
        out.push_back(-lam);
      }
    }
  const int mult = 2 * op.kernel_half_dim();
  for (long k = -kmax; k <= kmax; ++k) {
    double lam = xi * static_cast<double>(k);
    if (std::abs(lam) <= window)
      for (int q = 0; q < mult; ++q) out.push_back(lam);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The same operator on the interval [0, C] with the periodic condition.
inline std::vector<double> circle_spectrum_by_transmission(const ModelOperator& op, double window) {
  ModelOperator cut = op;
  cut.geometry = Geometry::interval(op.length());
  return coupled_spectrum(cut, diagonal(cut), window);
}

inline double circle_eta_tilde(const ModelOperator& op) { return 0.5 * op.kernel_frame.cols(); }

// ---- eta ----

enum class EtaMode { SymmetricSum, ZeroModeClosedForm };

struct EtaEstimate {
  double eta = 0.0;
  double bound = 0.0;
  int dim_ker = 0;
  double eta_tilde = 0.0;
  double cutoff = 0.0;
  std::size_t eigenvalues = 0;
  EtaMode mode = EtaMode::SymmetricSum;
};

// Eigenvalue source for the truncated eta: asymptotically a union of lattices
// of common period 2 pi / length.
struct SpectrumSource {
  double length = 1.0;
  int branches = 1;
  std::function<std::vector<double>(double, double)> eigenvalues;  // in (a, b]
  std::vector<double> lattice_phases;                               // for pure lattices
};

namespace detail {

// Smoothed count: weight 1 on |lambda| <= r, linear ramp to 0 at r + p.
inline double smoothed_signature(const std::vector<double>& ev, double r, double p, double zero_tol) {
  std::vector<double> pos, neg;
  for (double l : ev) {
    if (std::abs(l) <= zero_tol) continue;
    double w = std::abs(l) <= r ? 1.0 : std::max(0.0, (r + p - std::abs(l)) / p);
    if (w == 0.0) continue;
    (l > 0 ? pos : neg).push_back(w);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  double sp = 0.0, sn = 0.0;
  for (double w : pos) sp += w;
  for (double w : neg) sn += w;
  return sp - sn;
}

}  // namespace detail

inline EtaEstimate eta_truncated(const SpectrumSource& src, long n_max, EtaMode mode, double eta_tol = 5e-3,
                                 double zero_tol = 1e-9) {
  EtaEstimate e;
  e.mode = mode;
  if (mode == EtaMode::ZeroModeClosedForm) {
    if (src.lattice_phases.empty()) throw Error(ErrorKind::DimensionMismatch, "closed form needs lattice phases");
    // Lattice {(psi + 2 pi k) / L}: eta = 1 - psi / pi for psi in (0, 2 pi), 0 at psi = 0.
    for (double psi : src.lattice_phases) {
      if (psi < 1e-12 || 2.0 * pi - psi < 1e-12) {
        ++e.dim_ker;
        continue;
      }
      e.eta += 1.0 - psi / pi;
    }
    e.eta_tilde = 0.5 * (e.eta + e.dim_ker);
    return e;
  }
  const double p = 2.0 * pi / src.length;
  const double r = static_cast<double>(n_max) * pi / (static_cast<double>(src.branches) * src.length);
  e.cutoff = r;
  std::vector<double> ev = src.eigenvalues(-(r + p) - 1e-9, r + p);
  e.eigenvalues = ev.size();
  for (double l : ev)
    if (std::abs(l) <= zero_tol) ++e.dim_ker;
  double full = detail::smoothed_signature(ev, r, p, zero_tol);
  double half = detail::smoothed_signature(ev, 0.5 * r, p, zero_tol);
  e.eta = 2.0 * full - half;
  e.bound = std::abs(full - half);
  e.eta_tilde = 0.5 * (e.eta + e.dim_ker);
  if (e.bound > eta_tol)
    throw Error(ErrorKind::ConvergenceTooSlow,
                "truncation bound " + std::to_string(e.bound) + " exceeds " + std::to_string(eta_tol) + " at N_max = " +
                    std::to_string(n_max));
  return e;
}

inline bool is_zero_mode(const ModelOperator& op) { return op.blocks.empty(); }

// Eigenphases in [0, 2 pi) of phi(L_X) phi(K)^* on the interval.
inline std::vector<double> lattice_phases(const ModelOperator& op, const Lagrangian& k) {
  CoupledSpectrum cs(op, k, op.length());
  std::vector<double> out;
  for (double psi : cs.phases(0.0)) {
    if (psi < 0) psi += 2.0 * pi;
    if (2.0 * pi - psi < 1e-12) psi = 0.0;
    out.push_back(psi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline SpectrumSource spectrum_source(const ModelOperator& op, const Lagrangian& k) {
  SpectrumSource s;
  s.length = op.length();
  s.branches = op.n() * 2;
  auto cs = std::make_shared<CoupledSpectrum>(op, k, op.length());
  s.eigenvalues = [cs](double a, double b) { return cs->eigenvalues(a, b); };
  if (is_zero_mode(op)) s.lattice_phases = lattice_phases(op, k);
  return s;
}

// eta~ of the interval operator with boundary values in K.
inline EtaEstimate interval_eta(const ModelOperator& op, const Lagrangian& k, long n_max, double eta_tol = 5e-3) {
  SpectrumSource s = spectrum_source(op, k);
  return eta_truncated(s, n_max, is_zero_mode(op) ? EtaMode::ZeroModeClosedForm : EtaMode::SymmetricSum, eta_tol);
}

// ---- the doubled boundary ----

// Projection onto the orthogonal complement of the diagonal of H ⊕ H.
inline Mat transmission_projection(Eigen::Index d) {
  Mat p(2 * d, 2 * d);
  p << identity(d), -identity(d), -identity(d), identity(d);
  return 0.5 * p;
}

inline Mat p_theta(const LagrangianProjection& p, double theta) {
  const Eigen::Index d = p.matrix.rows();
  const double c = std::cos(theta), s = std::sin(theta);
  const Mat id = identity(d);
  Mat out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = c * c * p.matrix + s * s * (id - p.matrix);
  out.topRightCorner(d, d) = -c * s * id;
  out.bottomLeftCorner(d, d) = -c * s * id;
  out.bottomRightCorner(d, d) = c * c * (id - p.matrix) + s * s * p.matrix;
  return out;
}

// cos(theta) P x+ = sin(theta) P x-  and  sin(theta) (I-P) x+ = cos(theta) (I-P) x-.
inline bool in_p_theta_kernel(const LagrangianProjection& p, double theta, const Vec& xi, double tol = 1e-9) {
  const Eigen::Index d = p.matrix.rows();
  const Vec xp = xi.head(d), xm = xi.tail(d);
  const Mat q = identity(d) - p.matrix;
  const double c = std::cos(theta), s = std::sin(theta);
  double scale = std::max(1.0, xi.norm());
  return (c * (p.matrix * xp) - s * (p.matrix * xm)).norm() < tol * scale &&
         (s * (q * xp) - c * (q * xm)).norm() < tol * scale;
}

inline Mat kernel_frame_of_projection(const Mat& proj) {
  Mat h = 0.5 * (proj + proj.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    if (es.eigenvalues()(i) < 0.5) idx.push_back(i);
  Mat out(h.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(i) = es.eigenvectors().col(idx[i]);
  return out;
}

// ---- gluing of two intervals into a circle ----

// Cauchy data of M+ = [0, L+] and of M- = [L+, L+ + L-], both recorded as
// (value at x = 0 ≡ C, value at x = L+).
struct CutData {
  Lagrangian plus;
  Lagrangian minus;
};

inline void require_same_operator(const ModelOperator& a, const ModelOperator& b) {
  if (a.space->dim() != b.space->dim() || max_abs(a.A - b.A) > 1e-12 || max_abs(a.space->gamma - b.space->gamma) > 1e-12)
    throw Error(ErrorKind::DimensionMismatch, "the two halves must carry the same gamma and A");
}

inline CutData cut_data(const ModelOperator& plus, const ModelOperator& minus) {
  require_same_operator(plus, minus);
  CutData c{cauchy_data(plus), swap_copies(transport(cauchy_data(minus), plus.boundary))};
  return c;
}

struct CaldconstRecord {
  std::vector<double> thetas;
  std::vector<int> dims;
  int expected = 0;
};

inline CaldconstRecord caldconst_check(const ModelOperator& plus, const ModelOperator& minus, int samples = 9) {
  CutData cd = cut_data(plus, minus);
  const Eigen::Index d = cd.plus.frame.rows();
  LagrangianProjection pp = projection_of(cd.plus);
  Mat cut = Mat::Zero(2 * d, cd.plus.frame.cols() + cd.minus.frame.cols());
  cut.topLeftCorner(d, cd.plus.frame.cols()) = cd.plus.frame;
  cut.bottomRightCorner(d, cd.minus.frame.cols()) = cd.minus.frame;
  CaldconstRecord r;
  r.expected = intersection_dim(cd.plus, cd.minus, 1e-8);
  for (int s = 0; s < samples; ++s) {
    double theta = (pi / 4.0) * s / std::max(1, samples - 1);
    Mat ker = kernel_frame_of_projection(p_theta(pp, theta));
    int dim = static_cast<int>(subspace_intersection(ker, cut, 1e-7).cols());
    r.thetas.push_back(theta);
    r.dims.push_back(dim);
    if (dim != r.expected)
      throw Error(ErrorKind::IdentityViolation, "kernel dimension " + std::to_string(dim) + " at theta = " +
                                                    std::to_string(theta) + ", expected " + std::to_string(r.expected));
  }
  return r;
}

struct GlueRecord {
  double eta_tilde_closed = 0.0;
  EtaEstimate plus;
  EtaEstimate minus;
  int tau = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double discrepancy = 0.0;
  double bound = 0.0;
  double mod_z_residue = 0.0;
};

// eta~(circle) = eta~(M+, ker P) + eta~(M-, im P) - tau_mu(gamma L-, P, L+),
// with P a Lagrangian of H ⊕ H.
inline GlueRecord glue_verify(const ModelOperator& plus, const ModelOperator& minus, const Lagrangian& p,
                              long n_max = 10000, double eta_tol = 5e-3) {
  CutData cd = cut_data(plus, minus);
  const Lagrangian pb = transport(p, plus.boundary);
  GlueRecord r;
  r.eta_tilde_closed = circle_eta_tilde(plus);
  r.plus = interval_eta(plus, gamma_image(pb), n_max, eta_tol);
  const Lagrangian k_minus = swap_copies(transport(pb, minus.boundary));
  r.minus = interval_eta(minus, k_minus, n_max, eta_tol);
  r.tau = tau_mu(gamma_image(cd.minus), pb, cd.plus);
  r.lhs = r.eta_tilde_closed;
  r.rhs = r.plus.eta_tilde + r.minus.eta_tilde - r.tau;
  r.discrepancy = r.lhs - r.rhs;
  r.bound = 0.5 * (r.plus.bound + r.minus.bound) + 1e-9;
  double frac = r.lhs - r.plus.eta_tilde - r.minus.eta_tilde;
  r.mod_z_residue = std::abs(frac - std::round(frac));
  if (std::abs(r.discrepancy) > r.bound)
    throw Error(ErrorKind::GluingViolation,
                "gluing discrepancy " + std::to_string(r.discrepancy) + " exceeds bound " + std::to_string(r.bound));
  return r;
}

// ---- boundary-condition families on an interval ----

struct BoundaryFamily {
  std::function<Lagrangian(double)> left;   // P(t): beta(0) ∈ gamma P(t)
  std::function<Lagrangian(double)> right;  // Q(t): beta(L) ∈ Q(t)
  double t0 = 0.0;
  double t1 = 1.0;
  int samples = 64;
};

struct NicolaescuRecord {
  int spectral_flow = 0;
  int maslov = 0;
  double window_edge = 0.0;
  std::size_t samples = 0;
};

namespace detail {

struct StepMatch {
  int shift = 0;
  double cost = 1e300;
  double runner_up = 1e300;  // cost of the best competing shift
};

// Index shift s matching a_i to b_{i+s} for the eigenvalues of a in (-edge, edge).
inline StepMatch match_step(const std::vector<double>& a, const std::vector<double>& b, double edge) {
  StepMatch m;
  std::vector<std::size_t> near;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) < edge) near.push_back(i);
  if (near.empty()) {
    m.cost = 0.0;
    return m;
  }
  const long span = static_cast<long>(near.size()) + 4;
  for (long s = -span; s <= span; ++s) {
    double cost = 0.0;
    for (std::size_t i : near) {
      long j = static_cast<long>(i) + s;
      if (j < 0 || j >= static_cast<long>(b.size())) {
        cost = 1e300;
        break;
      }
      cost = std::max(cost, std::abs(b[j] - a[i]));
    }
    if (cost < m.cost) {
      m.runner_up = m.cost;
      m.cost = cost;
      m.shift = static_cast<int>(s);
    } else {
      m.runner_up = std::min(m.runner_up, cost);
    }
  }
  return m;
}

inline int count_negative(const std::vector<double>& v, double zero_tol) {
  int c = 0;
  for (double x : v)
    if (x < -zero_tol) ++c;
  return c;
}

}  // namespace detail

// SF of t -> D_{P(t), Q(t)} tracked by matching eigenvalues near zero between
// samples, against Mas(P(t) ⊕ gamma Q(t), L_X).
inline NicolaescuRecord nicolaescu_verify(const ModelOperator& op, const BoundaryFamily& fam, double window = 12.0) {
  const Lagrangian lx = cauchy_data(op);
  const double zero_tol = 1e-9;
  NicolaescuRecord r;
  r.window_edge = 0.5 * window;
  // Split conditions go through the block-wise solver, anything else through the coupled one.
  auto spec_at = [&](double t) {
    const Lagrangian p = fam.left(t), q = fam.right(t);
    try {
      return interval_spectrum(op, p, q, window);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IncompatibleBoundary) throw;
      return coupled_spectrum(op, interval_condition(op, p, q), window);
    }
  };
  std::vector<double> ts;
  std::vector<std::vector<double>> specs;
  for (int s = 0; s <= fam.samples; ++s) {
    double t = fam.t0 + (fam.t1 - fam.t0) * s / fam.samples;
    ts.push_back(t);
    specs.push_back(spec_at(t));
  }
  std::size_t j = 0;
  int refinements = 0;
  while (j + 1 < ts.size()) {
    detail::StepMatch m = detail::match_step(specs[j], specs[j + 1], r.window_edge);
    if (m.cost >= 0.25 * m.runner_up || m.cost >= 0.25 * r.window_edge) {
      if (ts[j + 1] - ts[j] < 1e-10 || ++refinements > 4000)
        throw Error(ErrorKind::WindowEscape,
                    "eigenvalues near zero cannot be matched across t = " + std::to_string(ts[j]));
      double tm = 0.5 * (ts[j] + ts[j + 1]);
      ts.insert(ts.begin() + static_cast<long>(j) + 1, tm);
      specs.insert(specs.begin() + static_cast<long>(j) + 1, spec_at(tm));
      continue;
    }
    r.spectral_flow += detail::count_negative(specs[j], zero_tol) + m.shift - detail::count_negative(specs[j + 1], zero_tol);
    ++j;
  }
  r.samples = ts.size();

  auto f = [&](double t) { return boundary_product(op, fam.left(t), gamma_image(fam.right(t))); };
  auto g = [lx](double) { return lx; };
  r.maslov = maslov(LagrangianPairPath::from_generators(op.boundary, f, g, fam.t0, fam.t1, 32)).value;
  if (r.maslov != r.spectral_flow)
    throw Error(ErrorKind::IdentityViolation,
                "SF = " + std::to_string(r.spectral_flow) + " but Mas = " + std::to_string(r.maslov));
  return r;
}

// ---- eta~ differences against the boundary unitary ----

struct ModZRecord {
  double eta_difference = 0.0;
  double trace_log = 0.0;  // (1/2 pi i) tr log(Phi(P) Phi(Q)^*)
  double residue = 0.0;    // distance of the difference to an integer
  double exact_residue = 0.0;  // eta~(P) - (1/2 pi i) tr log(Phi(P) Phi(P_X)^*)
  double bound = 0.0;
};

// D_P: boundary values in ker P = gamma P, for P a Lagrangian of H ⊕ H.
inline ModZRecord sw_modz_check(const ModelOperator& op, const Lagrangian& p, const Lagrangian& q, long n_max = 10000,
                                double eta_tol = 5e-3) {
  const Lagrangian pb = transport(p, op.boundary), qb = transport(q, op.boundary);
  const Lagrangian lx = cauchy_data(op);
  EtaEstimate ep = interval_eta(op, gamma_image(pb), n_max, eta_tol);
  EtaEstimate eq = interval_eta(op, gamma_image(qb), n_max, eta_tol);
  ModZRecord r;
  r.eta_difference = ep.eta_tilde - eq.eta_tilde;
  r.trace_log = (tr_log(transition(pb, qb)) / (2.0 * pi * I_unit)).real();
  double diff = r.eta_difference - r.trace_log;
  r.residue = std::abs(diff - std::round(diff));
  r.exact_residue = std::abs(ep.eta_tilde - (tr_log(transition(pb, lx)) / (2.0 * pi * I_unit)).real());
  r.bound = ep.bound + eq.bound;
  const double allowed = is_zero_mode(op) ? 1e-9 : r.bound + 1e-9;
  if (r.residue > allowed || (is_zero_mode(op) && r.exact_residue > 1e-9))
    throw Error(ErrorKind::IdentityViolation, "eta~ difference and boundary trace log disagree by " +
                                                  std::to_string(std::max(r.residue, r.exact_residue)));
  return r;
}

// ---- adiabatic limit ----

// Eigen-decomposition of a Hermitian A into eigenvalue clusters.
struct EigenClusters {
  std::vector<double> values;
  std::vector<Mat> frames;
};

inline EigenClusters eigen_clusters(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  const double scale = std::max(1.0, max_abs(a));
  EigenClusters c;
  const Eigen::Index d = a.rows();
  Eigen::Index i = 0;
  while (i < d) {
    Eigen::Index j = i;
    while (j + 1 < d && es.eigenvalues()(j + 1) - es.eigenvalues()(i) < 1e-8 * scale) ++j;
    double v = es.eigenvalues().segment(i, j - i + 1).mean();
    if (std::abs(v) < 1e-10 * scale) v = 0.0;
    c.values.push_back(v);
    c.frames.push_back(es.eigenvectors().middleCols(i, j - i + 1));
    i = j + 1;
  }
  return c;
}

inline Mat hcat(const std::vector<Mat>& parts, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const Mat& m : parts) cols += m.cols();
  Mat out(rows, cols);
  Eigen::Index c = 0;
  for (const Mat& m : parts) {
    out.middleCols(c, m.cols()) = m;
    c += m.cols();
  }
  return out;
}

struct AdiabaticLimit {
  Lagrangian limit;
  Reduction reduced;
  std::vector<double> levels;  // eigenvalues of A in [-nu, nu]
  std::vector<Mat> pieces;     // the filtered projections, one per level
};

// lim_{r -> inf} e^{rA} L = F+_nu ⊕ (⊕_i L_{mu_i}).
inline AdiabaticLimit adiabatic_limit(const Lagrangian& l, const Mat& a, double nu, double tol = default_tol()) {
  const SymplecticSpace& s = *l.space;
  const Eigen::Index d = s.dim();
  EigenClusters ec = eigen_clusters(a);
  const double thr = 1e-9 * std::max(1.0, max_abs(a));
  std::vector<Mat> fplus, fminus, mid;
  std::vector<double> mid_vals;
  for (std::size_t i = 0; i < ec.values.size(); ++i) {
    if (ec.values[i] > nu + thr)
      fplus.push_back(ec.frames[i]);
    else if (ec.values[i] < -nu - thr)
      fminus.push_back(ec.frames[i]);
    else {
      mid.push_back(ec.frames[i]);
      mid_vals.push_back(ec.values[i]);
    }
  }
  Mat fp = hcat(fplus, d), fm = hcat(fminus, d);
  if (fm.cols() > 0 && subspace_intersection(l.frame, fm, 1e-7).cols() > 0)
    throw Error(ErrorKind::ResonanceViolation, "L meets F-_nu; raise nu to the non-resonance level");

  AdiabaticLimit out;
  Mat u = hcat({fm, hcat(mid, d)}, d);
  out.reduced = symplectic_reduce(l, u, tol);
  out.levels = mid_vals;
  Mat r_amb = out.reduced.ambient_frame();
  std::vector<Mat> parts{fp};
  Mat lower(d, 0);
  for (std::size_t i = 0; i < mid.size(); ++i) {
    lower = hcat({lower, mid[i]}, d);
    Mat inter = subspace_intersection(r_amb, lower, 1e-7);
    Mat piece = orthonormal_basis(mid[i] * (mid[i].adjoint() * inter), 1e-7);
    out.pieces.push_back(piece);
    parts.push_back(piece);
  }
  out.limit = lagrangian_from_frame(l.space, hcat(parts, d), 1e-7);
  return out;
}

// A ⊕ (-A) on H ⊕ H.
inline Mat boundary_generator(const ModelOperator& op) {
  const Eigen::Index d = op.space->dim();
  Mat a = Mat::Zero(2 * d, 2 * d);
  a.topLeftCorner(d, d) = op.A;
  a.bottomRightCorner(d, d) = -op.A;
  return a;
}

inline AdiabaticLimit adiabatic_limit(const ModelOperator& op, const Lagrangian& lx, double nu, double tol = default_tol()) {
  return adiabatic_limit(transport(lx, op.boundary), boundary_generator(op), nu, tol);
}

// e^{rA} L computed from a column echelon form ordered by decreasing eigenvalue,
// so that no column is swamped by the fastest-growing direction.
inline Lagrangian stretch(const Lagrangian& l, const Mat& a, double r) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  const Eigen::Index d = a.rows();
  const RVec& ev = es.eigenvalues();
  const Mat& v = es.eigenvectors();
  Mat coords = v.adjoint() * l.frame;  // rows ordered by ascending eigenvalue
  Eigen::Index k = coords.cols();
  std::vector<Eigen::Index> pivot_row(k, -1);
  std::vector<bool> used(k, false);
  for (Eigen::Index row = d - 1; row >= 0; --row) {
    Eigen::Index best = -1;
    double best_val = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (used[c]) continue;
      double val = std::abs(coords(row, c)) / std::max(1e-300, coords.col(c).norm());
      if (val > best_val) {
        best_val = val;
        best = c;
      }
    }
    if (best < 0 || best_val < 1e-10) continue;
    used[best] = true;
    pivot_row[best] = row;
    coords.col(best) /= coords(row, best);
    for (Eigen::Index c = 0; c < k; ++c)
      if (c != best && !used[c]) coords.col(c) -= coords(row, c) * coords.col(best);
  }
  Mat out(d, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    double lead = pivot_row[c] >= 0 ? ev(pivot_row[c]) : 0.0;
    Vec col = coords.col(c);
    for (Eigen::Index row = 0; row < d; ++row) col(row) *= std::exp(r * (ev(row) - lead));
    out.col(c) = v * col;
  }
  return lagrangian_from_frame(l.space, out, 1e-7);
}

// Cauchy data of the interval with a collar of length r attached at each end.
inline Lagrangian stretched_cauchy_data(const ModelOperator& op, double r) { return cauchy_data_at(op, op.length() + 2.0 * r); }

}  // namespace symflow
