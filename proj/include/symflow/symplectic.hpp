#pragma once

#include <memory>
#include <string>

#include "symflow/linalg.hpp"

namespace symflow {

// C^{2n} with a skew-adjoint gamma, gamma^2 = -I, and fixed orthonormal bases
// of the +i and -i eigenspaces.
struct SymplecticSpace {
  int n = 0;
  Mat gamma;
  Mat basis_plus;
  Mat basis_minus;

  Eigen::Index dim() const { return 2 * n; }
};

using SpacePtr = std::shared_ptr<const SymplecticSpace>;

inline SpacePtr space_with_bases(const Mat& gamma, const Mat& plus, const Mat& minus) {
  auto s = std::make_shared<SymplecticSpace>();
  s->n = static_cast<int>(plus.cols());
  s->gamma = gamma;
  s->basis_plus = plus;
  s->basis_minus = minus;
  return s;
}

inline SpacePtr space_from_gamma(const Mat& gamma, double tol = default_tol()) {
  const Eigen::Index m = gamma.rows();
  if (m != gamma.cols() || m % 2 != 0)
    throw Error(ErrorKind::InvalidGamma, "gamma must be square of even size");
  const double scale = std::max(1.0, max_abs(gamma));
  if (max_abs(gamma + gamma.adjoint()) > tol * scale)
    throw Error(ErrorKind::InvalidGamma, "gamma is not skew-adjoint");
  if (max_abs(gamma * gamma + identity(m)) > tol * scale * scale)
    throw Error(ErrorKind::InvalidGamma, "gamma^2 != -I");
  // -i gamma is Hermitian with eigenvalues +1 on E_i and -1 on E_{-i}.
  Mat h = -I_unit * gamma;
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  Eigen::Index plus = 0;
  for (Eigen::Index k = 0; k < m; ++k)
    if (es.eigenvalues()(k) > 0) ++plus;
  if (2 * plus != m)
    throw Error(ErrorKind::UnbalancedEigenspaces,
                "dim ker(gamma - i) = " + std::to_string(plus) +
                    ", dim ker(gamma + i) = " + std::to_string(m - plus));
  Mat p_plus = 0.5 * (identity(m) + h);
  Mat p_minus = 0.5 * (identity(m) - h);
  return space_with_bases(gamma, canonical_range_basis(p_plus, plus),
                          canonical_range_basis(p_minus, m - plus));
}

inline Mat standard_gamma(int n) {
  Mat g = Mat::Zero(2 * n, 2 * n);
  g.block(0, n, n, n) = -identity(n);
  g.block(n, 0, n, n) = identity(n);
  return g;
}

inline SpacePtr standard_space(int n) {
  if (n < 1) throw Error(ErrorKind::DimensionMismatch, "standard space needs n >= 1");
  return space_from_gamma(standard_gamma(n));
}

// The same space described with gamma replaced by -gamma.
inline SpacePtr opposite_space(const SpacePtr& s) {
  return space_with_bases(-s->gamma, s->basis_minus, s->basis_plus);
}

// The same gamma with the eigenbases changed by unitaries wp, wm.
inline SpacePtr rebased_space(const SpacePtr& s, const Mat& wp, const Mat& wm) {
  return space_with_bases(s->gamma, s->basis_plus * wp, s->basis_minus * wm);
}

// H ⊕ H with gamma ⊕ (-gamma); the eigenbases are inherited from H.
inline SpacePtr doubled_space(const SpacePtr& h) {
  const Eigen::Index d = h->dim(), n = h->n;
  Mat g = Mat::Zero(2 * d, 2 * d);
  g.topLeftCorner(d, d) = h->gamma;
  g.bottomRightCorner(d, d) = -h->gamma;
  Mat plus = Mat::Zero(2 * d, 2 * n), minus = Mat::Zero(2 * d, 2 * n);
  plus.block(0, 0, d, n) = h->basis_plus;
  plus.block(d, n, d, n) = h->basis_minus;
  minus.block(0, 0, d, n) = h->basis_minus;
  minus.block(d, n, d, n) = h->basis_plus;
  return space_with_bases(g, plus, minus);
}

// Direct sum of two spaces, bases concatenated blockwise.
inline SpacePtr direct_sum_space(const SpacePtr& a, const SpacePtr& b) {
  const Eigen::Index da = a->dim(), db = b->dim();
  Mat g = Mat::Zero(da + db, da + db);
  g.topLeftCorner(da, da) = a->gamma;
  g.bottomRightCorner(db, db) = b->gamma;
  auto blk = [&](const Mat& x, const Mat& y) {
    Mat m = Mat::Zero(da + db, x.cols() + y.cols());
    m.block(0, 0, da, x.cols()) = x;
    m.block(da, x.cols(), db, y.cols()) = y;
    return m;
  };
  return space_with_bases(g, blk(a->basis_plus, b->basis_plus), blk(a->basis_minus, b->basis_minus));
}

struct Lagrangian {
  SpacePtr space;
  Mat frame;  // 2n x n, orthonormal columns
  Mat phi;    // n x n unitary, graph map E_i -> E_{-i} in the space's bases
};

struct LagrangianProjection {
  Mat matrix;
};

inline Mat frame_from_phi(const SymplecticSpace& s, const Mat& phi) {
  return (s.basis_plus + s.basis_minus * phi) / std::sqrt(2.0);
}

inline Lagrangian lagrangian_from_phi(const SpacePtr& s, const Mat& phi, double tol = default_tol()) {
  if (phi.rows() != s->n || phi.cols() != s->n)
    throw Error(ErrorKind::DimensionMismatch, "phi must be n x n");
  require_unitary(phi, tol, "phi");
  return Lagrangian{s, frame_from_phi(*s, phi), phi};
}

inline Lagrangian lagrangian_from_frame(const SpacePtr& s, const Mat& frame, double tol = default_tol()) {
  if (frame.rows() != s->dim())
    throw Error(ErrorKind::DimensionMismatch, "frame has " + std::to_string(frame.rows()) +
                                                  " rows, space has dimension " + std::to_string(s->dim()));
  Mat q = orthonormal_basis(frame, tol);
  if (q.cols() != s->n)
    throw Error(ErrorKind::NotLagrangian, "subspace has dimension " + std::to_string(q.cols()) +
                                              ", expected " + std::to_string(s->n));
  double iso = max_abs(q.adjoint() * s->gamma * q);
  if (iso > std::max(tol, 1e-9) * 10.0)
    throw Error(ErrorKind::NotLagrangian, "gamma L is not orthogonal to L (defect " + std::to_string(iso) + ")");
  Mat a = s->basis_plus.adjoint() * q;
  Mat b = s->basis_minus.adjoint() * q;
  // phi a = b
  Mat phi = a.transpose().fullPivLu().solve(b.transpose()).transpose();
  phi = nearest_unitary(phi);
  return Lagrangian{s, frame_from_phi(*s, phi), phi};
}

// Rebuild L inside another description of the same ambient space.
inline Lagrangian transport(const Lagrangian& l, const SpacePtr& s, double tol = default_tol()) {
  return lagrangian_from_frame(s, l.frame, tol);
}

inline Lagrangian gamma_image(const Lagrangian& l) {
  return Lagrangian{l.space, frame_from_phi(*l.space, -l.phi), -l.phi};
}

inline LagrangianProjection projection_of(const Lagrangian& l) {
  return LagrangianProjection{l.frame * l.frame.adjoint()};
}

inline Lagrangian direct_sum(const Lagrangian& a, const Lagrangian& b, const SpacePtr& sum) {
  Mat f = Mat::Zero(a.frame.rows() + b.frame.rows(), a.frame.cols() + b.frame.cols());
  f.topLeftCorner(a.frame.rows(), a.frame.cols()) = a.frame;
  f.bottomRightCorner(b.frame.rows(), b.frame.cols()) = b.frame;
  return lagrangian_from_frame(sum, f);
}

// Image of L under a linear automorphism h of the ambient space.
inline Lagrangian apply_map(const Mat& h, const Lagrangian& l, double tol = default_tol()) {
  return lagrangian_from_frame(l.space, h * l.frame, tol);
}

// Eigenphases of phi(L1) phi(L2)^*; the +1 eigenspace is L1 ∩ L2.
inline std::vector<double> relative_phases(const Lagrangian& l1, const Lagrangian& l2) {
  return eigenphases(l1.phi * l2.phi.adjoint());
}

struct PhaseClassification {
  int at_one = 0;  // eigenphases within tol of 0
  std::vector<double> others;
};

// The single classification pass shared by intersection_dim and m_H.
inline PhaseClassification classify_phases(const std::vector<double>& phases, double tol) {
  PhaseClassification c;
  for (double p : phases) {
    double a = std::abs(p);
    if (a > tol / 4.0 && a < 4.0 * tol)
      throw Error(ErrorKind::ToleranceAmbiguity,
                  "eigenphase " + std::to_string(p) + " is within the decision band around tol");
    if (a <= tol)
      ++c.at_one;
    else
      c.others.push_back(p);
  }
  return c;
}

inline int intersection_dim(const Lagrangian& l1, const Lagrangian& l2, double tol = default_tol()) {
  if (l1.space->dim() != l2.space->dim())
    throw Error(ErrorKind::DimensionMismatch, "Lagrangians live in different spaces");
  int k = classify_phases(relative_phases(l1, l2), tol).at_one;
  // Principal sines equal |sin(psi/2)| for eigenphases psi.
  RVec s = principal_sines(l1.frame, l2.frame);
  int k_svd = 0;
  for (Eigen::Index j = 0; j < s.size(); ++j)
    if (s(j) < std::sin(tol / 2.0) * 1.5) ++k_svd;
  if (k != k_svd)
    throw Error(ErrorKind::ToleranceAmbiguity, "eigenphase count " + std::to_string(k) +
                                                   " disagrees with principal-angle count " + std::to_string(k_svd));
  return k;
}

inline double subspace_distance(const Mat& s1, const Mat& s2, double tol = default_tol()) {
  if (s1.rows() != s2.rows()) throw Error(ErrorKind::DimensionMismatch, "ambient dimensions differ");
  Mat q1 = orthonormal_basis(s1, tol), q2 = orthonormal_basis(s2, tol);
  if (q1.cols() != q2.cols()) throw Error(ErrorKind::DimensionMismatch, "subspace dimensions differ");
  RVec s = principal_sines(q1, q2);
  return s.size() == 0 ? 0.0 : std::min(1.0, s(s.size() - 1));
}

inline double subspace_distance(const Lagrangian& a, const Lagrangian& b) {
  return subspace_distance(a.frame, b.frame);
}

struct Reduction {
  SpacePtr space;      // U ∩ gamma U with the restricted gamma
  Mat embedding;       // orthonormal frame of U ∩ gamma U in the ambient space
  Lagrangian lagrangian;

  Mat ambient_frame() const { return embedding * lagrangian.frame; }
};

// proj_{U ∩ gamma U}(L ∩ U) for a coisotropic subspace U.
inline Reduction symplectic_reduce(const Lagrangian& l, const Mat& u_frame, double tol = default_tol()) {
  const SymplecticSpace& s = *l.space;
  if (u_frame.rows() != s.dim()) throw Error(ErrorKind::DimensionMismatch, "U has the wrong ambient dimension");
  Mat u = orthonormal_basis(u_frame, tol);
  Mat gu = s.gamma * u;
  Mat ann = orthogonal_complement(gu);
  if (ann.cols() > 0 && max_abs(ann - u * (u.adjoint() * ann)) > std::sqrt(tol))
    throw Error(ErrorKind::NotCoisotropic, "Ann(U) is not contained in U");
  Mat rest = u - ann * (ann.adjoint() * u);
  // u is orthonormal, so an all-small remainder means U ∩ gamma U = 0.
  Mat w = max_abs(rest) < std::sqrt(tol) ? Mat(s.dim(), 0) : orthonormal_basis(rest, std::sqrt(tol));
  Mat lu = subspace_intersection(l.frame, u, std::sqrt(tol));
  Mat coords = w.adjoint() * lu;
  Mat red = orthonormal_basis(coords, std::sqrt(tol));
  Mat gw = w.adjoint() * s.gamma * w;
  gw = 0.5 * (gw - gw.adjoint());
  Reduction r;
  if (w.cols() == 0) {
    r.space = space_with_bases(Mat(0, 0), Mat(0, 0), Mat(0, 0));
    r.embedding = w;
    r.lagrangian = Lagrangian{r.space, Mat(0, 0), Mat(0, 0)};
    return r;
  }
  r.space = space_from_gamma(gw, std::max(tol, 1e-8));
  r.embedding = w;
  r.lagrangian = lagrangian_from_frame(r.space, red, std::max(tol, 1e-8));
  return r;
}

}  // namespace symflow
