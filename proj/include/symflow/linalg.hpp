#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "symflow/errors.hpp"

namespace symflow {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kIntegerResidue = 1e-8;

// SYMFLOW_TOL overrides the default tolerance for the whole process.
inline double default_tol() {
  static const double tol = [] {
    if (const char* env = std::getenv("SYMFLOW_TOL")) {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end != env && v > 0.0 && std::isfinite(v)) return v;
    }
    return kDefaultTol;
  }();
  return tol;
}

inline Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

inline Mat expm(const Mat& m) { return m.exp(); }

inline double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Principal value of an angle in (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

// Multiply a column by a unit scalar so that its first entry of (near) largest
// modulus is real positive.
inline void phase_fix(Eigen::Ref<Vec> v) {
  if (v.size() == 0) return;
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return;
  Eigen::Index k = 0;
  for (; k < v.size(); ++k)
    if (std::abs(v(k)) >= m * (1.0 - 1e-8)) break;
  v *= std::conj(v(k)) / std::abs(v(k));
}

// Orthonormal basis of the column space, rank decided relative to the largest
// singular value.
inline Mat orthonormal_basis(const Mat& f, double tol = kDefaultTol) {
  if (f.cols() == 0 || f.rows() == 0) return Mat(f.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(f, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return Mat(f.rows(), 0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the range of an orthogonal projector, built from its
// columns in order (Gram-Schmidt with a deterministic pivot rule).
inline Mat canonical_range_basis(const Mat& proj, Eigen::Index rank) {
  const Eigen::Index m = proj.rows();
  Mat out(m, rank);
  Mat residual = proj;
  for (Eigen::Index k = 0; k < rank; ++k) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) best = std::max(best, residual.col(j).norm());
    Eigen::Index pick = 0;
    for (; pick < m; ++pick)
      if (residual.col(pick).norm() >= 0.5 * best) break;
    Vec v = residual.col(pick);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < k; ++i) v -= out.col(i) * out.col(i).dot(v);
    v.normalize();
    phase_fix(v);
    out.col(k) = v;
    residual -= v * (v.adjoint() * residual);
  }
  return out;
}

// Orthonormal basis of the orthogonal complement of the span of q (orthonormal).
inline Mat orthogonal_complement(const Mat& q) {
  const Eigen::Index m = q.rows();
  if (q.cols() == 0) return identity(m);
  Mat proj = identity(m) - q * q.adjoint();
  return canonical_range_basis(proj, m - q.cols());
}

// Singular values of (I - Q2 Q2*) Q1, ascending: sines of the principal angles
// of span Q1 relative to span Q2.
inline RVec principal_sines(const Mat& q1, const Mat& q2) {
  if (q1.cols() == 0) return RVec(0);
  Mat r = q1 - q2 * (q2.adjoint() * q1);
  Eigen::JacobiSVD<Mat> svd(r);
  RVec s = svd.singularValues();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

// Orthonormal frame of span(Q1) ∩ span(Q2); a direction is shared when its
// sine to span(Q2) is below tol.
inline Mat subspace_intersection(const Mat& q1, const Mat& q2, double tol = kDefaultTol) {
  if (q1.cols() == 0 || q2.cols() == 0) return Mat(q1.rows(), 0);
  Mat r = q1 - q2 * (q2.adjoint() * q1);
  Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Mat& v = svd.matrixV();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    double sj = j < s.size() ? s(j) : 0.0;
    if (sj < tol) keep.push_back(j);
  }
  Mat out(q1.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(k) = q1 * v.col(keep[k]);
  return orthonormal_basis(out, 1e-6);
}

inline std::vector<cplx> eigenvalues(const Mat& u) {
  std::vector<cplx> out;
  if (u.rows() == 0) return out;
  Eigen::ComplexEigenSolver<Mat> es(u, false);
  const auto& ev = es.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  return out;
}

// Eigenphases in (-pi, pi], sorted ascending.
inline std::vector<double> eigenphases(const Mat& u) {
  std::vector<double> out;
  for (const cplx& z : eigenvalues(u)) out.push_back(wrap_angle(std::arg(z)));
  std::sort(out.begin(), out.end());
  return out;
}

inline void require_unitary(const Mat& u, double tol, const char* what) {
  if (u.rows() != u.cols())
    throw Error(ErrorKind::NotUnitary, std::string(what) + " is not square");
  double dev = max_abs(u.adjoint() * u - identity(u.rows()));
  if (dev > tol)
    throw Error(ErrorKind::NotUnitary,
                std::string(what) + " deviates from unitarity by " + std::to_string(dev));
}

// Unitary factor of the polar decomposition.
inline Mat nearest_unitary(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Round a claimed integer; the residue must be below kIntegerResidue.
inline int checked_integer(double x, const std::string& what) {
  double r = std::round(x);
  if (!std::isfinite(x) || std::abs(x - r) >= kIntegerResidue)
    throw Error(ErrorKind::NonIntegerResult,
                what + " = " + std::to_string(x) + " is not an integer");
  return static_cast<int>(r);
}

}  // namespace symflow
