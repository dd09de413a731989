#pragma once

#include <cstdint>
#include <random>

#include "symflow/symplectic.hpp"

namespace symflow {

// mt19937_64 that counts its draws so runs can report how much randomness they used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  double normal() {
    ++draws_;
    return normal_(engine_);
  }
  double uniform(double a, double b) {
    ++draws_;
    return std::uniform_real_distribution<double>(a, b)(engine_);
  }
  cplx complex_normal() {
    double re = normal(), im = normal();
    return cplx(re, im) / std::sqrt(2.0);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
};

inline Mat ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

// Haar-distributed unitary (QR of a Ginibre matrix with the phase correction).
inline Mat haar_unitary(Rng& rng, Eigen::Index n) {
  if (n == 0) return Mat(0, 0);
  Eigen::HouseholderQR<Mat> qr(ginibre(rng, n, n));
  Mat q = qr.householderQ() * identity(n);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Mat random_hermitian(Rng& rng, Eigen::Index n) {
  Mat g = ginibre(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

inline Lagrangian random_lagrangian(Rng& rng, const SpacePtr& s) {
  return lagrangian_from_phi(s, haar_unitary(rng, s->n));
}

// exp(gamma S) for Hermitian S preserves the symplectic form.
inline Mat random_symplectic(Rng& rng, const SpacePtr& s, double scale = 0.5) {
  return expm(s->gamma * (scale * random_hermitian(rng, s->dim())));
}

// Lagrangian with a prescribed intersection dimension k with l.
inline Lagrangian random_lagrangian_meeting(Rng& rng, const Lagrangian& l, int k) {
  const Eigen::Index n = l.space->n;
  Mat w = haar_unitary(rng, n);
  Mat d = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    d(j, j) = j < k ? cplx(1.0) : std::polar(1.0, rng.uniform(0.3, 2.0 * pi - 0.3));
  Mat u = w * d * w.adjoint();
  return lagrangian_from_phi(l.space, u * l.phi);
}

// Hermitian A anticommuting with gamma: level mu on psi_j and -mu on gamma psi_j.
inline Mat random_anticommuting(Rng& rng, const SpacePtr& s, const std::vector<double>& mus) {
  const Eigen::Index d = s->dim();
  if (static_cast<Eigen::Index>(2 * mus.size()) > d)
    throw Error(ErrorKind::DimensionMismatch, "too many levels for the space");
  // psi_j inside a Lagrangian, so gamma psi_j is orthogonal to every psi_k.
  Lagrangian l = random_lagrangian(rng, s);
  Mat psi = l.frame * haar_unitary(rng, s->n);
  Mat a = Mat::Zero(d, d);
  for (std::size_t j = 0; j < mus.size(); ++j) {
    Vec p = psi.col(static_cast<Eigen::Index>(j));
    Vec gp = s->gamma * p;
    a += mus[j] * (p * p.adjoint() - gp * gp.adjoint());
  }
  return a;
}

}  // namespace symflow
