#include <gtest/gtest.h>

#include "oracles.hpp"
#include "symflow/random.hpp"
#include "symflow/unitary.hpp"

using namespace symflow;

namespace {

// Sum of principal eigenphases in (-pi, pi], -1 mapped to pi.
double principal_phase_sum(const Mat& u) {
  Eigen::ComplexEigenSolver<Mat> es(u, false);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double a = std::arg(es.eigenvalues()(i));
    if (pi - std::abs(a) < 1e-9) a = pi;
    s += a;
  }
  return s;
}

// wind = (continuous change of arg det - change of the principal phase sum) / 2 pi.
template <class F>
int wind_oracle(F&& u, double t0, double t1) {
  double cont = 2.0 * pi * oracle::det_turns(u, t0, t1, 4000);
  double turns = (cont - (principal_phase_sum(u(t1)) - principal_phase_sum(u(t0)))) / (2.0 * pi);
  return static_cast<int>(std::lround(turns));
}

Mat diag_phases(const std::vector<double>& a) {
  Mat d = Mat::Zero(a.size(), a.size());
  for (std::size_t j = 0; j < a.size(); ++j) d(j, j) = std::polar(1.0, a[j]);
  return d;
}

}  // namespace

TEST(TrLog, PrincipalBranchAndMinusOne) {
  std::vector<double> a{0.3, -2.0, pi};
  cplx t = tr_log(diag_phases(a));
  EXPECT_NEAR(t.real(), 0.0, 1e-12);
  EXPECT_NEAR(t.imag(), 0.3 - 2.0 + pi, 1e-12);
  EXPECT_EQ(dim_ker_plus_identity(diag_phases(a)), 1);
}

TEST(TrLog, ConjugationInvariant) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + trial % 6;
    Mat u = haar_unitary(rng, k), w = haar_unitary(rng, k);
    EXPECT_LT(std::abs(tr_log(u) - tr_log(w * u * w.adjoint())), 1e-9);
  }
}

TEST(Wind, ClockwiseArrivalAtMinusOne) {
  auto g = [](double s) -> Mat { return Mat::Constant(1, 1, -std::exp(cplx(0, -2.0 * s))); };
  const double eps = 0.1;
  EXPECT_EQ(wind(UnitaryPath::from_generator(g, -eps, 0.0)).value, -1);
  EXPECT_EQ(wind(UnitaryPath::from_generator(g, 0.0, eps)).value, 0);
  EXPECT_EQ(wind_oracle(g, -eps, 0.0), -1);
  EXPECT_EQ(wind_oracle(g, 0.0, eps), 0);
}

TEST(Wind, FullTurnsCountWithSign) {
  for (int m : {-3, -1, 1, 2}) {
    auto g = [m](double s) -> Mat { return Mat::Constant(1, 1, std::exp(cplx(0, 2.0 * pi * m * s + 0.4))); };
    EXPECT_EQ(wind(UnitaryPath::from_generator(g, 0.0, 1.0)).value, m);
  }
}

TEST(Wind, MatchesDeterminantOracleOnRandomPaths) {
  Rng rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 1 + trial % 5;
    Mat u0 = haar_unitary(rng, k);
    Mat h = 3.0 * random_hermitian(rng, k);
    auto g = [u0, h](double t) -> Mat { return u0 * expm(I_unit * t * h); };
    WindResult w = wind(UnitaryPath::from_generator(g, 0.0, 1.0));
    EXPECT_EQ(w.value, wind_oracle(g, 0.0, 1.0)) << "trial " << trial;
    EXPECT_EQ(w.by_arg_det, w.by_counting);
    EXPECT_EQ(w.log.total, w.value);
  }
}

TEST(Wind, SampledPathAgreesWithGenerator) {
  Rng rng(23);
  Mat u0 = haar_unitary(rng, 3), h = 2.0 * random_hermitian(rng, 3);
  auto g = [u0, h](double t) -> Mat { return u0 * expm(I_unit * t * h); };
  std::vector<double> ts;
  std::vector<Mat> us;
  for (int j = 0; j <= 400; ++j) {
    ts.push_back(j / 400.0);
    us.push_back(g(ts.back()));
  }
  EXPECT_EQ(wind(UnitaryPath::from_samples(ts, us)).value, wind(UnitaryPath::from_generator(g, 0.0, 1.0)).value);
}

TEST(Wind, ConcatenationIsAdditive) {
  Rng rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + trial % 4;
    Mat u0 = haar_unitary(rng, k), h1 = 3.0 * random_hermitian(rng, k), h2 = 3.0 * random_hermitian(rng, k);
    Mat mid = u0 * expm(I_unit * h1);
    auto g1 = [u0, h1](double t) -> Mat { return u0 * expm(I_unit * t * h1); };
    auto g2 = [mid, h2](double t) -> Mat { return mid * expm(I_unit * t * h2); };
    UnitaryPath p1 = UnitaryPath::from_generator(g1, 0.0, 1.0), p2 = UnitaryPath::from_generator(g2, 0.0, 1.0);
    EXPECT_EQ(wind(concatenate(p1, p2)).value, wind(p1).value + wind(p2).value);
  }
}

TEST(Wind, InverseDefectIsEndpointKernelChange) {
  Rng rng(25);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + trial % 4;
    // Start at a unitary with a planted -1 eigenvalue of multiplicity 0..2.
    const int mult = trial % 3;
    Mat w = haar_unitary(rng, k);
    std::vector<double> a;
    for (int j = 0; j < k; ++j) a.push_back(j < mult ? pi : rng.uniform(-2.5, 2.5));
    Mat u0 = w * diag_phases(a) * w.adjoint();
    Mat h = 2.0 * random_hermitian(rng, k);
    auto g = [u0, h](double t) -> Mat { return u0 * expm(I_unit * t * h); };
    WindInverseRecord r = wind_plus_inverse_check(UnitaryPath::from_generator(g, 0.0, 1.0));
    EXPECT_EQ(r.ker_start, mult);
    EXPECT_EQ(r.wind_f + r.wind_f_inverse, r.ker_start - r.ker_end);
  }
}

TEST(TauW, DiagonalClosedForm) {
  Rng rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + trial % 6;
    std::vector<double> a, b;
    for (int j = 0; j < k; ++j) {
      a.push_back(rng.uniform(-pi, pi));
      b.push_back(rng.uniform(-pi, pi));
    }
    Mat w = haar_unitary(rng, k);
    Mat u = w * diag_phases(a) * w.adjoint(), v = w * diag_phases(b) * w.adjoint();
    EXPECT_EQ(tau_w(u, v).value, oracle::tau_w_diagonal(a, b));
  }
}

TEST(TauW, IdentityAndInverse) {
  Rng rng(27);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 8, mult = std::min(k, trial % 4);
    Mat w = haar_unitary(rng, k);
    std::vector<double> a;
    for (int j = 0; j < k; ++j) a.push_back(j < mult ? pi : rng.uniform(-3.0, 3.0));
    Mat u = w * diag_phases(a) * w.adjoint();
    EXPECT_EQ(tau_w(identity(k), u).value, 0);
    EXPECT_EQ(tau_w(u, identity(k)).value, 0);
    EXPECT_EQ(tau_w(u, u.adjoint()).value, -mult);
  }
}

TEST(TauW, PathDefinitionAgrees) {
  Rng rng(28);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + trial % 4;
    Mat u = haar_unitary(rng, k), v = haar_unitary(rng, k);
    EXPECT_EQ(tau_w(u, v).value, tau_w_by_paths(u, v));
  }
}

TEST(TauW, SizeMismatchIsRejected) {
  EXPECT_THROW(tau_w(identity(2), identity(3)), Error);
}
