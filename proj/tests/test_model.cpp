#include <gtest/gtest.h>

#include "oracles.hpp"
#include "symflow/model.hpp"
#include "symflow/random.hpp"

using namespace symflow;

namespace {

Lagrangian line(const SpacePtr& s, double angle) {
  Mat f(2, 1);
  f << std::cos(angle), std::sin(angle);
  return lagrangian_from_frame(s, f);
}

ModelOperator small_model(Rng& rng, int n, std::vector<double> mus, Geometry geo) {
  SpacePtr h = standard_space(n);
  return build_model(h, random_anticommuting(rng, h, mus), geo);
}

Lagrangian split(Rng& rng, const ModelOperator& op) {
  std::vector<double> angles;
  for (int b = 0; b < op.block_count(); ++b) angles.push_back(rng.uniform(0.0, pi));
  if (op.kernel_half_dim() == 0) return split_lagrangian(op, angles);
  Lagrangian k = random_lagrangian(rng, op.kernel_space);
  return split_lagrangian(op, angles, &k);
}

std::vector<double> oracle_interval_spectrum(const ModelOperator& op, const Lagrangian& p, const Lagrangian& q,
                                             double window) {
  oracle::Secular f{op.A, op.space->gamma, gamma_image(p).frame, gamma_image(q).frame, op.length()};
  return oracle::secular_roots(f, window, 2e-3, 1e-8);
}

void expect_same_spectrum(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], tol) << "index " << k;
}

// Spectrum without eigenvalues near the window edge, where the oracle and the
// library may legitimately disagree about inclusion.
std::vector<double> interior(const std::vector<double>& v, double window, double margin) {
  std::vector<double> out;
  for (double x : v)
    if (std::abs(x) < window - margin) out.push_back(x);
  return out;
}

}  // namespace

TEST(Model, RejectsOperatorsThatDoNotAnticommute) {
  SpacePtr h = standard_space(2);
  Mat a = Mat::Zero(4, 4);
  a(0, 0) = 1.0;
  EXPECT_THROW(build_model(h, a, Geometry::interval(1.0)), Error);
  Mat not_hermitian = Mat::Zero(4, 4);
  not_hermitian(0, 1) = 1.0;
  try {
    build_model(h, not_hermitian, Geometry::interval(1.0));
    ADD_FAILURE() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotHermitian);
  }
  EXPECT_THROW(build_model(h, Mat::Zero(4, 4), Geometry::interval(-1.0)), Error);
}

TEST(Model, BlocksMatchTheLevelsOfA) {
  Rng rng(61);
  ModelOperator op = small_model(rng, 3, {0.7, 1.9}, Geometry::interval(1.0));
  ASSERT_EQ(op.block_count(), 2);
  EXPECT_NEAR(op.blocks[0].mu, 0.7, 1e-12);
  EXPECT_NEAR(op.blocks[1].mu, 1.9, 1e-12);
  EXPECT_EQ(op.kernel_half_dim(), 1);
  for (const ModeBlock& b : op.blocks) {
    // basis = (psi, gamma psi) with A psi = mu psi.
    EXPECT_LT(max_abs(op.A * b.basis.col(0) - b.mu * b.basis.col(0)), 1e-10);
    EXPECT_LT(max_abs(b.basis.col(1) - op.space->gamma * b.basis.col(0)), 1e-10);
  }
}

TEST(Model, CauchyDataIsTheGraphOfTheTransfer) {
  Rng rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<double> mus;
    for (int j = 0; j < 1 + trial % n; ++j) mus.push_back(rng.uniform(0.3, 2.0));
    const double len = rng.uniform(0.5, 2.0);
    ModelOperator op = small_model(rng, n, mus, Geometry::interval(len));
    const Eigen::Index d = 2 * n;
    Mat graph(2 * d, d);
    graph.topRows(d) = identity(d);
    graph.bottomRows(d) = (-len * op.A).exp();
    EXPECT_EQ(oracle::intersection_dim(cauchy_data(op).frame, graph), d);
  }
}

TEST(Model, SplitIntervalSpectrumMatchesSecularOracle) {
  Rng rng(63);
  const double window = 8.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<double> mus;
    for (int j = 0; j < std::min(n, 1 + trial % 2); ++j) mus.push_back(rng.uniform(0.3, 2.0));
    ModelOperator op = small_model(rng, n, mus, Geometry::interval(rng.uniform(0.6, 1.5)));
    Lagrangian p = split(rng, op), q = split(rng, op);
    std::vector<double> got = interior(interval_spectrum(op, p, q, window), window, 0.05);
    std::vector<double> want = interior(oracle_interval_spectrum(op, p, q, window), window, 0.05);
    expect_same_spectrum(got, want, 1e-7);
  }
}

TEST(Model, CoupledSpectrumMatchesSecularOracleForGeneralConditions) {
  Rng rng(64);
  const double window = 6.0;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 1 + trial % 2;
    ModelOperator op = small_model(rng, n, {rng.uniform(0.3, 1.5)}, Geometry::interval(1.0));
    Lagrangian p = random_lagrangian(rng, op.space), q = random_lagrangian(rng, op.space);
    std::vector<double> got = interior(coupled_spectrum(op, interval_condition(op, p, q), window), window, 0.05);
    std::vector<double> want = interior(oracle_interval_spectrum(op, p, q, window), window, 0.05);
    expect_same_spectrum(got, want, 1e-7);
  }
}

TEST(Model, SwappingConditionsNegatesTheSpectrum) {
  Rng rng(65);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<double> mus;
    for (int j = 0; j < n; ++j) mus.push_back(rng.uniform(0.3, 2.5));
    if (trial % 2) mus.pop_back();
    ModelOperator op = small_model(rng, n, mus, Geometry::interval(1.0));
    Lagrangian p = split(rng, op), q = split(rng, op);
    std::vector<double> a = interval_spectrum(op, p, q, 20.0), b = interval_spectrum(op, q, p, 20.0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], -b[b.size() - 1 - k], 1e-8);
  }
}

TEST(Model, KernelEqualsZeroRoots) {
  // Zero-mode model on C^2: P = C(1,0), Q = C(0,1) gives beta(0) and beta(L) in the same line.
  SpacePtr h = standard_space(1);
  ModelOperator op = build_model(h, Mat::Zero(2, 2), Geometry::interval(1.0));
  Lagrangian p = line(h, 0.0), q = line(h, pi / 2);
  EXPECT_EQ(kernel_dimension(op, interval_condition(op, p, q)), 1);
  std::vector<double> s = interval_spectrum(op, p, q, 4.0);
  EXPECT_EQ(std::count_if(s.begin(), s.end(), [](double x) { return std::abs(x) < 1e-9; }), 1);
}

TEST(Model, ZeroModeLatticeByHand) {
  // A = 0 on C^2, P = C(1,0), Q at angle theta: spectrum (pi/2 - theta)/L + (pi/L) Z.
  SpacePtr h = standard_space(1);
  const double len = 1.3, theta = 0.4;
  ModelOperator op = build_model(h, Mat::Zero(2, 2), Geometry::interval(len));
  std::vector<double> s = interval_spectrum(op, line(h, 0.0), line(h, theta), 10.0);
  std::vector<double> want;
  for (int k = -10; k <= 10; ++k) {
    double lam = (pi / 2 - theta + k * pi) / len;
    if (std::abs(lam) <= 10.0) want.push_back(lam);
  }
  expect_same_spectrum(s, want, 1e-9);
}

TEST(Model, ZeroModeEtaByHand) {
  // Lattice (a + pi Z)/L with a in (0, pi) has eta = 1 - 2a/pi.
  SpacePtr h = standard_space(1);
  ModelOperator op = build_model(h, Mat::Zero(2, 2), Geometry::interval(1.0));
  struct Case {
    double theta, eta, ker;
  };
  for (Case c : {Case{pi / 4, 0.5, 0}, Case{0.0, 0.0, 0}, Case{pi / 2, 0.0, 1}, Case{-pi / 6, -1.0 / 3.0, 0}}) {
    EtaEstimate e = interval_eta(op, interval_condition(op, line(h, 0.0), line(h, c.theta)), 10000);
    EXPECT_NEAR(e.eta, c.eta, 1e-9) << "theta " << c.theta;
    EXPECT_EQ(e.dim_ker, c.ker);
    EXPECT_NEAR(e.eta_tilde, 0.5 * (c.eta + c.ker), 1e-9);
  }
}

TEST(Model, TruncatedEtaIsOddUnderSwap) {
  Rng rng(66);
  for (int trial = 0; trial < 3; ++trial) {
    ModelOperator op = small_model(rng, 2, {rng.uniform(0.5, 1.5)}, Geometry::interval(1.0));
    Lagrangian p = split(rng, op), q = split(rng, op);
    EtaEstimate a = interval_eta(op, interval_condition(op, p, q), 2000, 5e-2);
    EtaEstimate b = interval_eta(op, interval_condition(op, q, p), 2000, 5e-2);
    EXPECT_NEAR(a.eta, -b.eta, a.bound + b.bound + 1e-9);
    EXPECT_EQ(a.dim_ker, b.dim_ker);
  }
}

TEST(Model, CircleSpectrumMatchesPeriodicOracle) {
  Rng rng(67);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 2;
    std::vector<double> mus{rng.uniform(0.4, 1.8)};
    ModelOperator op = small_model(rng, n, mus, Geometry::circle(rng.uniform(1.0, 2.5)));
    const double window = 7.0;
    oracle::PeriodicSecular f{op.A, op.space->gamma, op.length()};
    std::vector<double> want = interior(oracle::secular_roots(f, window, 2e-3, 1e-8), window, 0.05);
    expect_same_spectrum(interior(circle_spectrum(op, window), window, 0.05), want, 1e-7);
    expect_same_spectrum(interior(circle_spectrum_by_transmission(op, window), window, 0.05), want, 1e-7);
  }
}

TEST(Model, FlowOfARotatingConditionByHand) {
  // Rotating Q by -pi m lifts every eigenvalue by m pi / L: SF = m.
  SpacePtr h = standard_space(1);
  ModelOperator op = build_model(h, Mat::Zero(2, 2), Geometry::interval(1.0));
  for (int m : {-2, -1, 1, 2}) {
    BoundaryFamily fam;
    fam.left = [h](double) { return line(h, 0.0); };
    fam.right = [h, m](double t) { return line(h, pi / 4 - pi * m * t); };
    NicolaescuRecord r = nicolaescu_verify(op, fam);
    EXPECT_EQ(r.spectral_flow, m);
    EXPECT_EQ(r.maslov, m);
  }
}

TEST(Model, FlowEqualsMaslovOnAMixedModel) {
  Rng rng(68);
  ModelOperator op = small_model(rng, 2, {0.9}, Geometry::interval(1.0));
  Lagrangian p = split(rng, op), q0 = split(rng, op);
  Mat s = random_hermitian(rng, 4);
  Mat gs = op.space->gamma * s;
  BoundaryFamily fam;
  fam.left = [p](double) { return p; };
  fam.right = [q0, gs](double t) { return apply_map(expm(3.0 * t * gs), q0, 1e-8); };
  NicolaescuRecord r = nicolaescu_verify(op, fam);
  EXPECT_EQ(r.spectral_flow, r.maslov);
}

TEST(Model, GluingFamilyKernelDimensionIsConstant) {
  Rng rng(69);
  for (int trial = 0; trial < 4; ++trial) {
    SpacePtr h = standard_space(2);
    Mat a = random_anticommuting(rng, h, trial % 2 ? std::vector<double>{1.1} : std::vector<double>{});
    ModelOperator plus = build_model(h, a, Geometry::interval(0.8)), minus = build_model(h, a, Geometry::interval(1.4));
    CaldconstRecord r = caldconst_check(plus, minus);
    CutData cd = cut_data(plus, minus);
    EXPECT_EQ(r.expected, oracle::intersection_dim(cd.plus.frame, cd.minus.frame));
    for (int d : r.dims) EXPECT_EQ(d, r.expected);
  }
}

TEST(Model, ZeroModeGluingIsExact) {
  Rng rng(70);
  for (int trial = 0; trial < 5; ++trial) {
    SpacePtr h = standard_space(1 + trial % 2);
    ModelOperator plus = build_model(h, Mat::Zero(h->dim(), h->dim()), Geometry::interval(0.7));
    ModelOperator minus = build_model(h, Mat::Zero(h->dim(), h->dim()), Geometry::interval(1.1));
    Lagrangian p = random_lagrangian(rng, plus.boundary);
    GlueRecord g = glue_verify(plus, minus, p);
    EXPECT_LT(std::abs(g.discrepancy), 1e-9);
    EXPECT_LT(g.mod_z_residue, 1e-9);
    EXPECT_DOUBLE_EQ(g.eta_tilde_closed, 0.5 * h->dim());
  }
}

TEST(Model, MixedGluingWithinTheTruncationBound) {
  Rng rng(71);
  SpacePtr h = standard_space(2);
  Mat a = random_anticommuting(rng, h, {0.8});
  ModelOperator plus = build_model(h, a, Geometry::interval(1.0)), minus = build_model(h, a, Geometry::interval(1.2));
  Lagrangian p = random_lagrangian(rng, plus.boundary);
  GlueRecord g = glue_verify(plus, minus, p, 10000);
  EXPECT_LE(std::abs(g.discrepancy), g.bound);
  EXPECT_LE(g.bound, 5e-3);
}

TEST(Model, EtaDifferenceMatchesBoundaryTraceLog) {
  Rng rng(72);
  SpacePtr h = standard_space(1);
  ModelOperator op = build_model(h, Mat::Zero(2, 2), Geometry::interval(1.0));
  for (int trial = 0; trial < 5; ++trial) {
    Lagrangian p = random_lagrangian(rng, op.boundary), q = random_lagrangian(rng, op.boundary);
    ModZRecord r = sw_modz_check(op, p, q);
    EXPECT_LT(r.residue, 1e-9);
    EXPECT_LT(r.exact_residue, 1e-9);
  }
}

TEST(Model, StretchedCauchyDataApproachesTheLimit) {
  Rng rng(73);
  for (int trial = 0; trial < 4; ++trial) {
    SpacePtr h = standard_space(2);
    std::vector<double> mus{rng.uniform(0.5, 1.5)};
    if (trial % 2) mus.push_back(rng.uniform(0.5, 1.5));
    ModelOperator op = build_model(h, random_anticommuting(rng, h, mus), Geometry::interval(1.0));
    const double mu_min = *std::min_element(mus.begin(), mus.end());
    AdiabaticLimit lim = adiabatic_limit(op, cauchy_data(op), 0.0);
    double prev = 2.0;
    for (double r : {1.0, 3.0, 10.0, 30.0, 50.0 / mu_min}) {
      double d = subspace_distance(stretched_cauchy_data(op, r), lim.limit);
      EXPECT_LE(d, prev + 1e-13);
      prev = d;
    }
    EXPECT_LT(prev, 1e-8);
    // Independent check of the stretch: e^{r (A ⊕ -A)} applied to a frame directly.
    Mat gen = boundary_generator(op);
    Mat direct = (2.0 * gen).exp() * transport(cauchy_data(op), op.boundary).frame;
    EXPECT_LT(subspace_distance(direct, stretched_cauchy_data(op, 2.0).frame), 1e-8);
  }
}
