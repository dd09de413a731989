#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "symflow/indices.hpp"
#include "symflow/model.hpp"
#include "symflow/random.hpp"
#include "symflow/spectral_flow.hpp"

namespace symflow {

struct IdentityTally {
  std::string identity;
  int passed = 0;
  int total = 0;
  std::vector<std::string> failures;  // first few, for diagnosis
};

struct SuiteReport {
  std::string suite;
  std::string tests;  // the result the suite exercises
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<IdentityTally> tallies;
  int resolution_failures = 0;
  std::vector<std::string> errors;
  std::uint64_t draws = 0;

  bool identities_hold() const {
    for (const auto& t : tallies)
      if (t.passed != t.total) return false;
    return errors.empty();
  }
  bool pass() const { return identities_hold() && resolution_failures == 0; }

  IdentityTally& tally(const std::string& name) {
    for (auto& t : tallies)
      if (t.identity == name) return t;
    tallies.push_back(IdentityTally{name});
    return tallies.back();
  }

  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    IdentityTally& t = tally(name);
    ++t.total;
    if (ok)
      ++t.passed;
    else if (t.failures.size() < 5)
      t.failures.push_back(detail);
  }

  // Runs one seeded trial; library errors count against the suite.
  template <class F>
  void trial(int index, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      if (is_resolution_failure(e.kind()))
        ++resolution_failures;
      if (errors.size() < 10) errors.push_back("trial " + std::to_string(index) + ": " + e.what());
      else if (errors.size() == 10) errors.push_back("...");
    }
  }
};

namespace suite_detail {

inline std::string num(double x) { return std::to_string(x); }

// U(t) = U0 exp(i t H) with H scaled so the path winds a few times.
inline UnitaryPath exp_path(Rng& rng, Eigen::Index k, double t0, double t1, double scale = 3.0) {
  Mat u0 = haar_unitary(rng, k);
  Mat h = scale * random_hermitian(rng, k);
  return UnitaryPath::from_generator([u0, h](double t) -> Mat { return u0 * expm(I_unit * t * h); }, t0, t1);
}

inline LagrangianGenerator lagrangian_exp(const SpacePtr& s, const Mat& phi0, const Mat& h) {
  return [s, phi0, h](double t) { return lagrangian_from_phi(s, expm(I_unit * t * h) * phi0, 1e-8); };
}

inline LagrangianGenerator random_lagrangian_path(Rng& rng, const SpacePtr& s, double scale = 2.0) {
  Mat phi0 = haar_unitary(rng, s->n);
  Mat h = scale * random_hermitian(rng, s->n);
  return lagrangian_exp(s, phi0, h);
}

// Q with dim(gamma P ∩ Q) = k, i.e. dim(ker P ∩ im Q) = k.
inline Lagrangian lagrangian_with_kernel_meet(Rng& rng, const Lagrangian& p, int k) {
  return random_lagrangian_meeting(rng, gamma_image(p), k);
}

inline int rand_int(Rng& rng, int lo, int hi) {
  return std::min(hi, lo + static_cast<int>(std::floor(rng.uniform(0.0, 1.0) * (hi - lo + 1))));
}

// Unitary with a planted -1 eigenspace of the given multiplicity.
inline Mat unitary_with_minus_one(Rng& rng, Eigen::Index k, int mult) {
  Mat w = haar_unitary(rng, k);
  Mat d = Mat::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    d(j, j) = j < mult ? cplx(-1.0) : std::polar(1.0, rng.uniform(-pi + 0.2, pi - 0.2));
  return w * d * w.adjoint();
}

// Hermitian path W diag(a + t (b - a)) W^* with some endpoint eigenvalues planted at 0.
inline HermitianPath planted_hermitian_path(Rng& rng, Eigen::Index k) {
  Mat w = haar_unitary(rng, k);
  RVec a(k), b(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    a(j) = rng.uniform(-2.0, 2.0);
    b(j) = rng.uniform(-2.0, 2.0);
    double r = rng.uniform(0.0, 1.0);
    if (r < 0.2) a(j) = 0.0;
    else if (r < 0.4) b(j) = 0.0;
  }
  return HermitianPath::from_generator(
      [w, a, b](double t) {
        RVec d = a + t * (b - a);
        return Mat(w * d.cast<cplx>().asDiagonal() * w.adjoint());
      },
      0.0, 1.0);
}

// Curved path H0 + t H1 + t^2 H2.
inline HermitianPath random_hermitian_path(Rng& rng, Eigen::Index k) {
  Mat h0 = random_hermitian(rng, k), h1 = 2.0 * random_hermitian(rng, k), h2 = random_hermitian(rng, k);
  return HermitianPath::from_generator([h0, h1, h2](double t) { return Mat(h0 + t * h1 + t * t * h2); }, 0.0, 1.0);
}

// Eigenvalue tracking on a fine uniform grid: sorted eigenvalues are continuous,
// so the flow is the net number of sorted branches ending nonnegative after
// starting negative.
inline int tracked_spectral_flow(const HermitianPath& p, int steps, double zero_tol) {
  RVec prev = hermitian_eigenvalues(p.generator(p.t.front()));
  const RVec first = prev;
  for (int s = 1; s <= steps; ++s) prev = hermitian_eigenvalues(p.generator(p.t.front() + (p.t.back() - p.t.front()) * s / steps));
  int flow = 0;
  for (Eigen::Index i = 0; i < first.size(); ++i) {
    bool a = first(i) >= -zero_tol, b = prev(i) >= -zero_tol;
    flow += static_cast<int>(b) - static_cast<int>(a);
  }
  return flow;
}

struct RandomModel {
  ModelOperator op;
  std::vector<double> mus;
};

inline RandomModel random_model(Rng& rng, int max_n, int max_blocks, Geometry geo) {
  const int n = rand_int(rng, 1, max_n);
  const int nb = rand_int(rng, 0, std::min(n, max_blocks));
  std::vector<double> mus;
  for (int j = 0; j < nb; ++j) mus.push_back(rng.uniform(0.3, 2.5));
  SpacePtr h = standard_space(n);
  Mat a = random_anticommuting(rng, h, mus);
  RandomModel m{build_model(h, a, geo), mus};
  return m;
}

inline Lagrangian random_split(Rng& rng, const ModelOperator& op) {
  std::vector<double> angles;
  for (int b = 0; b < op.block_count(); ++b) angles.push_back(rng.uniform(0.0, pi));
  if (op.kernel_half_dim() == 0) return split_lagrangian(op, angles);
  Lagrangian k = random_lagrangian(rng, op.kernel_space);
  return split_lagrangian(op, angles, &k);
}

inline std::vector<double> zero_roots(const std::vector<double>& spec, double tol) {
  std::vector<double> z;
  for (double x : spec)
    if (std::abs(x) <= tol) z.push_back(x);
  return z;
}

}  // namespace suite_detail

// ---- unitary paths ----

inline SuiteReport suite_winding(std::uint64_t seed, int count = 200) {
  SuiteReport r{"winding", "winding number additivity, refinement invariance and inverse paths", seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const Eigen::Index k = rand_int(rng, 1, 6);
      UnitaryPath f = exp_path(rng, k, 0.0, 1.0);
      Mat end = f.u.back();
      Mat h = 3.0 * random_hermitian(rng, k);
      UnitaryPath g = UnitaryPath::from_generator([end, h](double t) { return Mat(end * expm(I_unit * t * h)); }, 0.0, 1.0);
      const int wf = wind(f).value, wg = wind(g).value;
      const int wfg = wind(concatenate(f, g)).value;
      r.check("wind(f1 * f2) = wind(f1) + wind(f2)", wfg == wf + wg,
              std::to_string(wfg) + " vs " + std::to_string(wf) + " + " + std::to_string(wg));
      UnitaryPath fine = UnitaryPath::from_generator(f.generator, 0.0, 1.0, 53);
      r.check("wind invariant under resampling", wind(fine).value == wf);
      // Endpoints with planted -1 eigenvalues.
      Mat planted = unitary_with_minus_one(rng, k, rand_int(rng, 1, static_cast<int>(std::min<Eigen::Index>(3, k))));
      Mat hp = 3.0 * random_hermitian(rng, k);
      const double shift = i % 2 == 0 ? 0.0 : 1.0;
      UnitaryPath fp = UnitaryPath::from_generator(
          [planted, hp, shift](double t) -> Mat { return planted * expm(I_unit * (t - shift) * hp); }, 0.0, 1.0);
      WindInverseRecord inv = wind_plus_inverse_check(fp);
      r.check("wind(f) + wind(f^-1) = dim ker(f(0)+I) - dim ker(f(1)+I)",
              inv.wind_f + inv.wind_f_inverse == inv.ker_start - inv.ker_end);
      Mat w = haar_unitary(rng, k);
      r.check("tr_log(W U W^*) = tr_log(U)",
              std::abs(tr_log(w * end * w.adjoint()) - tr_log(end)) < 1e-9);
    });
  // The endpoint convention on -exp(-2is).
  r.trial(count, [&] {
    auto g = [](double s) { return Mat::Constant(1, 1, -std::exp(cplx(0.0, -2.0 * s))); };
    const double eps = 0.1;
    r.check("wind(-e^{-2is}) on [-eps, 0] = -1", wind(UnitaryPath::from_generator(g, -eps, 0.0)).value == -1);
    r.check("wind(-e^{-2is}) on [0, eps] = 0", wind(UnitaryPath::from_generator(g, 0.0, eps)).value == 0);
  });
  r.draws = rng.draws();
  return r;
}

inline SuiteReport suite_tauw(std::uint64_t seed, int count = 200) {
  SuiteReport r{"tauw", "double index normalization, inverse rule and homotopy formula", seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const Eigen::Index k = rand_int(rng, 1, 8);
      const int mult = rand_int(rng, 0, static_cast<int>(std::min<Eigen::Index>(3, k)));
      Mat u = unitary_with_minus_one(rng, k, mult);
      const Mat id = identity(k);
      r.check("tau_w(I, U) = 0", tau_w(id, u).value == 0);
      r.check("tau_w(U, I) = 0", tau_w(u, id).value == 0);
      const int inv = tau_w(u, u.adjoint()).value;
      r.check("tau_w(U, U^-1) = -dim ker(U + I)", inv == -mult,
              std::to_string(inv) + " vs planted " + std::to_string(-mult));
      Mat v = haar_unitary(rng, k);
      r.check("tau_w agrees with the path construction", tau_w(u, v).value == tau_w_by_paths(u, v));
      if (i % 4 == 0) {
        UnitaryPath f = exp_path(rng, k, 0.0, 1.0, 2.0), g = exp_path(rng, k, 0.0, 1.0, 2.0);
        auto fg_gen = [f, g](double t) { return Mat(f.generator(t) * g.generator(t)); };
        const int lhs = tau_w(f.u.back(), g.u.back()).value - tau_w(f.u.front(), g.u.front()).value;
        const int rhs = wind(f).value + wind(g).value - wind(UnitaryPath::from_generator(fg_gen, 0.0, 1.0)).value;
        r.check("tau_w(f1,g1) - tau_w(f0,g0) = wind f + wind g - wind fg", lhs == rhs,
                std::to_string(lhs) + " vs " + std::to_string(rhs));
      }
    });
  r.draws = rng.draws();
  return r;
}

// ---- Lagrangian indices ----

inline SuiteReport suite_maslov(std::uint64_t seed, int count = 200) {
  SuiteReport r{"maslov", "Maslov index orientation reversal, additivity and the triple-index defect", seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const int n = rand_int(rng, 1, 4);
      SpacePtr s = standard_space(n);
      auto g = random_lagrangian_path(rng, s);
      LagrangianGenerator f;
      if (i % 3 == 2) {
        f = random_lagrangian_path(rng, s);
      } else {
        // ker f ∩ im g nonzero at t = 0 or t = 1.
        const double at = static_cast<double>(i % 3);
        Mat f_at = unitary_with_minus_one(rng, n, rand_int(rng, 1, n)) * g(at).phi;
        Mat h = 2.0 * random_hermitian(rng, n);
        f = [s, f_at, h, at](double t) { return lagrangian_from_phi(s, expm(I_unit * (t - at) * h) * f_at, 1e-8); };
      }
      LagrangianPairPath pp = LagrangianPairPath::from_generators(s, f, g, 0.0, 1.0);
      MaslovOrientationRecord o = maslov_orientation_check(pp);
      r.check("Mas_{-gamma}(f, g) = Mas(g, f)", o.mas_fg_opposite == o.mas_gf);
      r.check("Mas(f, g) + Mas(g, f) = endpoint kernel dimension change", o.mas_fg + o.mas_gf == o.dim_end - o.dim_start);
      WindInverseRecord inv = wind_plus_inverse_check(induced_unitary_path(pp));
      r.check("wind(f) + wind(f^-1) = dim ker(f(0)+I) - dim ker(f(1)+I)",
              inv.wind_f + inv.wind_f_inverse == inv.ker_start - inv.ker_end);
      // Additivity over [0, 1/2] and [1/2, 1].
      const int whole = o.mas_fg;
      const int a = maslov(LagrangianPairPath::from_generators(s, f, g, 0.0, 0.5)).value;
      const int b = maslov(LagrangianPairPath::from_generators(s, f, g, 0.5, 1.0)).value;
      r.check("Mas additive under concatenation", a + b == whole);
      r.check("Mas invariant under resampling",
              maslov(LagrangianPairPath::from_generators(s, f, g, 0.0, 1.0, 41)).value == whole);
      if (i % 4 == 0) {
        auto h = random_lagrangian_path(rng, s);
        const int fg = whole;
        const int gh = maslov(LagrangianPairPath::from_generators(s, g, h, 0.0, 1.0)).value;
        const int fh = maslov(LagrangianPairPath::from_generators(s, f, h, 0.0, 1.0)).value;
        const int t0 = tau_mu(f(0.0), g(0.0), h(0.0)), t1 = tau_mu(f(1.0), g(1.0), h(1.0));
        r.check("Mas(f,g) + Mas(g,h) - Mas(f,h) = tau(1) - tau(0)", fg + gh - fh == t1 - t0,
                std::to_string(fg + gh - fh) + " vs " + std::to_string(t1 - t0));
      }
    });
  r.draws = rng.draws();
  return r;
}

inline SuiteReport suite_triple(std::uint64_t seed, int count = 500, int conversions = 100) {
  SuiteReport r{"triple", "permutation and repeated-argument relations of the triple index; tsig conversion", seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const int n = rand_int(rng, 1, 5);
      SpacePtr s = standard_space(n);
      Lagrangian p = random_lagrangian(rng, s);
      Lagrangian q = lagrangian_with_kernel_meet(rng, p, rand_int(rng, 0, n));
      Lagrangian rr = rng.uniform(0.0, 1.0) < 0.5 ? lagrangian_with_kernel_meet(rng, q, rand_int(rng, 0, n))
                                                    : random_lagrangian(rng, s);
      TripleRelations t = triple_relations(p, q, rr);
      r.check("tau(P,R,Q) = -tau(P,Q,R) + dim(ker Q ∩ im R)", t.prq);
      r.check("tau(Q,P,R) = -tau(P,Q,R) + dim(ker P ∩ im Q)", t.qpr);
      r.check("tau(R,Q,P) = -tau(P,Q,R) + kpq + kqr - kpr", t.rqp);
      r.check("tau(P,P,Q) = tau(Q,P,P) = 0", t.repeated_zero);
      r.check("tau(P,Q,P) = dim(ker P ∩ im Q)", t.repeated_dim);
      r.check("trace-log and tau_w forms agree", t.tau_w_form);
    });
  for (int i = 0; i < conversions; ++i)
    r.trial(count + i, [&] {
      const int n = rand_int(rng, 1, 4);
      SpacePtr s = standard_space(n);
      Lagrangian v = random_lagrangian(rng, s);
      Lagrangian w = rng.uniform(0.0, 1.0) < 0.3 ? random_lagrangian_meeting(rng, v, rand_int(rng, 1, n))
                                                  : random_lagrangian(rng, s);
      Lagrangian u = rng.uniform(0.0, 1.0) < 0.3 ? lagrangian_with_kernel_meet(rng, w, rand_int(rng, 1, n))
                                                  : random_lagrangian(rng, s);
      ConversionRecord c = tsig_tau_mu_conversion(v, w, u);
      r.check("tsig from four triple indices", c.tsig == c.tsig_from_tau);
      r.check("4 tau from four tsig values", c.tau_from_tsig_times4 == 4 * c.tau);
    });
  r.draws = rng.draws();
  return r;
}

inline SuiteReport suite_mtsig(std::uint64_t seed, int count = 200, int automorphisms = 100, int rebasings = 50) {
  SuiteReport r{"mtsig", "m antisymmetry and additivity; tsig invariance; basis independence", seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const int n1 = rand_int(rng, 1, 3), n2 = rand_int(rng, 1, 3);
      SpacePtr s1 = standard_space(n1), s2 = standard_space(n2);
      Lagrangian v1 = random_lagrangian(rng, s1), w1 = random_lagrangian(rng, s1);
      Lagrangian v2 = random_lagrangian(rng, s2), w2 = random_lagrangian(rng, s2);
      if (rng.uniform(0.0, 1.0) < 0.3) w1 = random_lagrangian_meeting(rng, v1, 1);
      const double m = m_H(v1, w1);
      r.check("m(W, V) = -m(V, W)", std::abs(m_H(w1, v1) + m) < 1e-9, num(m_H(w1, v1) + m));
      SpacePtr sum = direct_sum_space(s1, s2);
      const double ms = m_H(direct_sum(v1, v2, sum), direct_sum(w1, w2, sum));
      r.check("m additive under direct sums", std::abs(ms - m - m_H(v2, w2)) < 1e-9, num(ms - m - m_H(v2, w2)));
    });
  for (int i = 0; i < automorphisms; ++i)
    r.trial(count + i, [&] {
      const int n = rand_int(rng, 1, 4);
      SpacePtr s = standard_space(n);
      Lagrangian v = random_lagrangian(rng, s), w = random_lagrangian(rng, s), u = random_lagrangian(rng, s);
      Mat h = random_symplectic(rng, s);
      const int before = tsig(v, w, u).value;
      const int after = tsig(apply_map(h, v), apply_map(h, w), apply_map(h, u)).value;
      r.check("tsig(hV, hW, hU) = tsig(V, W, U)", before == after);
      // m along the orbit h_t = exp(t gamma S): no jumps at resolution 1e-3.
      if (i % 5 == 0) {
        Mat sgen = 0.5 * random_hermitian(rng, s->dim());
        double prev = m_H(v, w), worst = 0.0;
        for (int k = 1; k <= 200; ++k) {
          Mat ht = expm(s->gamma * (1e-3 * k * sgen));
          double cur = m_H(apply_map(ht, v), apply_map(ht, w));
          worst = std::max(worst, std::abs(cur - prev));
          prev = cur;
        }
        r.check("m continuous along automorphism orbits", worst < 0.05, num(worst));
      }
    });
  for (int i = 0; i < rebasings; ++i)
    r.trial(count + automorphisms + i, [&] {
      const int n = rand_int(rng, 1, 4);
      SpacePtr s = standard_space(n);
      SpacePtr t = rebased_space(s, haar_unitary(rng, n), haar_unitary(rng, n));
      Lagrangian p = random_lagrangian(rng, s);
      Lagrangian q = lagrangian_with_kernel_meet(rng, p, rand_int(rng, 0, n));
      Lagrangian rr = random_lagrangian_meeting(rng, q, rand_int(rng, 0, n));
      Lagrangian pt = transport(p, t), qt = transport(q, t), rt = transport(rr, t);
      r.check("intersection_dim basis independent", intersection_dim(q, rr) == intersection_dim(qt, rt));
      r.check("kernel_image_dim basis independent", kernel_image_dim(p, q) == kernel_image_dim(pt, qt));
      r.check("tau_mu basis independent", tau_mu(p, q, rr) == tau_mu(pt, qt, rt));
      r.check("tsig basis independent", tsig(p, q, rr).value == tsig(pt, qt, rt).value);
      r.check("m basis independent", std::abs(m_H(p, q) - m_H(pt, qt)) < 1e-9);
      Mat hf = random_hermitian(rng, 2 * n), hg = random_hermitian(rng, 2 * n);
      auto f = [p, hf](double x) { return apply_map(expm(x * p.space->gamma * hf), p); };
      auto g = [q, hg](double x) { return apply_map(expm(x * q.space->gamma * hg), q); };
      auto ft = [t, f](double x) { return transport(f(x), t); };
      auto gt = [t, g](double x) { return transport(g(x), t); };
      const int m1 = maslov(LagrangianPairPath::from_generators(s, f, g, 0.0, 1.0)).value;
      const int m2 = maslov(LagrangianPairPath::from_generators(t, ft, gt, 0.0, 1.0)).value;
      r.check("Mas basis independent", m1 == m2);
    });
  r.draws = rng.draws();
  return r;
}

// ---- spectral flow ----

inline SuiteReport suite_sf(std::uint64_t seed, int count = 100) {
  SuiteReport r{"sf", "finite-rank spectral flow against the reduced eta change", seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const Eigen::Index k = rand_int(rng, 1, 8);
      HermitianPath p = i % 2 == 0 ? planted_hermitian_path(rng, k) : random_hermitian_path(rng, k);
      SfEtaRecord e = sf_eta_consistency(p);
      r.check("eta~(1) - eta~(0) = SF", e.eta_tilde_end - e.eta_tilde_start == e.sf);
      const int tracked = tracked_spectral_flow(p, 400, 1e-12);
      r.check("counting rule = eigenvalue tracking", tracked == e.sf,
              std::to_string(e.sf) + " vs tracked " + std::to_string(tracked));
      const int a = spectral_flow(HermitianPath::from_generator(p.generator, 0.0, 0.37)).value;
      const int b = spectral_flow(HermitianPath::from_generator(p.generator, 0.37, 1.0)).value;
      r.check("SF additive under concatenation", a + b == e.sf);
      r.check("SF invariant under resampling", spectral_flow(HermitianPath::from_generator(p.generator, 0.0, 1.0, 29)).value == e.sf);
      auto g = p.generator;
      HermitianPath rev = HermitianPath::from_generator([g](double t) { return g(1.0 - t); }, 0.0, 1.0);
      if (eta_finite(p.h.front()).dim_ker == 0 && eta_finite(p.h.back()).dim_ker == 0)
        r.check("SF(path) + SF(reverse) = 0 without endpoint kernels", spectral_flow(rev).value == -e.sf);
    });
  r.draws = rng.draws();
  return r;
}

// ---- model operator ----

inline SuiteReport suite_model_symmetry(std::uint64_t seed, int count = 50, double window = 20.0) {
  SuiteReport r{"model-symmetry", "spectral symmetry under exchanging the boundary conditions; zero modes; split bundles",
                seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      RandomModel m = random_model(rng, 3, 3, Geometry::interval(rng.uniform(0.5, 2.0)));
      const ModelOperator& op = m.op;
      Lagrangian p = random_split(rng, op), q = random_split(rng, op);
      // Plant zero modes in some blocks: Q's line equal to e^{-LA} of gamma P's line.
      if (i % 3 == 0) {
        std::vector<double> qa;
        Lagrangian gp = gamma_image(p);
        for (int b = 0; b < op.block_count(); ++b) {
          RVec l = detail::block_line(gp.frame, op.blocks[b].basis, "gamma P");
          double e = std::exp(op.length() * op.blocks[b].mu);
          qa.push_back(b % 2 == 0 ? std::atan2(e * l(1), l(0) / e) : rng.uniform(0.0, pi));
        }
        if (op.kernel_half_dim() > 0) {
          Mat gk_frame = op.kernel_frame.adjoint() * subspace_intersection(gp.frame, op.kernel_frame, 1e-7);
          Lagrangian gk = lagrangian_from_frame(op.kernel_space, gk_frame, 1e-8);
          Lagrangian kq = random_lagrangian_meeting(rng, gk, rand_int(rng, 0, op.kernel_half_dim()));
          q = split_lagrangian(op, qa, &kq);
        } else {
          q = split_lagrangian(op, qa);
        }
      }
      std::vector<double> s1 = interval_spectrum(op, p, q, window), s2 = interval_spectrum(op, q, p, window);
      bool same = s1.size() == s2.size();
      double worst = 0.0;
      for (std::size_t j = 0; same && j < s1.size(); ++j) worst = std::max(worst, std::abs(s1[j] + s2[s2.size() - 1 - j]));
      r.check("spec D_{P,Q} = -spec D_{Q,P}", same && worst < 1e-8,
              "sizes " + std::to_string(s1.size()) + "/" + std::to_string(s2.size()) + ", worst " + num(worst));
      const int zeros = static_cast<int>(zero_roots(s1, 1e-7).size());
      const int kd = kernel_dimension(op, interval_condition(op, p, q));
      r.check("zero roots = dim(L_X ∩ (gamma P ⊕ Q))", zeros == kd,
              std::to_string(zeros) + " vs " + std::to_string(kd));
      if (i % 5 == 0) {
        // Two independent operators and their direct sum.
        RandomModel m2 = random_model(rng, 2, 2, op.geometry);
        Lagrangian p2 = random_split(rng, m2.op), q2 = random_split(rng, m2.op);
        SpacePtr sum = direct_sum_space(op.space, m2.op.space);
        Mat a = Mat::Zero(sum->dim(), sum->dim());
        a.topLeftCorner(op.space->dim(), op.space->dim()) = op.A;
        a.bottomRightCorner(m2.op.space->dim(), m2.op.space->dim()) = m2.op.A;
        ModelOperator big = build_model(sum, a, op.geometry);
        std::vector<double> u = interval_spectrum(big, direct_sum(p, p2, sum), direct_sum(q, q2, sum), 8.0);
        std::vector<double> parts = interval_spectrum(op, p, q, 8.0), s3 = interval_spectrum(m2.op, p2, q2, 8.0);
        parts.insert(parts.end(), s3.begin(), s3.end());
        std::sort(parts.begin(), parts.end());
        bool ok = parts.size() == u.size();
        for (std::size_t j = 0; ok && j < u.size(); ++j) ok = std::abs(u[j] - parts[j]) < 1e-8;
        r.check("spectrum of the direct sum = union of the spectra", ok);
      }
    });
  r.draws = rng.draws();
  return r;
}

inline SuiteReport suite_nicolaescu(std::uint64_t seed, int count = 30) {
  SuiteReport r{"nicolaescu", "spectral flow of boundary-condition families equals the Maslov index against Cauchy data",
                seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  std::vector<int> seen;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      RandomModel m = random_model(rng, 3, 2, Geometry::interval(rng.uniform(0.6, 1.6)));
      const ModelOperator& op = m.op;
      const int target = (i % 5) - 2;
      std::vector<double> a0, turns(static_cast<std::size_t>(op.block_count()), 0.0);
      for (int b = 0; b < op.block_count(); ++b) a0.push_back(rng.uniform(0.0, pi));
      int kernel_turns = 0;
      if (op.block_count() > 0) {
        turns[0] = target;
      } else {
        kernel_turns = target;
      }
      Lagrangian kl = op.kernel_half_dim() ? random_lagrangian(rng, op.kernel_space) : Lagrangian{};
      const int km = op.kernel_half_dim();
      Mat rot_gen = Mat::Zero(km, km);
      if (km > 0) {
        Mat w = haar_unitary(rng, km);
        Mat d = Mat::Zero(km, km);
        d(0, 0) = 2.0 * pi * kernel_turns;
        rot_gen = w * d * w.adjoint();
      }
      Lagrangian q = random_split(rng, op);
      BoundaryFamily fam;
      SpacePtr ks = op.kernel_space;
      fam.left = [&op, a0, turns, kl, rot_gen, ks, km](double t) {
        std::vector<double> a = a0;
        for (std::size_t b = 0; b < a.size(); ++b) a[b] += pi * turns[b] * t;
        if (km == 0) return split_lagrangian(op, a);
        Lagrangian kt = lagrangian_from_phi(ks, expm(I_unit * t * rot_gen) * kl.phi, 1e-8);
        return split_lagrangian(op, a, &kt);
      };
      fam.right = [q](double) { return q; };
      NicolaescuRecord rec = nicolaescu_verify(op, fam);
      r.check("SF = Mas", rec.spectral_flow == rec.maslov,
              std::to_string(rec.spectral_flow) + " vs " + std::to_string(rec.maslov));
      seen.push_back(rec.spectral_flow);
    });
  for (int v = -2; v <= 2; ++v)
    r.check("family with SF = " + std::to_string(v) + " present", std::find(seen.begin(), seen.end(), v) != seen.end());
  r.draws = rng.draws();
  return r;
}

inline SuiteReport suite_gluing(std::uint64_t seed, int count = 20, long n_max = 10000) {
  SuiteReport r{"gluing", "eta~ splitting of the circle into two intervals; constant kernel along P(theta); "
                          "eta~ differences against the boundary trace log",
                seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const bool zero_mode = i % 2 == 0;
      const int n = rand_int(rng, 1, 3);
      SpacePtr h = standard_space(n);
      std::vector<double> mus;
      if (!zero_mode)
        for (int j = 0; j < rand_int(rng, 1, n); ++j) mus.push_back(rng.uniform(0.4, 2.0));
      Mat a = random_anticommuting(rng, h, mus);
      ModelOperator plus = build_model(h, a, Geometry::interval(rng.uniform(0.5, 1.5)));
      ModelOperator minus = build_model(h, a, Geometry::interval(rng.uniform(0.5, 1.5)));
      Lagrangian p = random_lagrangian(rng, plus.boundary);
      GlueRecord g = glue_verify(plus, minus, p, n_max);
      const double allowed = zero_mode ? 1e-9 : g.bound;
      r.check(zero_mode ? "zero-mode gluing closes to 1e-9" : "mixed gluing closes within the truncation bound",
              std::abs(g.discrepancy) <= allowed, num(g.discrepancy) + " vs " + num(allowed));
      if (!zero_mode) r.check("truncation bound <= 5e-3", g.bound <= 5e-3, num(g.bound));
      CutData cd = cut_data(plus, minus);
      Lagrangian pb = transport(p, plus.boundary);
      r.check("tau_mu term: trace-log and tau_w forms agree",
              tau_mu_via_tau_w(gamma_image(cd.minus), pb, cd.plus) == g.tau);
      r.check("eta~ sum congruent to the closed value mod Z", g.mod_z_residue <= allowed + 1e-12, num(g.mod_z_residue));
      CaldconstRecord c = caldconst_check(plus, minus);
      bool constant = std::all_of(c.dims.begin(), c.dims.end(), [&](int d) { return d == c.expected; });
      r.check("dim(ker P(theta) ∩ (L+ ⊕ L-)) constant in theta", constant);
      r.check("the constant equals dim ker A", c.expected == static_cast<int>(plus.kernel_frame.cols()));
      Lagrangian q = random_lagrangian(rng, plus.boundary);
      ModZRecord mz = sw_modz_check(plus, p, q, n_max);
      r.check("eta~(P) - eta~(Q) = trace log mod Z", mz.residue <= (zero_mode ? 1e-9 : mz.bound + 1e-9), num(mz.residue));
      if (zero_mode) r.check("eta~(P) = trace log against Cauchy data", mz.exact_residue <= 1e-9, num(mz.exact_residue));
    });
  r.draws = rng.draws();
  return r;
}

inline SuiteReport suite_adiabatic(std::uint64_t seed, int count = 20) {
  SuiteReport r{"adiabatic", "adiabatic limit of stretched Cauchy data", seed, count};
  Rng rng(seed);
  using namespace suite_detail;
  for (int i = 0; i < count; ++i)
    r.trial(i, [&] {
      const int n = rand_int(rng, 1, 4);
      SpacePtr h = standard_space(n);
      std::vector<double> mus;
      for (int j = 0; j < rand_int(rng, 1, n); ++j) mus.push_back(rng.uniform(0.3, 2.5));
      ModelOperator op = build_model(h, random_anticommuting(rng, h, mus), Geometry::interval(rng.uniform(0.3, 2.0)));
      const double mu_min = *std::min_element(mus.begin(), mus.end());
      AdiabaticLimit lim = adiabatic_limit(op, cauchy_data(op), 0.0);
      r.check("limit is Lagrangian", intersection_dim(lim.limit, gamma_image(lim.limit)) == 0);
      double prev = 2.0;
      bool mono = true;
      std::string trace;
      for (int k = 1; k <= 16; ++k) {
        const double rr = (50.0 / mu_min) * k / 16.0;
        double d = subspace_distance(stretched_cauchy_data(op, rr), lim.limit);
        if (d > prev + 1e-13) {
          mono = false;
          trace = "r = " + num(rr) + ": " + num(d) + " after " + num(prev);
        }
        prev = d;
      }
      r.check("distance decreasing in r", mono, trace);
      r.check("distance < 1e-8 at r = 50 / mu_min", prev < 1e-8, num(prev));
      Lagrangian direct = stretch(transport(cauchy_data(op), op.boundary), boundary_generator(op), 50.0 / mu_min);
      r.check("e^{r A~} L_X = stretched Cauchy data",
              subspace_distance(direct, stretched_cauchy_data(op, 50.0 / mu_min)) < 1e-8);
    });
  r.draws = rng.draws();
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"winding", "tauw", "maslov", "triple", "mtsig",
                                              "sf", "model-symmetry", "nicolaescu", "gluing", "adiabatic"};
  return names;
}

// count <= 0 selects each suite's default size.
inline SuiteReport run_suite(const std::string& name, std::uint64_t seed, int count = 0) {
  auto pick = [count](int dflt) { return count > 0 ? count : dflt; };
  if (name == "winding") return suite_winding(seed, pick(200));
  if (name == "tauw") return suite_tauw(seed, pick(200));
  if (name == "maslov") return suite_maslov(seed, pick(200));
  if (name == "triple") return suite_triple(seed, pick(500), count > 0 ? count : 100);
  if (name == "mtsig") return suite_mtsig(seed, pick(200), count > 0 ? count : 100, count > 0 ? count : 50);
  if (name == "sf") return suite_sf(seed, pick(100));
  if (name == "model-symmetry") return suite_model_symmetry(seed, pick(50));
  if (name == "nicolaescu") return suite_nicolaescu(seed, pick(30));
  if (name == "gluing") return suite_gluing(seed, pick(20));
  if (name == "adiabatic") return suite_adiabatic(seed, pick(20));
  throw Error(ErrorKind::SchemaError, "unknown suite '" + name + "'");
}

}  // namespace symflow
