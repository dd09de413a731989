#pragma once

#include <functional>
#include <vector>

#include "symflow/symplectic.hpp"
#include "symflow/unitary.hpp"

namespace symflow {

using LagrangianGenerator = std::function<Lagrangian(double)>;

// Pair of Lagrangian paths on a common parameter grid.
struct LagrangianPairPath {
  SpacePtr space;
  std::vector<double> t;
  std::vector<Lagrangian> f, g;
  LagrangianGenerator f_gen, g_gen;  // optional, both or neither
  int refine_limit = 40;

  static LagrangianPairPath from_generators(SpacePtr s, LagrangianGenerator fg, LagrangianGenerator gg,
                                            double t0, double t1, int initial = 16) {
    LagrangianPairPath p;
    p.space = std::move(s);
    p.f_gen = std::move(fg);
    p.g_gen = std::move(gg);
    for (int k = 0; k <= initial; ++k) {
      double t = t0 + (t1 - t0) * k / initial;
      p.t.push_back(t);
      p.f.push_back(p.f_gen(t));
      p.g.push_back(p.g_gen(t));
    }
    return p;
  }

  bool has_generator() const { return static_cast<bool>(f_gen) && static_cast<bool>(g_gen); }

  LagrangianPairPath swapped() const {
    LagrangianPairPath q = *this;
    std::swap(q.f, q.g);
    std::swap(q.f_gen, q.g_gen);
    return q;
  }
};

inline Mat transition(const Lagrangian& a, const Lagrangian& b) { return a.phi * b.phi.adjoint(); }

// t -> phi(f_t) phi(g_t)^*
inline UnitaryPath induced_unitary_path(const LagrangianPairPath& pp) {
  if (pp.t.size() != pp.f.size() || pp.t.size() != pp.g.size())
    throw Error(ErrorKind::DimensionMismatch, "pair path samples are not on a common grid");
  UnitaryPath u;
  u.t = pp.t;
  for (std::size_t j = 0; j < pp.t.size(); ++j) {
    if (pp.f[j].space->dim() != pp.g[j].space->dim())
      throw Error(ErrorKind::DimensionMismatch, "pair path Lagrangians live in different spaces");
    u.u.push_back(transition(pp.f[j], pp.g[j]));
  }
  if (pp.has_generator()) {
    auto fg = pp.f_gen, gg = pp.g_gen;
    u.generator = [fg, gg](double t) { return transition(fg(t), gg(t)); };
  }
  u.refine_limit = pp.refine_limit;
  return u;
}

struct MaslovResult {
  int value = 0;
  CrossingLog log;  // directions already carry the Maslov sign
};

// Mas(f, g) = -wind(phi(f) phi(g)^*): passages of ker f = gamma f through g.
inline MaslovResult maslov(const LagrangianPairPath& pp, double tol = default_tol()) {
  WindResult w = wind(induced_unitary_path(pp), tol);
  MaslovResult r;
  r.value = -w.value;
  r.log = w.log;
  r.log.total = -w.log.total;
  for (auto& c : r.log.crossings) c.direction = -c.direction;
  return r;
}

// dim(ker P ∩ im Q) for the projections onto l1, l2.
inline int kernel_image_dim(const Lagrangian& p, const Lagrangian& q, double tol = default_tol()) {
  return intersection_dim(gamma_image(p), q, tol);
}

// The same pair path described with -gamma.
inline LagrangianPairPath with_opposite_gamma(const LagrangianPairPath& pp) {
  SpacePtr opp = opposite_space(pp.space);
  LagrangianPairPath q;
  q.space = opp;
  q.t = pp.t;
  q.refine_limit = pp.refine_limit;
  auto conv = [opp](const Lagrangian& l) { return Lagrangian{opp, l.frame, l.phi.adjoint()}; };
  for (const auto& l : pp.f) q.f.push_back(conv(l));
  for (const auto& l : pp.g) q.g.push_back(conv(l));
  if (pp.has_generator()) {
    auto fg = pp.f_gen, gg = pp.g_gen;
    q.f_gen = [fg, conv](double t) { return conv(fg(t)); };
    q.g_gen = [gg, conv](double t) { return conv(gg(t)); };
  }
  return q;
}

struct MaslovOrientationRecord {
  int mas_fg = 0;
  int mas_gf = 0;
  int mas_fg_opposite = 0;
  int dim_start = 0;  // dim(ker f(0) ∩ im g(0))
  int dim_end = 0;    // dim(ker f(1) ∩ im g(1))
};

inline MaslovOrientationRecord maslov_orientation_check(const LagrangianPairPath& pp, double tol = default_tol()) {
  MaslovOrientationRecord r;
  r.mas_fg = maslov(pp, tol).value;
  r.mas_gf = maslov(pp.swapped(), tol).value;
  r.mas_fg_opposite = maslov(with_opposite_gamma(pp), tol).value;
  r.dim_start = kernel_image_dim(pp.f.front(), pp.g.front(), tol);
  r.dim_end = kernel_image_dim(pp.f.back(), pp.g.back(), tol);
  if (r.mas_fg_opposite != r.mas_gf)
    throw Error(ErrorKind::IdentityViolation, "Mas_{-gamma}(f,g) = " + std::to_string(r.mas_fg_opposite) +
                                                  " but Mas(g,f) = " + std::to_string(r.mas_gf));
  if (r.mas_fg + r.mas_gf != r.dim_end - r.dim_start)
    throw Error(ErrorKind::IdentityViolation,
                "Mas(f,g) + Mas(g,f) = " + std::to_string(r.mas_fg + r.mas_gf) + " but endpoint dims give " +
                    std::to_string(r.dim_end - r.dim_start));
  return r;
}

inline void require_same_space(const Lagrangian& a, const Lagrangian& b) {
  if (a.space->dim() != b.space->dim())
    throw Error(ErrorKind::DimensionMismatch, "Lagrangians live in different spaces");
}

inline int tau_mu(const Lagrangian& p, const Lagrangian& q, const Lagrangian& r, double tol = default_tol()) {
  require_same_space(p, q);
  require_same_space(q, r);
  cplx s = (tr_log(transition(p, q), tol) + tr_log(transition(q, r), tol) - tr_log(transition(p, r), tol)) /
           (2.0 * pi * I_unit);
  if (std::abs(s.imag()) >= kIntegerResidue)
    throw Error(ErrorKind::NonIntegerResult, "tau_mu has imaginary part " + std::to_string(s.imag()));
  return checked_integer(s.real(), "tau_mu");
}

inline int tau_mu_via_tau_w(const Lagrangian& p, const Lagrangian& q, const Lagrangian& r,
                            double tol = default_tol()) {
  return -tau_w(transition(p, q), transition(q, r), tol).value;
}

inline double m_H(const Lagrangian& v, const Lagrangian& w, double tol = default_tol()) {
  require_same_space(v, w);
  if (v.space->n == 0) return 0.0;
  PhaseClassification c = classify_phases(relative_phases(v, w), tol);
  double m = 0.0;
  for (double psi : c.others) m += psi > 0 ? 1.0 - psi / pi : -1.0 - psi / pi;
  return m;
}

struct TsigResult {
  int value = 0;
  double residue = 0.0;
};

inline TsigResult tsig(const Lagrangian& v, const Lagrangian& w, const Lagrangian& u, double tol = default_tol()) {
  double s = m_H(v, w, tol) + m_H(w, u, tol) + m_H(u, v, tol);
  TsigResult r;
  r.value = checked_integer(s, "tsig");
  r.residue = std::abs(s - r.value);
  return r;
}

struct ConversionRecord {
  int tsig = 0;
  int tsig_from_tau = 0;
  int tau = 0;
  int tau_from_tsig_times4 = 0;  // four times tau_mu, as an integer
};

// sigma~ in terms of four triple indices, and tau_mu in terms of four sigma~
// values, each corrected by intersection dimensions.
inline ConversionRecord tsig_tau_mu_conversion(const Lagrangian& v, const Lagrangian& w, const Lagrangian& u,
                                               double tol = default_tol()) {
  const Lagrangian gv = gamma_image(v), gw = gamma_image(w), gu = gamma_image(u);
  auto d = [tol](const Lagrangian& a, const Lagrangian& b) { return intersection_dim(a, b, tol); };
  ConversionRecord r;
  r.tsig = tsig(v, w, u, tol).value;
  r.tau = tau_mu(v, w, u, tol);
  r.tsig_from_tau = r.tau - tau_mu(gv, w, u, tol) - tau_mu(v, gw, u, tol) - tau_mu(v, w, gu, tol) + d(v, w) +
                    d(w, u) - d(v, u);
  r.tau_from_tsig_times4 = r.tsig - tsig(gv, w, u, tol).value - tsig(v, gw, u, tol).value -
                           tsig(v, w, gu, tol).value + 2 * d(gv, w) + 2 * d(w, gu) - 2 * d(v, gu);
  if (r.tsig_from_tau != r.tsig)
    throw Error(ErrorKind::IdentityViolation, "tsig = " + std::to_string(r.tsig) + " but the triple-index form gives " +
                                                  std::to_string(r.tsig_from_tau));
  if (r.tau_from_tsig_times4 != 4 * r.tau)
    throw Error(ErrorKind::IdentityViolation, "4 tau_mu = " + std::to_string(4 * r.tau) +
                                                  " but the tsig form gives " + std::to_string(r.tau_from_tsig_times4));
  return r;
}

// Relations of the triple index under permutations and repeated arguments.
struct TripleRelations {
  bool prq = false;  // tau(P,R,Q) = -tau(P,Q,R) + dim(ker Q ∩ im R)
  bool qpr = false;  // tau(Q,P,R) = -tau(P,Q,R) + dim(ker P ∩ im Q)
  bool rqp = false;  // tau(R,Q,P) = -tau(P,Q,R) + kpq + kqr - kpr
  bool repeated_zero = false;  // tau(P,P,Q) = tau(Q,P,P) = 0
  bool repeated_dim = false;   // tau(P,Q,P) = dim(ker P ∩ im Q)
  bool tau_w_form = false;     // trace-log and tau_w definitions agree
  bool all() const { return prq && qpr && rqp && repeated_zero && repeated_dim && tau_w_form; }
};

inline TripleRelations triple_relations(const Lagrangian& p, const Lagrangian& q, const Lagrangian& r,
                                        double tol = default_tol()) {
  TripleRelations t;
  const int pqr = tau_mu(p, q, r, tol);
  const int kpq = kernel_image_dim(p, q, tol), kqr = kernel_image_dim(q, r, tol), kpr = kernel_image_dim(p, r, tol);
  t.prq = tau_mu(p, r, q, tol) == -pqr + kqr;
  t.qpr = tau_mu(q, p, r, tol) == -pqr + kpq;
  t.rqp = tau_mu(r, q, p, tol) == -pqr + kpq + kqr - kpr;
  t.repeated_zero = tau_mu(p, p, q, tol) == 0 && tau_mu(q, p, p, tol) == 0;
  t.repeated_dim = tau_mu(p, q, p, tol) == kpq;
  t.tau_w_form = tau_mu_via_tau_w(p, q, r, tol) == pqr;
  return t;
}

}  // namespace symflow
