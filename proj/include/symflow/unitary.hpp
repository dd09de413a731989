#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symflow/linalg.hpp"

namespace symflow {

// Sum of logarithms of the eigenvalues with arg in (-pi, pi]; eigenvalues
// within angular tol of -1 get log = i pi.
inline cplx tr_log(const Mat& u, double tol = default_tol()) {
  cplx sum = 0.0;
  for (const cplx& z : eigenvalues(u)) {
    double a = std::arg(z);
    if (pi - std::abs(a) < tol) a = pi;
    sum += cplx(std::log(std::abs(z)), a);
  }
  return sum;
}

inline int dim_ker_plus_identity(const Mat& u, double tol = default_tol()) {
  int k = 0;
  for (double p : eigenphases(u))
    if (pi - std::abs(p) < tol) ++k;
  return k;
}

struct Crossing {
  double t = 0.0;
  int direction = 0;
  double phase_before = 0.0;
  double phase_after = 0.0;
};

struct CrossingLog {
  std::vector<Crossing> crossings;
  int total = 0;
};

using UnitaryGenerator = std::function<Mat(double)>;

struct UnitaryPath {
  std::vector<double> t;
  std::vector<Mat> u;
  UnitaryGenerator generator;  // optional
  int refine_limit = 40;

  static UnitaryPath from_generator(UnitaryGenerator g, double t0, double t1, int initial = 16) {
    UnitaryPath p;
    p.generator = std::move(g);
    for (int k = 0; k <= initial; ++k) {
      double t = t0 + (t1 - t0) * k / initial;
      p.t.push_back(t);
      p.u.push_back(p.generator(t));
    }
    return p;
  }

  static UnitaryPath from_samples(std::vector<double> ts, std::vector<Mat> us) {
    UnitaryPath p;
    p.t = std::move(ts);
    p.u = std::move(us);
    return p;
  }

  double t0() const { return t.front(); }
  double t1() const { return t.back(); }
};

struct WindResult {
  int value = 0;
  int by_arg_det = 0;
  int by_counting = 0;
  double epsilon = 0.0;
  std::size_t samples = 0;
  CrossingLog log;
};

namespace detail {

// Eigenphases at one sample, shifted by -eps, with values within tol of -1
// snapped to exactly pi.
inline std::vector<double> shifted_phases(const Mat& u, double eps, double tol) {
  std::vector<double> out;
  for (const cplx& z : eigenvalues(u)) {
    double a = std::arg(z);
    if (pi - std::abs(a) < tol) a = pi;
    a = wrap_angle(a - eps);
    if (pi - std::abs(a) < tol) a = pi;
    out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Bottleneck matching of two eigenphase sets on the circle by cyclic shift of
// the sorted lists; returns per-eigenvalue signed displacements.
inline std::vector<double> match_displacements(const std::vector<double>& a, const std::vector<double>& b,
                                               double* worst) {
  const std::size_t k = a.size();
  std::vector<double> best;
  double best_cost = 1e300;
  for (std::size_t r = 0; r < std::max<std::size_t>(k, 1); ++r) {
    std::vector<double> d(k);
    double cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      d[i] = wrap_angle(b[(i + r) % k] - a[i]);
      cost = std::max(cost, std::abs(d[i]));
    }
    if (cost < best_cost - 1e-15) {
      best_cost = cost;
      best = std::move(d);
    }
  }
  *worst = k ? best_cost : 0.0;
  return best;
}

// Number of passes through -1 (angles pi + 2 pi m) on the way to an unwrapped
// angle; an angle exactly at pi has not yet passed.
inline int passes(double theta, double tol) {
  double x = (theta - pi) / (2.0 * pi);
  double r = std::round(x);
  if (std::abs(x - r) * 2.0 * pi < tol) x = r;
  return static_cast<int>(std::ceil(x));
}

inline double chord_for_angle(double angle) { return 2.0 * std::sin(angle / 2.0); }

}  // namespace detail

// Winding number: signed count of eigenvalues crossing -1, with the endpoint
// convention wind(f) := wind(f e^{-i eps}).
inline WindResult wind(const UnitaryPath& path, double tol = default_tol()) {
  if (path.t.size() != path.u.size() || path.t.empty())
    throw Error(ErrorKind::DimensionMismatch, "path needs at least one sample");
  const Eigen::Index k = path.u.front().rows();
  for (const Mat& m : path.u) {
    if (m.rows() != k || m.cols() != k) throw Error(ErrorKind::DimensionMismatch, "path samples differ in size");
    require_unitary(m, 1e-9, "path sample");
  }
  WindResult res;
  if (k == 0) return res;

  // Step invariant: bounded eigenvalue motion per step. Generator-backed paths
  // are refined further so that the determinant phase is also unambiguous.
  const double sample_chord = std::sqrt(2.0);
  const double gen_angle = std::min(pi / 4.0, pi / (2.0 * static_cast<double>(k)));
  const double gen_chord = detail::chord_for_angle(gen_angle);

  std::vector<double> ts;
  std::vector<Mat> us;
  ts.push_back(path.t.front());
  us.push_back(path.u.front());
  std::function<void(double, const Mat&, double, const Mat&, int)> add_step;
  add_step = [&](double ta, const Mat& ua, double tb, const Mat& ub, int depth) {
    double c = op_norm(ub - ua);
    bool ok = path.generator ? c < gen_chord : c < sample_chord;
    if (ok) {
      ts.push_back(tb);
      us.push_back(ub);
      return;
    }
    if (!path.generator)
      throw Error(ErrorKind::RefinementExhausted,
                  "sampled step [" + std::to_string(ta) + ", " + std::to_string(tb) + "] moves by " +
                      std::to_string(c) + " >= sqrt(2) and no generator is available");
    if (depth >= path.refine_limit)
      throw Error(ErrorKind::RefinementExhausted,
                  "step invariant unreachable near t = " + std::to_string(ta));
    double tm = 0.5 * (ta + tb);
    Mat um = path.generator(tm);
    add_step(ta, ua, tm, um, depth + 1);
    add_step(tm, um, tb, ub, depth + 1);
  };
  for (std::size_t j = 0; j + 1 < path.t.size(); ++j)
    add_step(path.t[j], path.u[j], path.t[j + 1], path.u[j + 1], 0);
  res.samples = ts.size();

  // Endpoint convention: eps is half the smallest nonzero distance of the
  // endpoint eigenphases to pi.
  double dmin = 1e300;
  for (const Mat* end : {&us.front(), &us.back()})
    for (double p : eigenphases(*end)) {
      double d = pi - std::abs(p);
      if (d >= tol) dmin = std::min(dmin, d);
    }
  const double eps = dmin < 1e299 ? 0.5 * dmin : 0.5 * pi;
  res.epsilon = eps;

  std::vector<std::vector<double>> ph;
  ph.reserve(us.size());
  for (const Mat& m : us) ph.push_back(detail::shifted_phases(m, eps, tol));

  // (b) per-step crossing count
  int count_b = 0;
  // (a) continuous arg det
  double arg_sum = 0.0;
  const cplx rot = std::polar(1.0, -eps * static_cast<double>(k));
  for (std::size_t j = 0; j + 1 < us.size(); ++j) {
    double worst = 0.0;
    std::vector<double> d = detail::match_displacements(ph[j], ph[j + 1], &worst);
    if (worst >= pi / 2.0)
      throw Error(ErrorKind::RefinementExhausted,
                  "eigenphase transport ambiguous on step at t = " + std::to_string(ts[j]));
    for (std::size_t i = 0; i < d.size(); ++i) {
      double start = ph[j][i];
      int c = detail::passes(start + d[i], tol) - detail::passes(start, tol);
      if (c == 0) continue;
      count_b += c;
      Crossing cr;
      cr.direction = c;
      cr.phase_before = start;
      cr.phase_after = wrap_angle(start + d[i]);
      // Locate the crossing inside the step.
      double ta = ts[j], tb = ts[j + 1];
      if (path.generator) {
        double lo = ta, hi = tb;
        const auto& base = ph[j];
        auto crossed = [&](double tm) {
          std::vector<double> pm = detail::shifted_phases(path.generator(tm), eps, tol);
          double w = 0.0;
          std::vector<double> dm = detail::match_displacements(base, pm, &w);
          int n = 0;
          for (std::size_t q = 0; q < dm.size(); ++q)
            n += (detail::passes(base[q] + dm[q], tol) - detail::passes(base[q], tol)) == c;
          return n > 0;
        };
        for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
          double tm = 0.5 * (lo + hi);
          if (crossed(tm))
            hi = tm;
          else
            lo = tm;
        }
        cr.t = hi;
      } else {
        double target = c > 0 ? pi : -pi;
        double frac = d[i] != 0.0 ? (target - start) / d[i] : 0.5;
        frac = std::clamp(frac, 0.0, 1.0);
        cr.t = ta + frac * (tb - ta);
      }
      res.log.crossings.push_back(cr);
    }
    cplx ratio = us[j + 1].determinant() / us[j].determinant();
    arg_sum += std::arg(ratio);
  }
  res.log.total = count_b;
  Mat first = us.front() * std::polar(1.0, -eps);
  Mat last = us.back() * std::polar(1.0, -eps);
  (void)rot;
  double a_val = (arg_sum - tr_log(last, tol).imag() + tr_log(first, tol).imag()) / (2.0 * pi);
  int count_a = static_cast<int>(std::lround(a_val));
  if (std::abs(a_val - count_a) > 1e-6)
    throw Error(ErrorKind::MethodDisagreement, "arg-det winding is not an integer: " + std::to_string(a_val));
  res.by_arg_det = count_a;
  res.by_counting = count_b;
  if (count_a != count_b)
    throw Error(ErrorKind::MethodDisagreement, "arg-det tracking gives " + std::to_string(count_a) +
                                                   ", crossing count gives " + std::to_string(count_b));
  res.value = count_b;
  return res;
}

struct TauW {
  int value = 0;
  double residue = 0.0;
};

inline TauW tau_w(const Mat& u, const Mat& v, double tol = default_tol()) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw Error(ErrorKind::DimensionMismatch, "tau_w arguments differ in size");
  cplx s = (tr_log(u * v, tol) - tr_log(u, tol) - tr_log(v, tol)) / (2.0 * pi * I_unit);
  TauW r;
  r.value = checked_integer(s.real(), "tau_w");
  r.residue = std::max(std::abs(s.real() - r.value), std::abs(s.imag()));
  if (std::abs(s.imag()) >= kIntegerResidue)
    throw Error(ErrorKind::NonIntegerResult, "tau_w has imaginary part " + std::to_string(s.imag()));
  return r;
}

// Matrix logarithm with the tr_log branch, for normal (unitary) matrices.
inline Mat branch_log(const Mat& u, double tol = default_tol()) {
  Eigen::ComplexSchur<Mat> schur(u);
  const Mat& t = schur.matrixT();
  const Mat& z = schur.matrixU();
  Vec d(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    cplx lam = t(i, i);
    double a = std::arg(lam);
    if (pi - std::abs(a) < tol) a = pi;
    d(i) = cplx(std::log(std::abs(lam)), a);
  }
  return z * d.asDiagonal() * z.adjoint();
}

inline Mat unitary_exp_of_log(const Mat& log_u, double s) {
  // log_u is normal with imaginary spectrum: use its Schur form.
  Eigen::ComplexSchur<Mat> schur(log_u);
  const Mat& t = schur.matrixT();
  const Mat& z = schur.matrixU();
  Vec d(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) d(i) = std::exp(s * t(i, i));
  return z * d.asDiagonal() * z.adjoint();
}

// tau_w from its path definition with f = exp(s log U), g = exp(s log V).
inline int tau_w_by_paths(const Mat& u, const Mat& v, double tol = default_tol()) {
  Mat lu = branch_log(u, tol), lv = branch_log(v, tol);
  auto f = [lu](double s) { return unitary_exp_of_log(lu, s); };
  auto g = [lv](double s) { return unitary_exp_of_log(lv, s); };
  auto fg = [lu, lv](double s) { return Mat(unitary_exp_of_log(lu, s) * unitary_exp_of_log(lv, s)); };
  int wf = wind(UnitaryPath::from_generator(f, 0.0, 1.0), tol).value;
  int wg = wind(UnitaryPath::from_generator(g, 0.0, 1.0), tol).value;
  int wfg = wind(UnitaryPath::from_generator(fg, 0.0, 1.0), tol).value;
  return wf + wg - wfg;
}

inline UnitaryPath inverse_path(const UnitaryPath& p) {
  UnitaryPath q;
  q.t = p.t;
  for (const Mat& m : p.u) q.u.push_back(m.adjoint());
  if (p.generator) {
    auto g = p.generator;
    q.generator = [g](double t) { return Mat(g(t).adjoint()); };
  }
  q.refine_limit = p.refine_limit;
  return q;
}

struct WindInverseRecord {
  int wind_f = 0;
  int wind_f_inverse = 0;
  int ker_start = 0;
  int ker_end = 0;
};

inline WindInverseRecord wind_plus_inverse_check(const UnitaryPath& p, double tol = default_tol()) {
  WindInverseRecord r;
  r.wind_f = wind(p, tol).value;
  r.wind_f_inverse = wind(inverse_path(p), tol).value;
  r.ker_start = dim_ker_plus_identity(p.u.front(), tol);
  r.ker_end = dim_ker_plus_identity(p.u.back(), tol);
  if (r.wind_f + r.wind_f_inverse != r.ker_start - r.ker_end)
    throw Error(ErrorKind::IdentityViolation,
                "wind(f) + wind(f^-1) = " + std::to_string(r.wind_f + r.wind_f_inverse) +
                    " but dim ker(f(0)+I) - dim ker(f(1)+I) = " + std::to_string(r.ker_start - r.ker_end));
  return r;
}

// Concatenation f1 * f2 (f2 starting where f1 ends), reparameterized on [0, 1].
inline UnitaryPath concatenate(const UnitaryPath& f1, const UnitaryPath& f2) {
  UnitaryPath p;
  auto remap = [](double t, double a, double b, double lo, double hi) {
    return lo + (t - a) / (b - a) * (hi - lo);
  };
  for (std::size_t j = 0; j < f1.t.size(); ++j) {
    p.t.push_back(remap(f1.t[j], f1.t0(), f1.t1(), 0.0, 0.5));
    p.u.push_back(f1.u[j]);
  }
  for (std::size_t j = 1; j < f2.t.size(); ++j) {
    p.t.push_back(remap(f2.t[j], f2.t0(), f2.t1(), 0.5, 1.0));
    p.u.push_back(f2.u[j]);
  }
  if (f1.generator && f2.generator) {
    auto g1 = f1.generator, g2 = f2.generator;
    double a1 = f1.t0(), b1 = f1.t1(), a2 = f2.t0(), b2 = f2.t1();
    p.generator = [=](double t) {
      return t <= 0.5 ? g1(a1 + t / 0.5 * (b1 - a1)) : g2(a2 + (t - 0.5) / 0.5 * (b2 - a2));
    };
  }
  return p;
}

}  // namespace symflow
