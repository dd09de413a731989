#pragma once

#include <functional>
#include <vector>

#include "symflow/linalg.hpp"
#include "symflow/unitary.hpp"

namespace symflow {

using HermitianGenerator = std::function<Mat(double)>;

struct HermitianPath {
  std::vector<double> t;
  std::vector<Mat> h;
  HermitianGenerator generator;  // optional
  int refine_limit = 40;

  static HermitianPath from_generator(HermitianGenerator g, double t0, double t1, int initial = 16) {
    HermitianPath p;
    p.generator = std::move(g);
    for (int k = 0; k <= initial; ++k) {
      double t = t0 + (t1 - t0) * k / initial;
      p.t.push_back(t);
      p.h.push_back(p.generator(t));
    }
    return p;
  }

  static HermitianPath from_samples(std::vector<double> ts, std::vector<Mat> hs) {
    HermitianPath p;
    p.t = std::move(ts);
    p.h = std::move(hs);
    return p;
  }
};

inline RVec hermitian_eigenvalues(const Mat& h) {
  if (h.rows() == 0) return RVec(0);
  Mat s = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline void require_hermitian(const Mat& h, const char* what) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not square");
  double dev = max_abs(h - h.adjoint());
  if (dev > 1e-9)
    throw Error(ErrorKind::NotHermitian, std::string(what) + " deviates from Hermitian by " + std::to_string(dev));
}

// The zero threshold shared by the spectral flow and eta: |lambda| < tol ||H||.
struct SpectrumClass {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  int nonnegative() const { return zero + positive; }
};

inline double zero_threshold(const RVec& ev, double tol) {
  double norm = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  return tol * norm;
}

inline SpectrumClass classify_spectrum(const RVec& ev, double tol, bool strict) {
  SpectrumClass c;
  const double thr = zero_threshold(ev, tol);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double a = std::abs(ev(i));
    if (strict && thr > 0 && a > thr / 4.0 && a < 4.0 * thr)
      throw Error(ErrorKind::ToleranceAmbiguity,
                  "eigenvalue " + std::to_string(ev(i)) + " is within the decision band around zero");
    if (a <= thr || ev(i) == 0.0)
      ++c.zero;
    else if (ev(i) > 0)
      ++c.positive;
    else
      ++c.negative;
  }
  return c;
}

struct EtaFinite {
  int eta = 0;
  int dim_ker = 0;
  double eta_tilde = 0.0;
};

inline EtaFinite eta_finite(const Mat& h, double tol = default_tol()) {
  require_hermitian(h, "H");
  SpectrumClass c = classify_spectrum(hermitian_eigenvalues(h), tol, true);
  EtaFinite e;
  e.eta = c.positive - c.negative;
  e.dim_ker = c.zero;
  e.eta_tilde = 0.5 * (e.eta + e.dim_ker);
  return e;
}

struct SpectralFlowResult {
  int value = 0;
  std::size_t samples = 0;
  CrossingLog log;
};

// (-eps,-eps) spectral flow: net number of eigenvalues arriving in [0, inf)
// minus those leaving it, with zero eigenvalues counted as nonnegative.
inline SpectralFlowResult spectral_flow(const HermitianPath& path, double tol = default_tol()) {
  if (path.t.size() != path.h.size() || path.t.empty())
    throw Error(ErrorKind::DimensionMismatch, "path needs at least one sample");
  const Eigen::Index k = path.h.front().rows();
  for (const Mat& m : path.h) {
    if (m.rows() != k) throw Error(ErrorKind::DimensionMismatch, "path samples differ in size");
    require_hermitian(m, "path sample");
  }
  auto count_at = [&](const Mat& h, bool strict) { return classify_spectrum(hermitian_eigenvalues(h), tol, strict); };

  // Accept a step when every eigenvalue that keeps its side of zero moves by
  // less than three quarters of its larger endpoint distance to zero (an eigenvalue
  // leaving zero linearly moves by exactly half of it on every bisection).
  auto step_ok = [&](const RVec& a, const RVec& b) {
    const double thr = std::max(zero_threshold(a, tol), zero_threshold(b, tol));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      bool a_nn = a(i) >= -thr, b_nn = b(i) >= -thr;
      if (a_nn != b_nn) continue;
      if (std::min(std::abs(a(i)), std::abs(b(i))) <= thr) continue;
      double gap = std::max(std::abs(a(i)), std::abs(b(i)));
      if (std::abs(b(i) - a(i)) >= 0.75 * gap) return false;
    }
    return true;
  };

  SpectralFlowResult res;
  std::vector<double> ts{path.t.front()};
  std::vector<Mat> hs{path.h.front()};
  std::function<void(double, const Mat&, double, const Mat&, int)> add;
  add = [&](double ta, const Mat& ha, double tb, const Mat& hb, int depth) {
    RVec ea = hermitian_eigenvalues(ha), eb = hermitian_eigenvalues(hb);
    bool ok = step_ok(ea, eb);
    Mat hm;
    if (ok && path.generator) {
      hm = path.generator(0.5 * (ta + tb));
      RVec em = hermitian_eigenvalues(hm);
      ok = step_ok(ea, em) && step_ok(em, eb);
    }
    if (ok) {
      ts.push_back(tb);
      hs.push_back(hb);
      return;
    }
    if (!path.generator)
      throw Error(ErrorKind::RefinementExhausted,
                  "sampled step [" + std::to_string(ta) + ", " + std::to_string(tb) +
                      "] moves eigenvalues by more than half their distance to zero and no generator is available");
    if (depth >= path.refine_limit)
      throw Error(ErrorKind::RefinementExhausted, "step invariant unreachable near t = " + std::to_string(ta));
    double tm = 0.5 * (ta + tb);
    if (hm.size() == 0) hm = path.generator(tm);
    add(ta, ha, tm, hm, depth + 1);
    add(tm, hm, tb, hb, depth + 1);
  };
  for (std::size_t j = 0; j + 1 < path.t.size(); ++j) add(path.t[j], path.h[j], path.t[j + 1], path.h[j + 1], 0);
  res.samples = ts.size();

  std::vector<int> nn;
  nn.reserve(hs.size());
  for (std::size_t j = 0; j < hs.size(); ++j) {
    bool endpoint = j == 0 || j + 1 == hs.size();
    nn.push_back(count_at(hs[j], endpoint).nonnegative());
  }
  for (std::size_t j = 0; j + 1 < hs.size(); ++j) {
    int delta = nn[j + 1] - nn[j];
    if (delta == 0) continue;
    res.value += delta;
    double tc = ts[j + 1];
    if (path.generator) {
      double lo = ts[j], hi = ts[j + 1];
      for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        double tm = 0.5 * (lo + hi);
        if (count_at(path.generator(tm), false).nonnegative() == nn[j])
          lo = tm;
        else
          hi = tm;
      }
      tc = hi;
    }
    int dir = delta > 0 ? 1 : -1;
    for (int q = 0; q < std::abs(delta); ++q) res.log.crossings.push_back(Crossing{tc, dir, 0.0, 0.0});
  }
  res.log.total = res.value;
  return res;
}

struct SfEtaRecord {
  int sf = 0;
  double eta_tilde_start = 0.0;
  double eta_tilde_end = 0.0;
};

inline SfEtaRecord sf_eta_consistency(const HermitianPath& path, double tol = default_tol()) {
  SfEtaRecord r;
  r.sf = spectral_flow(path, tol).value;
  r.eta_tilde_start = eta_finite(path.h.front(), tol).eta_tilde;
  r.eta_tilde_end = eta_finite(path.h.back(), tol).eta_tilde;
  if (r.eta_tilde_end - r.eta_tilde_start != static_cast<double>(r.sf))
    throw Error(ErrorKind::IdentityViolation, "eta~ changes by " + std::to_string(r.eta_tilde_end - r.eta_tilde_start) +
                                                  " but SF = " + std::to_string(r.sf));
  return r;
}

}  // namespace symflow
