#include "dunkl_lab/bellman.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "dunkl_lab/parallel.hpp"
#include "dunkl_lab/quadrature.hpp"

namespace dunkl {

namespace {

constexpr double kGap = 1e-9;
constexpr double kPi = 3.14159265358979323846;

void need(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_blocks(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  if (static_cast<int>(eta.size()) != bp.N1 || static_cast<int>(zeta.size()) != bp.N2)
    throw std::invalid_argument("block dimensions do not match N1, N2");
}

double ap(const BellmanParams& bp) { return 1.0 + 2.0 * bp.gamma / bp.p; }
double aq(const BellmanParams& bp) { return 1.0 + bp.gamma * (2.0 / bp.q - 1.0); }

// pointwise value, gradient and Hessian of B on the branch given by r1 (row-major H, eta block first)
void pointwise(const BellmanParams& bp, const double* x, bool r1, double& v, double* g, double* H) {
  const int n1 = bp.N1, d = bp.dim();
  const double p = bp.p, q = bp.q, ga = bp.gamma;
  double e2 = 0.0, z2 = 0.0;
  for (int i = 0; i < n1; ++i) e2 += x[i] * x[i];
  for (int i = n1; i < d; ++i) z2 += x[i] * x[i];
  const double ne = std::sqrt(e2), nz = std::sqrt(z2);
  const double lp = p == 2.0 ? 1.0 : std::pow(ne, p - 2.0);  // |eta|^{p-2}
  const double lq = q == 2.0 ? 1.0 : std::pow(nz, q - 2.0);  // |zeta|^{q-2}
  const double ep = lp * e2, zq = lq * z2;
  const double lp4 = (p == 2.0 || ne == 0.0) ? 0.0 : lp / e2;  // |eta|^{p-4}
  const double lq4 = (q == 2.0 || nz == 0.0) ? 0.0 : lq / z2;
  for (int i = 0; i < d * d; ++i) H[i] = 0.0;
  if (r1) {
    const double T = 1.0 / lq;    // |zeta|^{2-q}
    const double Tm = 1.0 / zq;   // |zeta|^{-q}
    v = 0.5 * (ep + zq + ga * e2 * T);
    const double ce = 0.5 * (p * lp + 2.0 * ga * T);
    const double cz = 0.5 * (q * lq + ga * e2 * (2.0 - q) * Tm);
    for (int i = 0; i < n1; ++i) g[i] = ce * x[i];
    for (int i = n1; i < d; ++i) g[i] = cz * x[i];
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n1; ++j) H[i * d + j] = 0.5 * p * (p - 2.0) * lp4 * x[i] * x[j];
      H[i * d + i] += 0.5 * p * lp + ga * T;
      for (int j = n1; j < d; ++j) H[i * d + j] = H[j * d + i] = ga * (2.0 - q) * Tm * x[i] * x[j];
    }
    const double c2 = 0.5 * ga * (2.0 - q) * e2;
    for (int i = n1; i < d; ++i) {
      for (int j = n1; j < d; ++j)
        H[i * d + j] = 0.5 * q * (q - 2.0) * lq4 * x[i] * x[j] - c2 * q * Tm / z2 * x[i] * x[j];
      H[i * d + i] += 0.5 * q * lq + c2 * Tm;
    }
  } else {
    const double a = ap(bp), b = aq(bp);
    v = 0.5 * (a * ep + b * zq);
    for (int i = 0; i < n1; ++i) g[i] = 0.5 * a * p * lp * x[i];
    for (int i = n1; i < d; ++i) g[i] = nz == 0.0 ? 0.0 : 0.5 * b * q * lq * x[i];
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n1; ++j) H[i * d + j] = 0.5 * p * a * (p - 2.0) * lp4 * x[i] * x[j];
      H[i * d + i] += 0.5 * p * a * lp;
    }
    for (int i = n1; i < d; ++i) {
      for (int j = n1; j < d; ++j) H[i * d + j] = 0.5 * q * b * (q - 2.0) * lq4 * x[i] * x[j];
      H[i * d + i] += 0.5 * q * b * lq;
    }
  }
}

bool branch_r1(const BellmanParams& bp, double ne, double nz) { return std::pow(ne, bp.p) < std::pow(nz, bp.q); }

// integral of r^j exp(-1/(1-r^2)) over [0, 1]
double radial_moment(int j) {
  const GaussRule& r = gauss_legendre(24);
  const int panels = 64;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = static_cast<double>(k) / panels, b = static_cast<double>(k + 1) / panels;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * r.nodes[i];
      acc += 0.5 * (b - a) * r.weights[i] * std::pow(x, j) * std::exp(-1.0 / (1.0 - x * x));
    }
  }
  return acc;
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

// marginals of the planar bump: psi(y) = int phi(t, y) dt, chi(y) = int t^2 phi(t, y) dt
class MarginalTable {
 public:
  MarginalTable() {
    const double c = mollifier_constant(2);
    const GaussRule& r = gauss_legendre(16);
    const int panels = 16;
    psi_.assign(static_cast<std::size_t>(M + 1 + 2 * pad), 0.0);
    chi_ = psi_;
    for (int i = 0; i <= M; ++i) {
      const double y = static_cast<double>(i) / M;
      const double s2 = 1.0 - y * y;
      if (s2 <= 0.0) continue;
      const double s = std::sqrt(s2);
      double a0 = 0.0, a2 = 0.0;
      for (int k = 0; k < panels; ++k) {
        const double lo = -s + 2.0 * s * k / panels, hi = lo + 2.0 * s / panels;
        for (std::size_t j = 0; j < r.nodes.size(); ++j) {
          const double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * r.nodes[j];
          const double den = s2 - t * t;
          if (den <= 0.0) continue;
          const double w = 0.5 * (hi - lo) * r.weights[j] * std::exp(-1.0 / den);
          a0 += w;
          a2 += w * t * t;
        }
      }
      psi_[static_cast<std::size_t>(i + pad)] = c * a0;
      chi_[static_cast<std::size_t>(i + pad)] = c * a2;
    }
    for (int i = 1; i <= pad; ++i) {
      psi_[static_cast<std::size_t>(pad - i)] = psi_[static_cast<std::size_t>(pad + i)];
      chi_[static_cast<std::size_t>(pad - i)] = chi_[static_cast<std::size_t>(pad + i)];
    }
  }
  double psi(double y) const { return interp(psi_, y); }
  double chi(double y) const { return interp(chi_, y); }

 private:
  static constexpr int M = 4096;
  static constexpr int pad = 4;
  std::vector<double> psi_, chi_;

  // 6-point Lagrange on the uniform table, even in y and zero past 1
  static double interp(const std::vector<double>& tab, double y) {
    y = std::abs(y);
    if (y >= 1.0) return 0.0;
    const double u = y * M;
    int i0 = static_cast<int>(std::floor(u)) - 2;
    double acc = 0.0;
    for (int a = 0; a < 6; ++a) {
      double l = 1.0;
      for (int b = 0; b < 6; ++b)
        if (b != a) l *= (u - (i0 + b)) / static_cast<double>(a - b);
      const int idx = i0 + a + pad;
      if (idx >= 0 && idx < static_cast<int>(tab.size())) acc += l * tab[static_cast<std::size_t>(idx)];
    }
    return acc;
  }
};

const MarginalTable& marginals() {
  static const MarginalTable t;
  return t;
}

using Triple = std::array<double, 3>;

// |x|^a with its first two derivatives
Triple pow_jet(double x, double a) {
  const double ax = std::abs(x);
  if (ax == 0.0) return {0.0, 0.0, a == 2.0 ? 2.0 : 0.0};
  const double l = a == 2.0 ? 1.0 : std::pow(ax, a - 2.0);
  return {l * ax * ax, a * l * x, a * (a - 1.0) * l};
}

// int_{-1}^{1} w(y) F(x - k y) dy with derivatives in x; F may be singular at 0, graded by y = y* +- L v^m there
template <class W, class F>
Triple conv1(const W& w, const F& f, double x, double k, double m, int n) {
  const GaussRule& r = gauss_legendre(n);
  Triple acc{0.0, 0.0, 0.0};
  auto add = [&](double y, double wt) {
    const double ww = w(y) * wt;
    if (ww == 0.0) return;
    const Triple v = f(x - k * y);
    for (int i = 0; i < 3; ++i) acc[static_cast<std::size_t>(i)] += ww * v[static_cast<std::size_t>(i)];
  };
  const double ys = x / k;
  if (ys > -1.0 && ys < 1.0) {
    for (int side = -1; side <= 1; side += 2) {
      const double L = side < 0 ? ys + 1.0 : 1.0 - ys;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double v = 0.5 * (1.0 + r.nodes[i]);
        add(ys + side * L * std::pow(v, m), 0.5 * r.weights[i] * L * m * std::pow(v, m - 1.0));
      }
    }
  } else {
    for (std::size_t i = 0; i < r.nodes.size(); ++i) add(r.nodes[i], r.weights[i]);
  }
  return acc;
}

constexpr int kConvNodes = 64;

Jet make_jet(int d) {
  Jet j;
  j.grad.assign(static_cast<std::size_t>(d), 0.0);
  j.hess.assign(static_cast<std::size_t>(d * d), 0.0);
  return j;
}

Jet quadratic_jet(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  const int d = bp.dim();
  Jet j = make_jet(d);
  const double a = 1.0 + bp.gamma;
  const double mu = mollifier_second_moment(d) * bp.kappa * bp.kappa;
  j.value = 0.5 * mu * (a * bp.N1 + bp.N2);
  for (int i = 0; i < d; ++i) {
    const double c = i < bp.N1 ? a : 1.0;
    const double x = i < bp.N1 ? eta[static_cast<std::size_t>(i)] : zeta[static_cast<std::size_t>(i - bp.N1)];
    j.value += 0.5 * c * x * x;
    j.grad[static_cast<std::size_t>(i)] = c * x;
    j.hess[static_cast<std::size_t>(i * d + i)] = c;
  }
  return j;
}

// planar case by split iterated quadrature: zeta_1 outer (graded at 0), eta_1 inner split on the branch curve
Jet planar_jet(const BellmanParams& bp, double e, double z, int nout, int nin) {
  Jet j = make_jet(2);
  const double k = bp.kappa, m = bp.p - 1.0, c = mollifier_constant(2);
  const GaussRule& ro = gauss_legendre(nout);
  const GaussRule& ri = gauss_legendre(nin);
  double acc[6] = {0, 0, 0, 0, 0, 0};
  auto inner = [&](double z1, double wo) {
    const double u2 = (z - z1) / k;
    if (std::abs(u2) >= 1.0) return;
    const double hc = k * std::sqrt(1.0 - u2 * u2);
    const double lo = e - hc, hi = e + hc;
    const double cs = std::pow(std::abs(z1), bp.q / bp.p);
    double cuts[5];
    int nc = 0;
    cuts[nc++] = lo;
    for (double s : {-cs, 0.0, cs})
      if (s > lo && s < hi && s != cuts[nc - 1]) cuts[nc++] = s;
    cuts[nc++] = hi;
    double x[2], g[2], H[4], v;
    x[1] = z1;
    for (int pc = 0; pc + 1 < nc; ++pc) {
      const double a = cuts[pc], b = cuts[pc + 1];
      for (std::size_t i = 0; i < ri.nodes.size(); ++i) {
        const double e1 = 0.5 * (a + b) + 0.5 * (b - a) * ri.nodes[i];
        const double u1 = (e - e1) / k;
        const double den = 1.0 - u1 * u1 - u2 * u2;
        if (den <= 0.0) continue;
        const double w = wo * 0.5 * (b - a) * ri.weights[i] * c * std::exp(-1.0 / den);
        if (w == 0.0) continue;
        x[0] = e1;
        pointwise(bp, x, branch_r1(bp, std::abs(e1), std::abs(z1)), v, g, H);
        acc[0] += w * v;
        acc[1] += w * g[0];
        acc[2] += w * g[1];
        acc[3] += w * H[0];
        acc[4] += w * H[1];
        acc[5] += w * H[3];
      }
    }
  };
  const double lo = z - k, hi = z + k;
  if (lo < 0.0 && hi > 0.0) {
    for (double b : {lo, hi})
      for (std::size_t i = 0; i < ro.nodes.size(); ++i) {
        const double v = 0.5 * (1.0 + ro.nodes[i]);
        inner(b * std::pow(v, m), 0.5 * ro.weights[i] * std::abs(b) * m * std::pow(v, m - 1.0));
      }
  } else {
    for (std::size_t i = 0; i < ro.nodes.size(); ++i) inner(z + k * ro.nodes[i], k * ro.weights[i]);
  }
  const double s = 1.0 / (k * k);
  j.value = acc[0] * s;
  j.grad = {acc[1] * s, acc[2] * s};
  j.hess = {acc[3] * s, acc[4] * s, acc[4] * s, acc[5] * s};
  return j;
}

Jet jet_11(const BellmanParams& bp, double e, double z) {
  const double k = bp.kappa, p = bp.p, q = bp.q, ga = bp.gamma, m = p - 1.0;
  const double ae = std::abs(e), az = std::abs(z);
  const MarginalTable& mt = marginals();
  auto psi = [&](double y) { return mt.psi(y); };
  auto chi = [&](double y) { return mt.chi(y); };
  auto Fp = [&](double x) { return pow_jet(x, p); };
  auto Fq = [&](double x) { return pow_jet(x, q); };
  auto Ft = [&](double x) { return pow_jet(x, 2.0 - q); };
  Jet j = make_jet(2);
  if (std::pow(std::max(ae - k, 0.0), p) > std::pow(az + k, q)) {
    const Triple A = conv1(psi, Fp, e, k, m, kConvNodes), B = conv1(psi, Fq, z, k, m, kConvNodes);
    const double a = ap(bp), b = aq(bp);
    j.value = 0.5 * (a * A[0] + b * B[0]);
    j.grad = {0.5 * a * A[1], 0.5 * b * B[1]};
    j.hess = {0.5 * a * A[2], 0.0, 0.0, 0.5 * b * B[2]};
    return j;
  }
  if (std::pow(ae + k, p) < std::pow(std::max(az - k, 0.0), q)) {
    const Triple A = conv1(psi, Fp, e, k, m, kConvNodes), B = conv1(psi, Fq, z, k, m, kConvNodes);
    const Triple G = conv1(psi, Ft, z, k, m, kConvNodes), X = conv1(chi, Ft, z, k, m, kConvNodes);
    const double kk = k * k;
    j.value = 0.5 * (A[0] + B[0] + ga * (e * e * G[0] + kk * X[0]));
    j.grad = {0.5 * A[1] + ga * e * G[0], 0.5 * (B[1] + ga * (e * e * G[1] + kk * X[1]))};
    const double hez = ga * e * G[1];
    j.hess = {0.5 * A[2] + ga * G[0], hez, hez, 0.5 * (B[2] + ga * (e * e * G[2] + kk * X[2]))};
    return j;
  }
  return planar_jet(bp, e, z, 64, 32);
}

// polar rule over the unit ball of R^d, d in {3, 4}
struct BallRule {
  std::vector<Vec> pts;
  std::vector<double> w;
};

BallRule make_ball_rule(int d) {
  BallRule br;
  const double c = mollifier_constant(d);
  const GaussRule& rr = gauss_legendre(12);
  std::vector<double> rn, rw;
  const int panels = 8;
  for (int k = 0; k < panels; ++k) {
    const double a = static_cast<double>(k) / panels, b = static_cast<double>(k + 1) / panels;
    for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * rr.nodes[i];
      rn.push_back(r);
      rw.push_back(0.5 * (b - a) * rr.weights[i] * std::pow(r, d - 1) * c * std::exp(-1.0 / (1.0 - r * r)));
    }
  }
  std::vector<Vec> dirs;
  std::vector<double> dw;
  const int nphi = 32;
  if (d == 3) {
    const GaussRule& ct = gauss_legendre(16);
    for (std::size_t i = 0; i < ct.nodes.size(); ++i) {
      const double cz = ct.nodes[i], sz = std::sqrt(1.0 - cz * cz);
      for (int k = 0; k < nphi; ++k) {
        const double ph = 2.0 * kPi * (k + 0.5) / nphi;
        dirs.push_back({sz * std::cos(ph), sz * std::sin(ph), cz});
        dw.push_back(ct.weights[i] * 2.0 * kPi / nphi);
      }
    }
  } else {
    const GaussRule& gc = gauss_legendre(16);
    const GaussRule& ct = gauss_legendre(12);
    for (std::size_t a = 0; a < gc.nodes.size(); ++a) {
      const double ch = 0.5 * kPi * (1.0 + gc.nodes[a]);
      const double wch = 0.5 * kPi * gc.weights[a] * std::sin(ch) * std::sin(ch);
      for (std::size_t i = 0; i < ct.nodes.size(); ++i) {
        const double cz = ct.nodes[i], sz = std::sqrt(1.0 - cz * cz);
        for (int k = 0; k < nphi; ++k) {
          const double ph = 2.0 * kPi * (k + 0.5) / nphi;
          const double s = std::sin(ch);
          dirs.push_back({std::cos(ch), s * cz, s * sz * std::cos(ph), s * sz * std::sin(ph)});
          dw.push_back(wch * ct.weights[i] * 2.0 * kPi / nphi);
        }
      }
    }
  }
  for (std::size_t i = 0; i < rn.size(); ++i)
    for (std::size_t a = 0; a < dirs.size(); ++a) {
      Vec u(static_cast<std::size_t>(d));
      for (int t = 0; t < d; ++t) u[static_cast<std::size_t>(t)] = rn[i] * dirs[a][static_cast<std::size_t>(t)];
      br.pts.push_back(std::move(u));
      br.w.push_back(rw[i] * dw[a]);
    }
  return br;
}

const BallRule& ball_rule(int d) {
  static const BallRule r3 = make_ball_rule(3);
  static const BallRule r4 = make_ball_rule(4);
  return d == 3 ? r3 : r4;
}

Jet polar_jet(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  const int d = bp.dim();
  const BallRule& br = ball_rule(d);
  Jet j = make_jet(d);
  std::vector<double> x(static_cast<std::size_t>(d)), g(static_cast<std::size_t>(d)), H(static_cast<std::size_t>(d * d));
  for (std::size_t n = 0; n < br.pts.size(); ++n) {
    double e2 = 0.0, z2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double c = i < bp.N1 ? eta[static_cast<std::size_t>(i)] : zeta[static_cast<std::size_t>(i - bp.N1)];
      x[static_cast<std::size_t>(i)] = c - bp.kappa * br.pts[n][static_cast<std::size_t>(i)];
      (i < bp.N1 ? e2 : z2) += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    }
    double v;
    pointwise(bp, x.data(), branch_r1(bp, std::sqrt(e2), std::sqrt(z2)), v, g.data(), H.data());
    const double w = br.w[n];
    j.value += w * v;
    for (int i = 0; i < d; ++i) j.grad[static_cast<std::size_t>(i)] += w * g[static_cast<std::size_t>(i)];
    for (int i = 0; i < d * d; ++i) j.hess[static_cast<std::size_t>(i)] += w * H[static_cast<std::size_t>(i)];
  }
  return j;
}

double norm2_range(const Vec& v, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = a; i < b; ++i) s += v[i] * v[i];
  return s;
}

std::string join(const Vec& v) {
  std::ostringstream o;
  for (std::size_t i = 0; i < v.size(); ++i) o << (i ? " " : "") << cell(v[i]);
  return o.str();
}

}  // namespace

BellmanParams BellmanParams::make(double p, double kappa, int N1, int N2) {
  need(std::isfinite(p) && p >= 2.0, "Bellman exponent p must satisfy p >= 2");
  need(kappa > 0.0 && kappa <= 1.0, "kappa must lie in (0, 1]");
  need(N1 >= 1 && N2 >= 1, "block dimensions must be positive");
  BellmanParams bp;
  bp.p = p;
  bp.q = p / (p - 1.0);
  bp.gamma = bp.q * (bp.q - 1.0) / 8.0;
  bp.kappa = kappa;
  bp.N1 = N1;
  bp.N2 = N2;
  return bp;
}

std::string to_string(Region r) {
  switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    default: return "boundary";
  }
}

double beta_eval(const BellmanParams& bp, double s, double t) {
  need(s >= 0.0 && t >= 0.0, "beta needs s, t >= 0");
  const double sp = std::pow(s, bp.p), tq = std::pow(t, bp.q);
  if (sp < tq) return sp + tq + bp.gamma * s * s * std::pow(t, 2.0 - bp.q);
  return sp + tq + bp.gamma * ((2.0 / bp.p) * sp + (2.0 / bp.q - 1.0) * tq);
}

double bellman_B(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  check_blocks(bp, eta, zeta);
  return 0.5 * beta_eval(bp, norm(eta), norm(zeta));
}

Region region_of(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  const double a = std::pow(norm(eta), bp.p), b = std::pow(norm(zeta), bp.q);
  return a < b ? Region::R1 : a > b ? Region::R2 : Region::Boundary;
}

Vec bellman_gradient(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  check_blocks(bp, eta, zeta);
  const int d = bp.dim();
  Vec x(eta);
  x.insert(x.end(), zeta.begin(), zeta.end());
  Vec g(static_cast<std::size_t>(d));
  std::vector<double> H(static_cast<std::size_t>(d * d));
  double v;
  pointwise(bp, x.data(), region_of(bp, eta, zeta) == Region::R1, v, g.data(), H.data());
  return g;
}

HessianAt bellman_hessian(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  check_blocks(bp, eta, zeta);
  HessianAt h;
  h.eta = eta;
  h.zeta = zeta;
  h.dim = bp.dim();
  const double ne = norm(eta), nz = norm(zeta);
  const double gap = std::pow(ne, bp.p) - std::pow(nz, bp.q);
  if (bp.p != 2.0) {
    if (std::abs(gap) <= kGap) throw UpsilonError("Hessian requested on the branch boundary |eta|^p = |zeta|^q");
    if (nz <= kGap) throw UpsilonError("Hessian requested at zeta = 0");
  }
  h.region = gap < 0.0 ? Region::R1 : gap > 0.0 ? Region::R2 : Region::Boundary;
  Vec x(eta);
  x.insert(x.end(), zeta.begin(), zeta.end());
  Vec g(static_cast<std::size_t>(h.dim));
  h.H.assign(static_cast<std::size_t>(h.dim * h.dim), 0.0);
  double v;
  pointwise(bp, x.data(), gap < 0.0, v, g.data(), h.H.data());
  return h;
}

double tau(const BellmanParams& bp, const Vec& zeta) { return bp.q == 2.0 ? 1.0 : std::pow(norm(zeta), 2.0 - bp.q); }
double tau1(const BellmanParams& bp, const Vec& y2) { return tau(bp, y2); }
double tau2(const BellmanParams& bp, const Vec& y2) {
  if (bp.q == 2.0) return 1.0;
  return std::pow(dot(y2, y2) + bp.kappa * bp.kappa, 0.5 * (2.0 - bp.q));
}

double mollifier_constant(int dim) {
  need(dim >= 1 && dim <= 8, "mollifier dimension out of range");
  static const std::array<double, 9> c = [] {
    std::array<double, 9> a{};
    for (int d = 1; d <= 8; ++d) a[static_cast<std::size_t>(d)] = 1.0 / (sphere_area(d) * radial_moment(d - 1));
    return a;
  }();
  return c[static_cast<std::size_t>(dim)];
}

double mollifier_second_moment(int dim) {
  need(dim >= 1 && dim <= 8, "mollifier dimension out of range");
  static const std::array<double, 9> mu = [] {
    std::array<double, 9> a{};
    for (int d = 1; d <= 8; ++d) a[static_cast<std::size_t>(d)] = radial_moment(d + 1) / (d * radial_moment(d - 1));
    return a;
  }();
  return mu[static_cast<std::size_t>(dim)];
}

double mollifier(int dim, const Vec& x) {
  const double r2 = dot(x, x);
  if (r2 >= 1.0) return 0.0;
  return mollifier_constant(dim) * std::exp(-1.0 / (1.0 - r2));
}

Jet mollified_jet(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  check_blocks(bp, eta, zeta);
  if (bp.dim() > 4) throw std::invalid_argument("mollified B is limited to N1 + N2 <= 4");
  if (bp.q == 2.0) return quadratic_jet(bp, eta, zeta);
  if (bp.dim() == 2) return jet_11(bp, eta[0], zeta[0]);
  return polar_jet(bp, eta, zeta);
}

double mollified_B(const BellmanParams& bp, const Vec& eta, const Vec& zeta) { return mollified_jet(bp, eta, zeta).value; }

std::vector<double> mollified_hessian_fd(const BellmanParams& bp, const Vec& eta, const Vec& zeta, double h) {
  const int d = bp.dim();
  Vec x(eta);
  x.insert(x.end(), zeta.begin(), zeta.end());
  auto f = [&](const Vec& y) {
    const Vec a(y.begin(), y.begin() + bp.N1), b(y.begin() + bp.N1, y.end());
    return mollified_B(bp, a, b);
  };
  const double f0 = f(x);
  std::vector<double> H(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i) {
    Vec y = x;
    y[static_cast<std::size_t>(i)] += h;
    const double fp = f(y);
    y[static_cast<std::size_t>(i)] -= 2 * h;
    const double fm = f(y);
    H[static_cast<std::size_t>(i * d + i)] = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < d; ++j) {
      double s = 0.0;
      for (int a = -1; a <= 1; a += 2)
        for (int b = -1; b <= 1; b += 2) {
          Vec z = x;
          z[static_cast<std::size_t>(i)] += a * h;
          z[static_cast<std::size_t>(j)] += b * h;
          s += a * b * f(z);
        }
      H[static_cast<std::size_t>(i * d + j)] = H[static_cast<std::size_t>(j * d + i)] = s / (4.0 * h * h);
    }
  }
  return H;
}

TauConvolution tau_convolutions(const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
  check_blocks(bp, eta, zeta);
  if (bp.dim() > 4) throw std::invalid_argument("mollified B is limited to N1 + N2 <= 4");
  TauConvolution tc;
  if (bp.q == 2.0) {
    tc.tau = tc.inv_tau = 1.0;
    return tc;
  }
  if (bp.dim() == 2) {
    const MarginalTable& mt = marginals();
    auto psi = [&](double y) { return mt.psi(y); };
    const double m = bp.p - 1.0;
    tc.tau = conv1(psi, [&](double x) { return pow_jet(x, 2.0 - bp.q); }, zeta[0], bp.kappa, m, kConvNodes)[0];
    tc.inv_tau = conv1(psi, [&](double x) { return pow_jet(x, bp.q - 2.0); }, zeta[0], bp.kappa, m, kConvNodes)[0];
    return tc;
  }
  const BallRule& br = ball_rule(bp.dim());
  for (std::size_t n = 0; n < br.pts.size(); ++n) {
    double z2 = 0.0;
    for (int i = 0; i < bp.N2; ++i) {
      const double y = zeta[static_cast<std::size_t>(i)] - bp.kappa * br.pts[n][static_cast<std::size_t>(bp.N1 + i)];
      z2 += y * y;
    }
    const double t = std::pow(z2, 0.5 * (2.0 - bp.q));
    tc.tau += br.w[n] * t;
    tc.inv_tau += br.w[n] / t;
  }
  return tc;
}

double hessian_margin(const BellmanParams& bp, const MarginSample& s, const std::vector<double>& hess,
                      const TauConvolution& tc) {
  const int d = bp.dim();
  Vec w(s.omega);
  if (static_cast<int>(w.size()) != d) throw std::invalid_argument("omega has wrong dimension");
  double quad = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) quad += w[static_cast<std::size_t>(i)] * hess[static_cast<std::size_t>(i * d + j)] * w[static_cast<std::size_t>(j)];
  const auto n1 = static_cast<std::size_t>(bp.N1);
  return quad - 0.5 * bp.gamma * (tc.tau * norm2_range(w, 0, n1) + tc.inv_tau * norm2_range(w, n1, w.size()));
}

std::vector<MarginSample> random_margin_samples(const BellmanParams& bp, int count, double box, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> rad(0.0, box);
  auto block = [&](int n) {
    Vec v(static_cast<std::size_t>(n));
    for (auto& c : v) c = gauss(rng);
    const double r = rad(rng), nv = norm(v);
    for (auto& c : v) c *= nv > 0.0 ? r / nv : 0.0;
    return v;
  };
  std::vector<MarginSample> out(static_cast<std::size_t>(count));
  for (auto& s : out) {
    s.eta = block(bp.N1);
    s.zeta = block(bp.N2);
    s.omega.resize(static_cast<std::size_t>(bp.dim()));
    for (auto& c : s.omega) c = gauss(rng);
  }
  return out;
}

VerificationReport certificate_margins(const BellmanParams& bp, const std::vector<MarginSample>& samples,
                                       double fd_step, int fd_every) {
  if (!(fd_step > 0.0) || fd_step > bp.kappa / 8.0) {
    std::ostringstream msg;
    msg << "fd_step " << fd_step << " incompatible with kappa " << bp.kappa << " (need 0 < fd_step <= kappa/8)";
    throw std::invalid_argument(msg.str());
  }
  if (fd_every < 1) fd_every = 1;
  const BellmanParams b11 = BellmanParams::make(bp.p, bp.kappa, 1, 1);
  struct Row {
    double m_conv = 0, m_fd = NAN, w2 = 0, value = 0, upper = 0, fd_err = NAN, ds = 0, dt = 0, s = 0, t = 0;
    Region region = Region::Boundary;
  };
  std::vector<Row> rows(samples.size());
  const int d = bp.dim();
  parallel_for(samples.size(), [&](std::size_t i) {
    const MarginSample& sm = samples[i];
    Row& r = rows[i];
    const Jet j = mollified_jet(bp, sm.eta, sm.zeta);
    const TauConvolution tc = tau_convolutions(bp, sm.eta, sm.zeta);
    r.w2 = dot(sm.omega, sm.omega);
    r.m_conv = hessian_margin(bp, sm, j.hess, tc);
    r.value = j.value;
    r.s = norm(sm.eta);
    r.t = norm(sm.zeta);
    r.upper = 0.5 * (1.0 + bp.gamma) * (std::pow(r.s + bp.kappa, bp.p) + std::pow(r.t + bp.kappa, bp.q));
    r.region = region_of(bp, sm.eta, sm.zeta);
    if (static_cast<int>(i) % fd_every == 0) {
      const auto H = mollified_hessian_fd(bp, sm.eta, sm.zeta, fd_step);
      r.m_fd = hessian_margin(bp, sm, H, tc);
      double err = 0.0, scale = 0.0;
      for (int a = 0; a < d * d; ++a) {
        err = std::max(err, std::abs(H[static_cast<std::size_t>(a)] - j.hess[static_cast<std::size_t>(a)]));
        scale = std::max(scale, std::abs(j.hess[static_cast<std::size_t>(a)]));
      }
      r.fd_err = err / std::max(1.0, scale);
    }
    // beta_kappa(s, t) = 2 B_kappa(s, t) on the planar slice
    const Jet g = mollified_jet(b11, {r.s}, {r.t});
    r.ds = 2.0 * g.grad[0];
    r.dt = 2.0 * g.grad[1];
  });

  VerificationReport rep;
  rep.suite = "bellman";
  Table& tab = rep.table("margins", {"sample", "eta", "zeta", "omega", "region", "margin", "margin_fd", "b_kappa", "range_bound"});
  double mconv = INFINITY, mfd = INFINITY, fderr = 0.0, bmin = INFINITY, slack = INFINITY;
  double dsmin = INFINITY, dtmin = INFINITY, c_t = 0.0, c_s = 0.0, c_sv = 0.0;
  int fd_count = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    const double w2 = r.w2 > 0.0 ? r.w2 : 1.0;
    mconv = std::min(mconv, r.m_conv / w2);
    if (!std::isnan(r.m_fd)) {
      mfd = std::min(mfd, r.m_fd / w2);
      fderr = std::max(fderr, r.fd_err);
      ++fd_count;
    }
    bmin = std::min(bmin, r.value);
    slack = std::min(slack, (r.upper - r.value) / r.upper);
    const double k = bp.kappa, scale = std::pow(r.s + k, bp.p - 1.0) + std::pow(r.t + k, bp.q - 1.0);
    dsmin = std::min(dsmin, r.ds / scale);
    dtmin = std::min(dtmin, r.dt / scale);
    c_t = std::max(c_t, r.dt / std::pow(r.t + k, bp.q - 1.0));
    c_s = std::max(c_s, r.ds / std::max(std::pow(r.s + k, bp.p), r.t + k));
    c_sv = std::max(c_sv, r.ds / std::max(std::pow(r.s + k, bp.p), std::pow(r.t + k, bp.q - 1.0)));
    tab.rows.push_back({std::to_string(i), join(samples[i].eta), join(samples[i].zeta), join(samples[i].omega),
                        to_string(r.region), cell(r.m_conv), std::isnan(r.m_fd) ? "" : cell(r.m_fd), cell(r.value),
                        cell(r.upper)});
  }
  rep.info("samples", static_cast<double>(samples.size()));
  rep.add("hessian_margin_min", mconv, -1e-6, Relation::GreaterEqual);
  if (fd_count > 0) {
    rep.add("hessian_margin_min_fd", mfd, -1e-6, Relation::GreaterEqual);
    rep.info("fd_vs_convolved_hessian_max", fderr);
    rep.info("fd_samples", fd_count);
  }
  rep.add("b_kappa_min", bmin, 0.0, Relation::GreaterEqual);
  rep.add("range_bound_slack_min", slack, 0.0, Relation::GreaterEqual);
  rep.add("d_s_beta_kappa_min", dsmin, -1e-10, Relation::GreaterEqual);
  rep.add("d_t_beta_kappa_min", dtmin, -1e-10, Relation::GreaterEqual);
  rep.info("fitted_c_d_t", c_t);
  rep.info("fitted_c_d_s_verbatim", c_s);
  rep.info("fitted_c_d_s_variant", c_sv);
  return rep;
}

VerificationReport closed_form_hessian_check(const BellmanParams& bp, const std::vector<MarginSample>& samples,
                                             double h) {
  const int d = bp.dim();
  const auto n1 = static_cast<std::size_t>(bp.N1);
  std::vector<double> err(samples.size(), NAN);
  parallel_for(samples.size(), [&](std::size_t i) {
    const MarginSample& sm = samples[i];
    const Region r0 = region_of(bp, sm.eta, sm.zeta);
    const double s = norm(sm.eta), t = norm(sm.zeta);
    // distance proxy to the branch set, eta = 0 and zeta = 0
    const double gap = std::abs(std::pow(s, bp.p) - std::pow(t, bp.q));
    const double slope = std::hypot(bp.p * std::pow(s, bp.p - 1.0), bp.q * std::pow(t, bp.q - 1.0));
    const double dist = std::min({s, t, gap / slope});
    if (r0 == Region::Boundary || dist < 1e-3) return;
    HessianAt H;
    try {
      H = bellman_hessian(bp, sm.eta, sm.zeta);
    } catch (const UpsilonError&) {
      return;
    }
    Vec u = sm.eta;
    u.insert(u.end(), sm.zeta.begin(), sm.zeta.end());
    auto B = [&](const Vec& v) {
      const Vec e(v.begin(), v.begin() + static_cast<long>(n1)), z(v.begin() + static_cast<long>(n1), v.end());
      return bellman_B(bp, e, z);
    };
    const double b0 = B(u);
    auto second = [&](int a, int b, double step) {
      Vec v = u;
      if (a == b) {
        v[a] += step;
        const double fp = B(v);
        v[a] -= 2 * step;
        return (fp - 2.0 * b0 + B(v)) / (step * step);
      }
      double acc = 0.0;
      for (int sa : {1, -1})
        for (int sb : {1, -1}) {
          v = u;
          v[a] += sa * step;
          v[b] += sb * step;
          acc += sa * sb * B(v);
        }
      return acc / (4 * step * step);
    };
    const double step = std::min(h * std::max(1.0, norm(u)), 0.05 * dist);
    double worst = 0.0, scale = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        const double fd = (4.0 * second(a, b, 0.5 * step) - second(a, b, step)) / 3.0;
        worst = std::max(worst, std::abs(fd - H.at(a, b)));
        scale = std::max(scale, std::abs(H.at(a, b)));
      }
    err[i] = worst / std::max(1.0, scale);
  });
  VerificationReport rep;
  rep.suite = "bellman";
  double worst = 0.0;
  int used = 0;
  for (double e : err)
    if (!std::isnan(e)) {
      worst = std::max(worst, e);
      ++used;
    }
  rep.info("closed_form_fd_samples", used);
  rep.add("closed_form_vs_fd_hessian", used > 0 ? worst : NAN, 1e-5);
  return rep;
}

ElementaryMargins elementary_margins(double q, const Vec& a, const Vec& b) {
  need(q > 1.0 && q <= 2.0, "elementary lemma needs 1 < q <= 2");
  need(a.size() == b.size(), "a and b must have equal dimension");
  const double na = norm(a), nb = norm(b), mx = std::max(na, nb);
  if (mx == 0.0 && q < 2.0) throw std::invalid_argument("degenerate input a = b = 0 for q < 2");
  ElementaryMargins m;
  if (q == 2.0) {
    m.m1 = 0.5 - 1.0 / 64.0;
    m.m2 = 0.0;
    return m;
  }
  Vec dlt(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) dlt[i] = a[i] - b[i];
  const double dd = dot(dlt, dlt);
  double ss = dd > 0.0 ? -dot(b, dlt) / dd : -1.0;  // minimiser of |s a + (1-s) b|
  const GaussRule& r = gauss_legendre(64);
  const double gm = 1.0 / (q - 1.0);
  double i1 = 0.0, i2 = 0.0;
  auto add = [&](double s, double w) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double c = s * a[i] + (1.0 - s) * b[i];
      n2 += c * c;
    }
    const double nv = std::sqrt(n2);
    i1 += w * s * std::pow(nv, 2.0 - q);
    i2 += w * s * std::pow(nv, q - 2.0);
  };
  if (ss > 0.0 && ss < 1.0) {
    for (int side = -1; side <= 1; side += 2) {
      const double L = side < 0 ? ss : 1.0 - ss;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double v = 0.5 * (1.0 + r.nodes[i]);
        add(ss + side * L * std::pow(v, gm), 0.5 * r.weights[i] * L * gm * std::pow(v, gm - 1.0));
      }
    }
  } else {
    for (std::size_t i = 0; i < r.nodes.size(); ++i) add(0.5 * (1.0 + r.nodes[i]), 0.5 * r.weights[i]);
  }
  m.m1 = i1 - std::pow(2.0, -6.0) * std::pow(mx, 2.0 - q);
  m.m2 = i2 - 0.5 * std::pow(mx, q - 2.0);
  return m;
}

std::vector<std::pair<Vec, Vec>> random_elementary_samples(int dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), lg(-2.0, 2.0);
  std::vector<std::pair<Vec, Vec>> out(static_cast<std::size_t>(count));
  for (auto& [a, b] : out) {
    a.resize(static_cast<std::size_t>(dim));
    b.resize(static_cast<std::size_t>(dim));
    const double sa = std::pow(10.0, lg(rng)), sb = std::pow(10.0, lg(rng));
    for (auto& c : a) c = sa * u(rng);
    for (auto& c : b) c = sb * u(rng);
  }
  return out;
}

VerificationReport elementary_lemma_margins(double q, const std::vector<std::pair<Vec, Vec>>& samples) {
  std::vector<ElementaryMargins> ms(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { ms[i] = elementary_margins(q, samples[i].first, samples[i].second); });
  VerificationReport rep;
  rep.suite = "bellman";
  Table& tab = rep.table("elementary", {"sample", "a", "b", "margin_1", "margin_2"});
  double m1 = INFINITY, m2 = INFINITY;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    m1 = std::min(m1, ms[i].m1);
    m2 = std::min(m2, ms[i].m2);
    tab.rows.push_back({std::to_string(i), join(samples[i].first), join(samples[i].second), cell(ms[i].m1), cell(ms[i].m2)});
  }
  rep.info("samples", static_cast<double>(samples.size()));
  rep.add("elem_1_margin_min", m1, -1e-9, Relation::GreaterEqual);
  rep.add("elem_2_margin_min", m2, -1e-9, Relation::GreaterEqual);
  return rep;
}

}  // namespace dunkl
