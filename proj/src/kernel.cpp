#include "dunkl_lab/kernel.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <sstream>

namespace dunkl {

namespace {

// normalized Bessel j_nu(s) = Gamma(nu+1) (2/s)^nu J_nu(s), s > 0
double jnorm(double nu, double s, double jv) {
  return std::exp(std::lgamma(nu + 1.0) + nu * std::log(2.0 / s)) * jv;
}

struct BesselTriple {
  double jm, jp, jpp;  // j_{k-1/2}, j_{k+1/2}, j_{k+3/2}
};

BesselTriple bessel_triple(double k, double s) {
  using boost::math::cyl_bessel_j;
  const double nu = k + 0.5;
  const double Jp = cyl_bessel_j(nu, s);
  const double Jpp = cyl_bessel_j(nu + 1.0, s);
  double Jm;
  if (k >= 0.5) Jm = cyl_bessel_j(nu - 1.0, s);
  else Jm = (2.0 * nu / s) * Jp - Jpp;
  return {jnorm(nu - 1.0, s, Jm), jnorm(nu, s, Jp), jnorm(nu + 1.0, s, Jpp)};
}

void check_range(double z, bool imaginary, const KernelEval& ke) {
  const double lim = imaginary ? ke.max_oscillatory_product : ke.max_abs_product;
  if (std::abs(z) > lim) {
    std::ostringstream msg;
    msg << "kernel range guard exceeded: |x y| = " << std::abs(z) << " > " << lim;
    throw KernelRangeError(msg.str());
  }
}

}  // namespace

SeriesResult kernel_series(double k, double z, bool imaginary, const KernelEval& ke) {
  if (k < 0.0) throw std::runtime_error("multiplicity must be nonnegative");
  if (ke.max_terms < 32) throw std::runtime_error("max_terms must be >= 32");
  if (!(ke.series_tol > 0.0)) throw std::runtime_error("series_tol must be positive");
  // coefficients of z^n for real y; the imaginary direction multiplies the n-th term by i^n
  long double term = 1.0L, re = 1.0L, im = 0.0L;
  int quiet = 0;
  long double last = 0.0L;
  for (int n = 0; n < ke.max_terms; ++n) {
    const int m = n + 1;
    term *= static_cast<long double>(z) / (m + ((m % 2) ? 2.0L * k : 0.0L));
    last = std::abs(term);
    switch (imaginary ? (m % 4) : 0) {
      case 0: re += term; break;
      case 1: im += term; break;
      case 2: re -= term; break;
      default: im -= term; break;
    }
    const long double mag = std::sqrt(re * re + im * im);
    if (last <= static_cast<long double>(ke.series_tol) * mag) {
      if (++quiet >= 4) return {cplx(static_cast<double>(re), static_cast<double>(im)), m + 1, static_cast<double>(last)};
    } else {
      quiet = 0;
    }
  }
  std::ostringstream msg;
  msg << "kernel series did not converge in " << ke.max_terms << " terms (last increment " << static_cast<double>(last)
      << ")";
  throw KernelSeriesError(msg.str(), static_cast<double>(last));
}

cplx kernel_1d(double k, double z, bool imaginary, const KernelEval& ke) {
  if (z == 0.0) return 1.0;
  check_range(z, imaginary, ke);
  if (!imaginary || std::abs(z) <= ke.series_switch) return kernel_series(k, z, imaginary, ke).value;
  const double s = std::abs(z);
  const auto b = bessel_triple(k, s);
  return {b.jm, z / (2.0 * k + 1.0) * b.jp};
}

cplx kernel_1d_dz_imag(double k, double z, const KernelEval& ke) {
  check_range(z, true, ke);
  if (z == 0.0) return {0.0, 1.0 / (2.0 * k + 1.0)};
  if (std::abs(z) <= ke.series_switch) {
    // termwise derivative of sum c_n (i z)^n
    long double term = 1.0L, re = 0.0L, im = 0.0L;
    int quiet = 0;
    for (int n = 0; n < ke.max_terms; ++n) {
      const int m = n + 1;
      term *= 1.0L / (m + ((m % 2) ? 2.0L * k : 0.0L));
      long double d = term * m;
      for (int p = 0; p < m - 1; ++p) d *= z;
      switch (m % 4) {
        case 0: re += d; break;
        case 1: im += d; break;
        case 2: re -= d; break;
        default: im -= d; break;
      }
      const long double mag = std::sqrt(re * re + im * im);
      if (std::abs(d) <= static_cast<long double>(ke.series_tol) * mag) {
        if (++quiet >= 4) return {static_cast<double>(re), static_cast<double>(im)};
      } else {
        quiet = 0;
      }
    }
    throw KernelSeriesError("kernel derivative series did not converge", 0.0);
  }
  const double s = std::abs(z);
  const auto b = bessel_triple(k, s);
  const double c = 2.0 * k + 1.0;
  return {-z / c * b.jp, (b.jp - z * z / (2.0 * k + 3.0) * b.jpp) / c};
}

cplx dunkl_kernel(const KernelEval& ke, const Vec& x, const Vec& y, bool imaginary_y) {
  const auto& rs = ke.rs;
  if (rs.kind == RootKind::General && !rs.coordinate_aligned())
    throw std::runtime_error("kernel evaluation is limited to rank-one and product root systems");
  if (x.size() != y.size() || static_cast<int>(x.size()) != rs.dimension)
    throw std::runtime_error("kernel arguments have wrong dimension");
  const auto ks = rs.axis_k();
  cplx e = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) e *= kernel_1d(ks[j], x[j] * y[j], imaginary_y, ke);
  return e;
}

double kernel_ode_residual(const KernelEval& ke, double x, double y) {
  if (ke.rs.dimension != 1) throw std::runtime_error("ODE residual is defined for rank-one kernels");
  const double k = ke.rs.axis_k()[0];
  const auto sr = kernel_series(k, x * y, false, ke);
  // rebuild the truncated series S_M = sum_{n<M} c_n y^n x^n and apply T termwise
  long double c = 1.0L, s = 1.0L, ts = 0.0L;
  for (int n = 1; n < sr.terms; ++n) {
    c *= static_cast<long double>(y) / (n + ((n % 2) ? 2.0L * k : 0.0L));
    long double xp = 1.0L;
    for (int p = 0; p < n - 1; ++p) xp *= x;
    // T x^n = (n + 2k [n odd]) x^{n-1}
    ts += c * (n + ((n % 2) ? 2.0L * k : 0.0L)) * xp;
    s += c * xp * x;
  }
  return static_cast<double>(std::abs(ts - static_cast<long double>(y) * s));
}

}  // namespace dunkl
