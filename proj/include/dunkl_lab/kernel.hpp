#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "dunkl_lab/root_system.hpp"

namespace dunkl {

using cplx = std::complex<double>;

struct KernelEval {
  RootSystemSpec rs;
  double series_tol = 1e-17;
  int max_terms = 600;
  double max_abs_product = 64.0;       // series path guard on |x_j y_j|
  double max_oscillatory_product = 1e5;  // guard for imaginary arguments past the series range
  double series_switch = 12.0;         // imaginary arguments with |x_j y_j| above this use Bessel functions

  KernelEval() = default;
  explicit KernelEval(RootSystemSpec r) : rs(std::move(r)) {}
};

class KernelSeriesError : public std::runtime_error {
 public:
  KernelSeriesError(const std::string& msg, double last) : std::runtime_error(msg), last_increment(last) {}
  double last_increment;
};

class KernelRangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SeriesResult {
  cplx value;
  int terms = 0;
  double last_increment = 0.0;
};

// Rank-one kernel E_k(x, y) as a function of z = x y; imaginary means y -> i y.
SeriesResult kernel_series(double k, double z, bool imaginary, const KernelEval& ke);
cplx kernel_1d(double k, double z, bool imaginary, const KernelEval& ke);
// d/dz of E_k(z) for the imaginary direction, i.e. d/dz E_k(1, i z) with z real.
cplx kernel_1d_dz_imag(double k, double z, const KernelEval& ke);

cplx dunkl_kernel(const KernelEval& ke, const Vec& x, const Vec& y, bool imaginary_y = false);

// T_x S_M(x, y) - y S_M(x, y) with T applied termwise to the truncated series.
double kernel_ode_residual(const KernelEval& ke, double x, double y);

}  // namespace dunkl
