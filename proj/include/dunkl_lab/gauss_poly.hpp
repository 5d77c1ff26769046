#pragma once

#include <map>
#include <string>
#include <vector>

#include "dunkl_lab/root_system.hpp"

namespace dunkl {

using Exponent = std::vector<int>;

// f(x) = P(x) exp(-a |x|^2) with P a polynomial in N variables.
struct GaussPoly {
  int dim = 1;
  double a = 0.5;
  std::map<Exponent, double> coeffs;

  static GaussPoly gaussian(int dim, double a, double scale = 1.0);
  static GaussPoly monomial(int dim, double a, const Exponent& e, double c = 1.0);

  double operator()(const Vec& x) const;
  double poly(const Vec& x) const;
  int degree() const;
  bool is_zero() const;

  GaussPoly operator+(const GaussPoly& o) const;
  GaussPoly operator-(const GaussPoly& o) const;
  GaussPoly operator*(const GaussPoly& o) const;
  GaussPoly scaled(double c) const;

  GaussPoly partial(int j) const;
  GaussPoly directional(const Vec& xi) const;
  // x_j -> -x_j
  GaussPoly flipped(int j) const;
  // f(sigma x) for a diagonal sign matrix
  GaussPoly signed_compose(const std::vector<int>& signs) const;
  // (f - f o flip_j) / x_j, exact
  GaussPoly odd_quotient(int j) const;
  GaussPoly even_part() const;
  GaussPoly odd_part() const;

  std::string describe() const;
};

}  // namespace dunkl
