#include "dunkl_lab/gauss_poly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dunkl {

namespace {

void add_term(std::map<Exponent, double>& m, const Exponent& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = m.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) m.erase(it);
  }
}

void require_same(const GaussPoly& a, const GaussPoly& b) {
  if (a.dim != b.dim) throw std::runtime_error("GaussPoly dimension mismatch");
  if (a.a != b.a) throw std::runtime_error("GaussPoly sum requires equal envelopes");
}

}  // namespace

GaussPoly GaussPoly::gaussian(int dim, double a, double scale) {
  return monomial(dim, a, Exponent(static_cast<std::size_t>(dim), 0), scale);
}

GaussPoly GaussPoly::monomial(int dim, double a, const Exponent& e, double c) {
  if (static_cast<int>(e.size()) != dim) throw std::runtime_error("exponent length must equal dimension");
  if (!(a > 0.0)) throw std::runtime_error("Gaussian envelope needs a > 0");
  GaussPoly f;
  f.dim = dim;
  f.a = a;
  add_term(f.coeffs, e, c);
  return f;
}

double GaussPoly::poly(const Vec& x) const {
  double s = 0.0;
  for (const auto& [e, c] : coeffs) {
    double t = c;
    for (int j = 0; j < dim; ++j)
      for (int p = 0; p < e[static_cast<std::size_t>(j)]; ++p) t *= x[static_cast<std::size_t>(j)];
    s += t;
  }
  return s;
}

double GaussPoly::operator()(const Vec& x) const {
  double r2 = 0.0;
  for (int j = 0; j < dim; ++j) r2 += x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return poly(x) * std::exp(-a * r2);
}

int GaussPoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : coeffs) {
    int s = 0;
    for (int v : e) s += v;
    d = std::max(d, s);
  }
  return d;
}

bool GaussPoly::is_zero() const { return coeffs.empty(); }

GaussPoly GaussPoly::operator+(const GaussPoly& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  require_same(*this, o);
  GaussPoly r = *this;
  for (const auto& [e, c] : o.coeffs) add_term(r.coeffs, e, c);
  return r;
}

GaussPoly GaussPoly::operator-(const GaussPoly& o) const { return *this + o.scaled(-1.0); }

GaussPoly GaussPoly::operator*(const GaussPoly& o) const {
  if (dim != o.dim) throw std::runtime_error("GaussPoly dimension mismatch");
  GaussPoly r;
  r.dim = dim;
  r.a = a + o.a;
  for (const auto& [e1, c1] : coeffs)
    for (const auto& [e2, c2] : o.coeffs) {
      Exponent e(e1.size());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = e1[j] + e2[j];
      add_term(r.coeffs, e, c1 * c2);
    }
  return r;
}

GaussPoly GaussPoly::scaled(double c) const {
  GaussPoly r = *this;
  r.coeffs.clear();
  for (const auto& [e, v] : coeffs) add_term(r.coeffs, e, v * c);
  return r;
}

GaussPoly GaussPoly::partial(int j) const {
  GaussPoly r = *this;
  r.coeffs.clear();
  const auto jj = static_cast<std::size_t>(j);
  for (const auto& [e, c] : coeffs) {
    if (e[jj] > 0) {
      Exponent d = e;
      d[jj] -= 1;
      add_term(r.coeffs, d, c * e[jj]);
    }
    Exponent u = e;
    u[jj] += 1;
    add_term(r.coeffs, u, -2.0 * a * c);
  }
  return r;
}

GaussPoly GaussPoly::directional(const Vec& xi) const {
  GaussPoly r = scaled(0.0);
  for (int j = 0; j < dim; ++j)
    if (xi[static_cast<std::size_t>(j)] != 0.0) r = r + partial(j).scaled(xi[static_cast<std::size_t>(j)]);
  return r;
}

GaussPoly GaussPoly::flipped(int j) const {
  GaussPoly r = *this;
  r.coeffs.clear();
  for (const auto& [e, c] : coeffs) add_term(r.coeffs, e, e[static_cast<std::size_t>(j)] % 2 ? -c : c);
  return r;
}

GaussPoly GaussPoly::signed_compose(const std::vector<int>& signs) const {
  GaussPoly r = *this;
  r.coeffs.clear();
  for (const auto& [e, c] : coeffs) {
    double s = c;
    for (int j = 0; j < dim; ++j)
      if (signs[static_cast<std::size_t>(j)] < 0 && e[static_cast<std::size_t>(j)] % 2) s = -s;
    add_term(r.coeffs, e, s);
  }
  return r;
}

GaussPoly GaussPoly::odd_quotient(int j) const {
  GaussPoly r = *this;
  r.coeffs.clear();
  const auto jj = static_cast<std::size_t>(j);
  for (const auto& [e, c] : coeffs)
    if (e[jj] % 2) {
      Exponent d = e;
      d[jj] -= 1;
      add_term(r.coeffs, d, 2.0 * c);
    }
  return r;
}

GaussPoly GaussPoly::even_part() const {
  GaussPoly r = *this;
  r.coeffs.clear();
  for (const auto& [e, c] : coeffs) {
    int s = 0;
    for (int v : e) s += v;
    if (s % 2 == 0) add_term(r.coeffs, e, c);
  }
  return r;
}

GaussPoly GaussPoly::odd_part() const { return *this - even_part(); }

std::string GaussPoly::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << "exp(-" << a << "|x|^2)*(";
  bool first = true;
  for (const auto& [e, c] : coeffs) {
    if (!first) out << " + ";
    first = false;
    out << c;
    for (int j = 0; j < dim; ++j)
      if (e[static_cast<std::size_t>(j)]) out << "*x" << j << "^" << e[static_cast<std::size_t>(j)];
  }
  if (first) out << "0";
  out << ")";
  return out.str();
}

}  // namespace dunkl
