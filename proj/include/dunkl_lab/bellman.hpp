#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dunkl_lab/report.hpp"
#include "dunkl_lab/root_system.hpp"

namespace dunkl {

struct BellmanParams {
  double p = 2.0;
  double q = 2.0;
  double gamma = 0.25;
  double kappa = 0.1;
  int N1 = 1;
  int N2 = 1;

  static BellmanParams make(double p, double kappa = 0.1, int N1 = 1, int N2 = 1);
  int dim() const { return N1 + N2; }
};

enum class Region { R1, R2, Boundary };
std::string to_string(Region r);

class UpsilonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HessianAt {
  Vec eta, zeta;
  Region region = Region::Boundary;
  int dim = 0;
  std::vector<double> H;  // row-major dim x dim, eta block first
  double at(int i, int j) const { return H[static_cast<std::size_t>(i * dim + j)]; }
};

double beta_eval(const BellmanParams& bp, double s, double t);
double bellman_B(const BellmanParams& bp, const Vec& eta, const Vec& zeta);
Region region_of(const BellmanParams& bp, const Vec& eta, const Vec& zeta);
// B is C^1 everywhere
Vec bellman_gradient(const BellmanParams& bp, const Vec& eta, const Vec& zeta);
// closed-form second derivatives; throws UpsilonError within 1e-9 of the branch set or zeta = 0
HessianAt bellman_hessian(const BellmanParams& bp, const Vec& eta, const Vec& zeta);

// tau(eta, zeta) = |zeta|^{2-q}; tau1(y1, y2) = |y2|^{2-q}; tau2 = (|y2|^2 + kappa^2)^{(2-q)/2}
double tau(const BellmanParams& bp, const Vec& zeta);
double tau1(const BellmanParams& bp, const Vec& y2);
double tau2(const BellmanParams& bp, const Vec& y2);

// c with integral of c exp(-1/(1-|x|^2)) over the unit ball in R^dim equal to 1
double mollifier_constant(int dim);
// integral of x_1^2 phi over the unit ball
double mollifier_second_moment(int dim);
double mollifier(int dim, const Vec& x);

struct Jet {
  double value = 0.0;
  Vec grad;
  std::vector<double> hess;  // row-major
};

// B_kappa and its first two derivatives (phi_kappa convolved with the pointwise jet of B)
Jet mollified_jet(const BellmanParams& bp, const Vec& eta, const Vec& zeta);
double mollified_B(const BellmanParams& bp, const Vec& eta, const Vec& zeta);
// central differences of mollified_B
std::vector<double> mollified_hessian_fd(const BellmanParams& bp, const Vec& eta, const Vec& zeta, double h);

struct TauConvolution {
  double tau = 0.0;      // (tau * phi_kappa)(eta, zeta)
  double inv_tau = 0.0;  // (1/tau * phi_kappa)(eta, zeta)
};
TauConvolution tau_convolutions(const BellmanParams& bp, const Vec& eta, const Vec& zeta);

struct MarginSample {
  Vec eta, zeta, omega;
};

// <Hess B_kappa w, w> - gamma/2 ((tau*phi) |w1|^2 + (1/tau*phi) |w2|^2)
double hessian_margin(const BellmanParams& bp, const MarginSample& s, const std::vector<double>& hess,
                      const TauConvolution& tc);

std::vector<MarginSample> random_margin_samples(const BellmanParams& bp, int count, double box, std::uint64_t seed);

// Hessian margins, range bound, gradient bounds; fd_step must be <= kappa/8
VerificationReport certificate_margins(const BellmanParams& bp, const std::vector<MarginSample>& samples,
                                       double fd_step, int fd_every = 20);

// closed-form Hessian of B against central differences of B; stencils that cross the branch set are skipped
VerificationReport closed_form_hessian_check(const BellmanParams& bp, const std::vector<MarginSample>& samples,
                                             double h = 1e-3);

struct ElementaryMargins {
  double m1 = 0.0;  // int s |sa+(1-s)b|^{2-q} - 2^-6 max^{2-q}
  double m2 = 0.0;  // int s |sa+(1-s)b|^{q-2} - 2^-1 max^{q-2}
};
ElementaryMargins elementary_margins(double q, const Vec& a, const Vec& b);
std::vector<std::pair<Vec, Vec>> random_elementary_samples(int dim, int count, std::uint64_t seed);
VerificationReport elementary_lemma_margins(double q, const std::vector<std::pair<Vec, Vec>>& samples);

}  // namespace dunkl
