#pragma once

#include <string>
#include <vector>

namespace dunkl {

using Vec = std::vector<double>;

enum class RootKind { RankOne, Product, General };

std::string to_string(RootKind kind);
RootKind root_kind_from_string(const std::string& name);

// Normalized root system with a G-invariant multiplicity and its reflection group.
struct RootSystemSpec {
  RootKind kind = RootKind::RankOne;
  int dimension = 1;
  std::vector<Vec> roots;
  std::vector<double> multiplicity;  // one entry per root
  std::vector<int> orbit;            // orbit index per root
  std::vector<double> orbit_k;       // multiplicity per orbit
  std::vector<std::vector<double>> group;  // row-major N x N orthogonal matrices
  double prefactor = 1.0;                  // scalar in front of dw

  double k_sum() const;
  // Per-axis multiplicities when every root is a multiple of a coordinate vector.
  bool coordinate_aligned() const;
  std::vector<double> axis_k() const;
};

RootSystemSpec make_root_system(RootKind kind, int N, const std::vector<double>& k_values,
                                const std::vector<Vec>& roots = {}, double prefactor = 1.0);

Vec reflect(const Vec& alpha, const Vec& x);
Vec reflect(const RootSystemSpec& rs, const Vec& alpha, const Vec& x);
Vec apply_group_element(const RootSystemSpec& rs, std::size_t g, const Vec& x);

double orbit_distance(const RootSystemSpec& rs, const Vec& x, const Vec& y);
double weight_density(const RootSystemSpec& rs, const Vec& x);

std::string root_system_to_json(const RootSystemSpec& rs);
RootSystemSpec root_system_from_json(const std::string& text);

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);

}  // namespace dunkl
