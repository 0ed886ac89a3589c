#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

namespace phasetori {

using VecC = Eigen::VectorXcd;
using cplx = std::complex<double>;

// Sparse multi-index Fourier series for a map T^m -> C^k:
//   f(phi) = sum_l coeff(l) * exp(i <l, phi>).
// Real-valued maps satisfy coeff(-l) = conj(coeff(l)).
class FourierMap {
 public:
  using Index = std::vector<int>;

  FourierMap() = default;
  FourierMap(int dim_domain, int dim_range)
      : dim_domain_(dim_domain), dim_range_(dim_range) {}

  int dim_domain() const { return dim_domain_; }
  int dim_range() const { return dim_range_; }
  const std::map<Index, VecC>& coeffs() const { return coeffs_; }

  // Adds v to the coefficient at l.
  void add(const Index& l, const VecC& v);
  // Adds amp*e^{i*phase} at component comp of mode l, and the conjugate at -l,
  // i.e. the real contribution 2*amp*cos(<l,phi> + phase).
  void add_real_pair(const Index& l, int comp, double amp, double phase);

  VecC coeff(const Index& l) const;  // zero vector if absent
  bool has(const Index& l) const { return coeffs_.count(l) > 0; }

  VecC eval_complex(const Eigen::VectorXd& phi) const;
  Eigen::VectorXd eval(const Eigen::VectorXd& phi) const;  // checks Im < 1e-12
  // Jacobian d f / d phi (dim_range x dim_domain), by i*l coefficient multiplication.
  Eigen::MatrixXd eval_jacobian(const Eigen::VectorXd& phi) const;

  // Derivative along the constant flow Omega: sum_l i<Omega,l> c_l e^{i<l,phi>}.
  FourierMap directional_derivative(const Eigen::VectorXd& Omega) const;

  void prune(double tol = 1e-14);
  double max_reality_violation() const;
  double max_abs() const;

  nlohmann::json to_json() const;
  static FourierMap from_json(const nlohmann::json& j);

 private:
  int dim_domain_ = 0;
  int dim_range_ = 0;
  std::map<Index, VecC> coeffs_;
};

}  // namespace phasetori
