#include "phasetori/fourier.hpp"

#include <cmath>
#include <stdexcept>

namespace phasetori {

void FourierMap::add(const Index& l, const VecC& v) {
  if (int(l.size()) != dim_domain_ || v.size() != dim_range_)
    throw std::invalid_argument("FourierMap::add: dimension mismatch");
  auto it = coeffs_.find(l);
  if (it == coeffs_.end())
    coeffs_.emplace(l, v);
  else
    it->second += v;
}

void FourierMap::add_real_pair(const Index& l, int comp, double amp, double phase) {
  VecC v = VecC::Zero(dim_range_);
  v[comp] = amp * std::exp(cplx(0.0, phase));
  add(l, v);
  Index ml(l.size());
  for (size_t i = 0; i < l.size(); ++i) ml[i] = -l[i];
  VecC w = VecC::Zero(dim_range_);
  w[comp] = std::conj(v[comp]);
  add(ml, w);
}

VecC FourierMap::coeff(const Index& l) const {
  auto it = coeffs_.find(l);
  if (it == coeffs_.end()) return VecC::Zero(dim_range_);
  return it->second;
}

VecC FourierMap::eval_complex(const Eigen::VectorXd& phi) const {
  VecC out = VecC::Zero(dim_range_);
  for (const auto& [l, c] : coeffs_) {
    double arg = 0.0;
    for (int i = 0; i < dim_domain_; ++i) arg += l[i] * phi[i];
    out += c * std::exp(cplx(0.0, arg));
  }
  return out;
}

Eigen::VectorXd FourierMap::eval(const Eigen::VectorXd& phi) const {
  VecC v = eval_complex(phi);
  if (v.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw std::runtime_error("FourierMap::eval: imaginary residue above 1e-12");
  return v.real();
}

Eigen::MatrixXd FourierMap::eval_jacobian(const Eigen::VectorXd& phi) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_range_, dim_domain_);
  for (const auto& [l, c] : coeffs_) {
    double arg = 0.0;
    for (int i = 0; i < dim_domain_; ++i) arg += l[i] * phi[i];
    const cplx e = std::exp(cplx(0.0, arg));
    for (int j = 0; j < dim_domain_; ++j) out.col(j) += cplx(0.0, l[j]) * c * e;
  }
  if (out.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw std::runtime_error("FourierMap::eval_jacobian: imaginary residue above 1e-12");
  return out.real();
}

FourierMap FourierMap::directional_derivative(const Eigen::VectorXd& Omega) const {
  FourierMap out(dim_domain_, dim_range_);
  for (const auto& [l, c] : coeffs_) {
    double w = 0.0;
    for (int i = 0; i < dim_domain_; ++i) w += Omega[i] * l[i];
    out.add(l, cplx(0.0, w) * c);
  }
  return out;
}

void FourierMap::prune(double tol) {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (it->second.cwiseAbs().maxCoeff() < tol)
      it = coeffs_.erase(it);
    else
      ++it;
  }
}

double FourierMap::max_reality_violation() const {
  double worst = 0.0;
  for (const auto& [l, c] : coeffs_) {
    Index ml(l.size());
    for (size_t i = 0; i < l.size(); ++i) ml[i] = -l[i];
    worst = std::max(worst, (coeff(ml) - c.conjugate()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double FourierMap::max_abs() const {
  double worst = 0.0;
  for (const auto& [l, c] : coeffs_) worst = std::max(worst, c.cwiseAbs().maxCoeff());
  return worst;
}

nlohmann::json FourierMap::to_json() const {
  nlohmann::json j;
  j["dim_domain"] = dim_domain_;
  j["dim_range"] = dim_range_;
  j["modes"] = nlohmann::json::array();
  for (const auto& [l, c] : coeffs_) {
    if (c.cwiseAbs().maxCoeff() < 1e-14) continue;
    nlohmann::json entry;
    entry["l"] = l;
    std::vector<double> re(dim_range_), im(dim_range_);
    for (int i = 0; i < dim_range_; ++i) {
      re[i] = c[i].real();
      im[i] = c[i].imag();
    }
    entry["re"] = re;
    entry["im"] = im;
    j["modes"].push_back(entry);
  }
  return j;
}

FourierMap FourierMap::from_json(const nlohmann::json& j) {
  FourierMap f(j.at("dim_domain").get<int>(), j.at("dim_range").get<int>());
  for (const auto& entry : j.at("modes")) {
    Index l = entry.at("l").get<std::vector<int>>();
    auto re = entry.at("re").get<std::vector<double>>();
    auto im = entry.at("im").get<std::vector<double>>();
    VecC c(f.dim_range());
    for (int i = 0; i < f.dim_range(); ++i) c[i] = cplx(re[i], im[i]);
    f.add(l, c);
  }
  return f;
}

}  // namespace phasetori
