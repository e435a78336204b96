#include "hiercon/optim.hpp"

#include <cmath>

namespace hiercon {

double global_grad_norm(const std::vector<Parameter>& params) {
  double sq = 0.0;
  for (const auto& p : params) sq += p.grad->squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(const std::vector<Parameter>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const auto& p : params) *p.grad *= scale;
  }
  return norm;
}

void Adam::step(const std::vector<Parameter>& params) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(MatrixXd::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(MatrixXd::Zero(p.value->rows(), p.value->cols()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const MatrixXd& g = *params[i].grad;
    m_[i] = opt_.beta1 * m_[i] + (1.0 - opt_.beta1) * g;
    v_[i] = opt_.beta2 * v_[i] + (1.0 - opt_.beta2) * g.cwiseProduct(g);
    const auto m_hat = m_[i].array() / bc1;
    const auto v_hat = v_[i].array() / bc2;
    params[i].value->array() -= opt_.learning_rate * m_hat / (v_hat.sqrt() + opt_.epsilon);
  }
}

} // namespace hiercon
