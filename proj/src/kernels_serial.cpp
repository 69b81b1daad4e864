#include "randfeat/kernels.hpp"

namespace randfeat::kernels::serial {

void apply_activation(Eigen::MatrixXd& p, const Activation& act, ActivationDomain domain) {
  double* data = p.data();
  const Eigen::Index size = p.size();
  if (domain == ActivationDomain::Sphere) {
    for (Eigen::Index i = 0; i < size; ++i) data[i] = act(data[i]);
  } else {
    for (Eigen::Index i = 0; i < size; ++i) data[i] = act.eval_raw(data[i]);
  }
}

}  // namespace randfeat::kernels::serial
