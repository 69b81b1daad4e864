#include "randfeat/kernels.hpp"

namespace randfeat::kernels {

void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace parallel {

void apply_activation(Eigen::MatrixXd& p, const Activation& act, ActivationDomain domain) {
  double* data = p.data();
  const long size = static_cast<long>(p.size());
  detail::ExceptionSlot slot;
  if (domain == ActivationDomain::Sphere) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < size; ++i) {
      slot.run([&] { data[i] = act(data[i]); });
    }
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < size; ++i) data[i] = act.eval_raw(data[i]);
  }
  slot.rethrow();
}

}  // namespace parallel
}  // namespace randfeat::kernels
