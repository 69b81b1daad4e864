#pragma once

// Dense kernels in two flavours: `serial` is the reference implementation used
// by the tests, `parallel` distributes the same work with OpenMP. Both produce
// bitwise identical results for any thread count: work is split into a fixed
// number of units and partial sums are combined in unit order.

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>

#include <Eigen/Dense>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "randfeat/activation.hpp"

namespace randfeat::kernels {

enum class ActivationDomain {
  Sphere,  // clamp to [-1, 1] (throws beyond tolerance)
  Real,    // evaluate on the whole real line
};

void set_num_threads(int n);
int max_threads();

namespace detail {

// Collects the first exception thrown inside a parallel region.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace detail

namespace serial {

/// gamma applied entrywise, in place.
void apply_activation(Eigen::MatrixXd& p, const Activation& act, ActivationDomain domain);

/// K_ij = f(x_i^T x_j), evaluated on the upper triangle and mirrored.
template <class F>
Eigen::MatrixXd population_matrix(const Eigen::MatrixXd& points, F&& f) {
  const Eigen::MatrixXd dots = points * points.transpose();
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      k(i, j) = f(dots(i, j));
      k(j, i) = k(i, j);
    }
  }
  return k;
}

/// sum_b B_b B_b^T * scale where B_b = block(b) is n x m_b, summed in block order.
template <class BlockFn>
Eigen::MatrixXd block_gram(Eigen::Index n, std::size_t blocks, BlockFn&& block, double scale) {
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t b = 0; b < blocks; ++b) {
    Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd z = block(b);
    partial.selfadjointView<Eigen::Lower>().rankUpdate(z, scale);
    total.triangularView<Eigen::Lower>() += partial;
  }
  total.triangularView<Eigen::StrictlyUpper>() = total.transpose();
  return total;
}

template <class F>
void for_each_task(std::size_t count, F&& f) {
  for (std::size_t i = 0; i < count; ++i) f(i);
}

}  // namespace serial

namespace parallel {

void apply_activation(Eigen::MatrixXd& p, const Activation& act, ActivationDomain domain);

template <class F>
Eigen::MatrixXd population_matrix(const Eigen::MatrixXd& points, F&& f) {
  const Eigen::MatrixXd dots = points * points.transpose();
  const auto n = static_cast<long>(points.rows());
  Eigen::MatrixXd k(n, n);
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 8)
  for (long j = 0; j < n; ++j) {
    slot.run([&] {
      for (long i = 0; i <= j; ++i) {
        k(i, j) = f(dots(i, j));
        k(j, i) = k(i, j);
      }
    });
  }
  slot.rethrow();
  return k;
}

/// Same reduction as serial::block_gram. Blocks are generated and multiplied
/// concurrently; their contributions are added in block order.
template <class BlockFn>
Eigen::MatrixXd block_gram(Eigen::Index n, std::size_t blocks, BlockFn&& block, double scale) {
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  detail::ExceptionSlot slot;
  const auto count = static_cast<long>(blocks);
#pragma omp parallel
  {
    Eigen::MatrixXd partial(n, n);
#pragma omp for ordered schedule(static, 1)
    for (long b = 0; b < count; ++b) {
      bool ok = false;
      slot.run([&] {
        partial.setZero();
        const Eigen::MatrixXd z = block(static_cast<std::size_t>(b));
        partial.selfadjointView<Eigen::Lower>().rankUpdate(z, scale);
        ok = true;
      });
#pragma omp ordered
      {
        if (ok) total.triangularView<Eigen::Lower>() += partial;
      }
    }
  }
  slot.rethrow();
  total.triangularView<Eigen::StrictlyUpper>() = total.transpose();
  return total;
}

template <class F>
void for_each_task(std::size_t count, F&& f) {
  detail::ExceptionSlot slot;
  const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    slot.run([&] { f(static_cast<std::size_t>(i)); });
  }
  slot.rethrow();
}

}  // namespace parallel

}  // namespace randfeat::kernels
