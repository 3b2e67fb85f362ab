#include "sctm/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sctm {

void spmm(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& m,
          Eigen::MatrixXd& out, bool parallel) {
  const Eigen::Index cols = m.cols();
  out.resize(a.rows(), cols);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && cols > 8)
#else
  (void)parallel;
#endif
  for (Eigen::Index c = 0; c < cols; ++c) {
    out.col(c).setZero();
    for (int k = 0; k < a.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
        out(it.row(), c) += it.value() * m(it.col(), c);
      }
    }
  }
}

void spmm_reference(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& m,
                    Eigen::MatrixXd& out) {
  out.resize(a.rows(), m.cols());
  out.setZero();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (int k = 0; k < a.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
        out(it.row(), c) += it.value() * m(it.col(), c);
      }
    }
  }
}

void lyapunov_rhs(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& v,
                  const Eigen::MatrixXd& d, Eigen::MatrixXd& out, bool parallel) {
  static thread_local Eigen::MatrixXd w;
  spmm(a, v, w, parallel);
  out = w + w.transpose() + d;
}

void lyapunov_rhs_reference(const Eigen::SparseMatrix<double>& a,
                            const Eigen::MatrixXd& v, const Eigen::MatrixXd& d,
                            Eigen::MatrixXd& out) {
  Eigen::MatrixXd w;
  spmm_reference(a, v, w);
  out = w + w.transpose() + d;
}

}  // namespace sctm
