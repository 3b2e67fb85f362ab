#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace sctm {

/// out = A * M for sparse A, parallelized over columns of M. Column results
/// are independent, so the parallel and serial paths are bit-identical.
void spmm(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& m,
          Eigen::MatrixXd& out, bool parallel);

/// Naive dense reference for spmm, kept for testing.
void spmm_reference(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& m,
                    Eigen::MatrixXd& out);

/// Lyapunov right-hand side out = A V + V A^T + D for symmetric V.
void lyapunov_rhs(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& v,
                  const Eigen::MatrixXd& d, Eigen::MatrixXd& out, bool parallel);

/// Dense triple-loop reference for lyapunov_rhs, kept for testing.
void lyapunov_rhs_reference(const Eigen::SparseMatrix<double>& a,
                            const Eigen::MatrixXd& v, const Eigen::MatrixXd& d,
                            Eigen::MatrixXd& out);

}  // namespace sctm
