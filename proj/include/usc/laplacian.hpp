#pragma once

#include <Eigen/Sparse>

#include <cstdint>
#include <atomic>
#include <memory>
#include <mutex>
#include <vector>

#include "usc/network.hpp"

namespace usc {

Eigen::SparseMatrix<double> laplacian_matrix(const Network& net);

/// Solves L_FF x = b on the free vertices F (complement of the fixed set),
/// optionally with a diagonal shift. Direct LDLT below direct_limit free
/// vertices, otherwise conjugate gradients with incomplete Cholesky.
class GroundedSolver {
 public:
  GroundedSolver(const Network& net, const std::vector<char>& fixed, double tol = 1e-10,
                 const std::vector<double>* diagonal_shift = nullptr, std::size_t direct_limit = 200000);
  ~GroundedSolver();
  GroundedSolver(const GroundedSolver&) = delete;
  GroundedSolver& operator=(const GroundedSolver&) = delete;

  /// rhs indexed by free position; returns solution in the same indexing.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  const std::vector<std::int64_t>& free_position() const { return position_; }
  const std::vector<std::uint32_t>& free_vertices() const { return free_; }
  const Eigen::SparseMatrix<double>& matrix() const { return a_; }
  int last_iterations() const { return last_iterations_.load(); }
  double last_residual() const { return last_residual_.load(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Eigen::SparseMatrix<double> a_;
  std::vector<std::int64_t> position_;
  std::vector<std::uint32_t> free_;
  mutable std::atomic<int> last_iterations_{0};
  mutable std::atomic<double> last_residual_{0.0};
  mutable std::mutex iterative_mutex_;
};

}  // namespace usc
