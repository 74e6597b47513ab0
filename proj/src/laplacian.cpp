#include "usc/laplacian.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>

#include "usc/errors.hpp"

namespace usc {

Eigen::SparseMatrix<double> laplacian_matrix(const Network& net) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(net.edges().size() * 4);
  for (const auto& e : net.edges()) {
    t.emplace_back(e.u, e.u, e.conductance);
    t.emplace_back(e.v, e.v, e.conductance);
    t.emplace_back(e.u, e.v, -e.conductance);
    t.emplace_back(e.v, e.u, -e.conductance);
  }
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::SparseMatrix<double> l(n, n);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

struct GroundedSolver::Impl {
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> direct;
  std::unique_ptr<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                           Eigen::IncompleteCholesky<double>>>
      cg;
  double tol = 1e-10;
};

GroundedSolver::GroundedSolver(const Network& net, const std::vector<char>& fixed, double tol,
                               const std::vector<double>* diagonal_shift, std::size_t direct_limit)
    : impl_(std::make_unique<Impl>()) {
  impl_->tol = tol;
  position_.assign(net.size(), -1);
  for (std::size_t v = 0; v < net.size(); ++v) {
    if (!fixed[v]) {
      position_[v] = static_cast<std::int64_t>(free_.size());
      free_.push_back(static_cast<std::uint32_t>(v));
    }
  }
  const auto nf = static_cast<Eigen::Index>(free_.size());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(net.edges().size() * 4 + free_.size());
  for (const auto& e : net.edges()) {
    const auto pu = position_[e.u], pv = position_[e.v];
    if (pu >= 0) t.emplace_back(pu, pu, e.conductance);
    if (pv >= 0) t.emplace_back(pv, pv, e.conductance);
    if (pu >= 0 && pv >= 0) {
      t.emplace_back(pu, pv, -e.conductance);
      t.emplace_back(pv, pu, -e.conductance);
    }
  }
  if (diagonal_shift) {
    for (std::size_t i = 0; i < free_.size(); ++i) t.emplace_back(i, i, (*diagonal_shift)[free_[i]]);
  }
  a_.resize(nf, nf);
  a_.setFromTriplets(t.begin(), t.end());
  if (free_.size() < direct_limit) {
    impl_->direct = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    impl_->direct->compute(a_);
    if (impl_->direct->info() != Eigen::Success) throw SolverError("LDLT factorization failed");
  } else {
    impl_->cg = std::make_unique<std::remove_reference_t<decltype(*impl_->cg)>>();
    impl_->cg->setTolerance(tol);
    impl_->cg->setMaxIterations(static_cast<Eigen::Index>(50.0 * std::sqrt(static_cast<double>(net.size()))));
    impl_->cg->compute(a_);
    if (impl_->cg->info() != Eigen::Success) throw SolverError("incomplete Cholesky setup failed");
  }
}

GroundedSolver::~GroundedSolver() = default;

Eigen::VectorXd GroundedSolver::solve(const Eigen::VectorXd& rhs) const {
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    last_iterations_ = 0;
    last_residual_ = 0.0;
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::VectorXd x;
  int iterations = 1;
  if (impl_->direct) {
    x = impl_->direct->solve(rhs);
  } else {
    const std::lock_guard<std::mutex> lock(iterative_mutex_);
    x = impl_->cg->solve(rhs);
    iterations = static_cast<int>(impl_->cg->iterations());
  }
  const double residual = (a_ * x - rhs).norm() / bnorm;
  last_iterations_ = iterations;
  last_residual_ = residual;
  if (!(residual <= impl_->tol * 10.0) || !x.allFinite()) {
    throw SolverError("linear solve stopped at relative residual " + std::to_string(residual) + " after " +
                      std::to_string(iterations) + " iterations");
  }
  return x;
}

}  // namespace usc
