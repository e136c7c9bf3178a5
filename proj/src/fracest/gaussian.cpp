#include "fracest/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>

#include "fracest/error.hpp"

namespace fracest {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

GaussianSampler::GaussianSampler(const std::vector<double>& cov, std::size_t dim) : dim_(dim) {
  if (dim == 0 || cov.size() != dim * dim) throw InvalidInput("covariance matrix has the wrong size");
  const Eigen::Map<const RowMatrix> c(cov.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  double scale = c.diagonal().maxCoeff();
  if (!(scale > 0.0)) scale = 1.0;
  for (double rel : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    RowMatrix m = c;
    m.diagonal().array() += rel * scale;
    Eigen::LLT<RowMatrix> llt(m);
    if (llt.info() == Eigen::Success) {
      jitter_ = rel * scale;
      RowMatrix l = llt.matrixL();
      lower_.assign(l.data(), l.data() + dim * dim);
      return;
    }
  }
  throw KernelNotPsd("covariance matrix not positive semidefinite after jitter 1e-8");
}

void GaussianSampler::sample(Philox& rng, std::vector<double>& out) const {
  std::vector<double> z(dim_);
  for (double& v : z) v = rng.normal();
  out.assign(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = lower_.data() + i * dim_;
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
    out[i] = acc;
  }
}

double min_eigenvalue(const std::vector<double>& sym, std::size_t dim) {
  if (dim == 0 || sym.size() != dim * dim) throw InvalidInput("matrix has the wrong size");
  const Eigen::Map<const RowMatrix> c(sym.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(c), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace fracest
