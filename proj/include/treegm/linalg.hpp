#pragma once

// Dense symmetric linear algebra: packed symmetric storage, Cholesky with
// log-determinant, a Jacobi eigensolver, standardization, graph-structured
// covariance construction, and Gaussian sampling.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "treegm/graph.hpp"

namespace treegm {

// Symmetric matrix with each entry stored once (packed lower triangle,
// diagonal included), so symmetry cannot drift.
class SymMatrix {
 public:
  SymMatrix() : dim_(0) {}
  explicit SymMatrix(int dim) : dim_(dim), data_(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0) {
    if (dim < 1) throw validation_error("SymMatrix: dimension must be positive");
  }

  static SymMatrix identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
  }

  static SymMatrix scaled_identity(int dim, double s) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, s);
    return m;
  }

  // Averages (i,j) and (j,i) so tiny asymmetry from dense arithmetic is folded away.
  static SymMatrix from_dense(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw validation_error("SymMatrix: matrix not square");
    SymMatrix m(static_cast<int>(a.rows()));
    for (int i = 0; i < m.dim_; ++i)
      for (int j = 0; j <= i; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    return m;
  }

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return data_[slot(i, j)]; }
  void set(int i, int j, double v) { data_[slot(i, j)] = v; }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd a(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = (*this)(i, j);
    return a;
  }

  // Principal submatrix over the given nodes, in the given order.
  SymMatrix submatrix(const std::vector<int>& nodes) const {
    SymMatrix s(static_cast<int>(nodes.size()));
    for (size_t i = 0; i < nodes.size(); ++i)
      for (size_t j = 0; j <= i; ++j) s.set(static_cast<int>(i), static_cast<int>(j), (*this)(nodes[i], nodes[j]));
    return s;
  }

 private:
  size_t slot(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_) throw validation_error("SymMatrix: index out of range");
    if (i < j) std::swap(i, j);
    return static_cast<size_t>(i) * (i + 1) / 2 + j;
  }

  int dim_;
  std::vector<double> data_;
};

struct CholeskyResult {
  Eigen::MatrixXd factor;  // lower triangular, A = L L'
  double logdet;
};

// Plain Cholesky; reports the failing pivot on non-PD input.
inline CholeskyResult cholesky_logdet(const Eigen::MatrixXd& a) {
  int n = static_cast<int>(a.rows());
  if (a.cols() != n || n < 1) throw validation_error("cholesky_logdet: matrix not square");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  double logdet = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d))
      throw numeric_error("cholesky: non-positive pivot at index " + std::to_string(j));
    l(j, j) = std::sqrt(d);
    logdet += std::log(d);
    for (int i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return {std::move(l), logdet};
}

inline CholeskyResult cholesky_logdet(const SymMatrix& m) { return cholesky_logdet(m.to_dense()); }

// A = L L' -> A^{-1} via two triangular solves.
inline Eigen::MatrixXd inverse_from_cholesky(const Eigen::MatrixXd& l) {
  int n = static_cast<int>(l.rows());
  Eigen::MatrixXd inv = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  return l.transpose().triangularView<Eigen::Upper>().solve(inv);
}

// Cyclic Jacobi sweeps; ascending eigenvalues. Used where an actual spectrum
// is required (eigenvalue shifts) and as a cross-check oracle elsewhere.
inline std::vector<double> jacobi_eigenvalues(const Eigen::MatrixXd& input) {
  int n = static_cast<int>(input.rows());
  if (input.cols() != n || n < 1) throw validation_error("jacobi_eigenvalues: matrix not square");
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-26 * std::max(1.0, a.diagonal().squaredNorm())) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        Eigen::VectorXd ap = a.col(p), aq = a.col(q);
        a.col(p) = c * ap - s * aq;
        a.col(q) = s * ap + c * aq;
        ap = a.row(p).transpose();
        aq = a.row(q).transpose();
        a.row(p) = (c * ap - s * aq).transpose();
        a.row(q) = (s * ap + c * aq).transpose();
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Subtract column means.
inline Eigen::MatrixXd center(const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw validation_error("center: need at least one observation");
  return x.rowwise() - x.colwise().mean();
}

// DMD with d_ii = m_ii^{-1/2}: rescales to unit diagonal.
inline SymMatrix standardize(const SymMatrix& m) {
  int n = m.dim();
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) {
    if (!(m(i, i) > 0.0)) throw validation_error("standardize: non-positive diagonal entry at " + std::to_string(i));
    d[i] = 1.0 / std::sqrt(m(i, i));
  }
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) out.set(i, j, m(i, j) * d[i] * d[j]);
  return out;
}

// log Gamma_q(a) = q(q-1)/4 * log(pi) + sum_{j=1..q} log Gamma(a + (1-j)/2)
inline double log_multigamma(int q, double a) {
  if (q < 1) throw validation_error("log_multigamma: order must be positive");
  if (!(a + (1.0 - q) / 2.0 > 0.0)) throw validation_error("log_multigamma: argument out of domain");
  double s = 0.25 * q * (q - 1) * std::log(M_PI);
  for (int j = 1; j <= q; ++j) s += std::lgamma(a + (1.0 - j) / 2.0);
  return s;
}

// True iff a star's partial correlations can coexist: sum of squares < 1.
inline bool star_validity(const std::vector<double>& partials) {
  if (partials.empty()) throw validation_error("star_validity: need at least one value");
  double s = 0.0;
  for (double c : partials) s += c * c;
  return s < 1.0;
}

// Marginal correlations implied by a 3-node V-shape with standardized
// precision entries c12, c13 at the two edges.
struct VShapeCorrelations {
  double r12, r13, r23;
};

inline VShapeCorrelations vshape_correlations(double c12, double c13) {
  if (!(c12 * c12 < 1.0) || !(c13 * c13 < 1.0) || !(c12 * c12 + c13 * c13 < 1.0))
    throw validation_error("vshape_correlations: precision entries violate positive-definiteness");
  double r12 = -c12 / std::sqrt(1.0 - c13 * c13);
  double r13 = -c13 / std::sqrt(1.0 - c12 * c12);
  return {r12, r13, r12 * r13};
}

// Covariance whose GGM is exactly g: precision = I with -r at edge slots,
// inverted and rescaled to a correlation matrix.
inline SymMatrix cov_from_graph(const LabeledGraph& g, double r) {
  int p = g.p();
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(p, p);
  for (auto [u, v] : g.edges()) k(u, v) = k(v, u) = -r;
  auto chol = cholesky_logdet(k);  // throws numeric_error when the edge value is too strong
  return standardize(SymMatrix::from_dense(inverse_from_cholesky(chol.factor)));
}

// Same construction from an arbitrary candidate precision: if k0 is not PD,
// shift the diagonal until the smallest eigenvalue equals margin.
inline SymMatrix cov_from_graph_eigshift(const LabeledGraph& g, const SymMatrix& k0, double margin = 0.1) {
  int p = g.p();
  if (k0.dim() != p) throw validation_error("cov_from_graph_eigshift: dimension mismatch");
  if (!(margin > 0.0)) throw validation_error("cov_from_graph_eigshift: margin must be positive");
  for (int i = 0; i < p; ++i) {
    if (!(k0(i, i) > 0.0)) throw validation_error("cov_from_graph_eigshift: non-positive diagonal");
    for (int j = 0; j < i; ++j)
      if (!g.has_edge(i, j) && k0(i, j) != 0.0)
        throw validation_error("cov_from_graph_eigshift: nonzero entry off the graph");
  }
  Eigen::MatrixXd k = k0.to_dense();
  double lmin = jacobi_eigenvalues(k).front();
  if (lmin <= 0.0) k.diagonal().array() += margin - lmin;
  auto chol = cholesky_logdet(k);
  return standardize(SymMatrix::from_dense(inverse_from_cholesky(chol.factor)));
}

// n zero-mean draws with the given covariance: rows of (L z)^T.
inline Eigen::MatrixXd sample_mvn(const SymMatrix& sigma, int n, uint64_t seed) {
  if (n < 0) throw validation_error("sample_mvn: negative sample count");
  int p = sigma.dim();
  auto chol = cholesky_logdet(sigma);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd z(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z(j) = gauss(rng);
    x.row(i) = (chol.factor * z).transpose();
  }
  return x;
}

// Sample partial correlations: invert the sample covariance, standardize,
// negate off-diagonals.
inline SymMatrix sample_partial_correlations(const Eigen::MatrixXd& x) {
  int n = static_cast<int>(x.rows());
  if (n < 2) throw validation_error("sample_partial_correlations: need n >= 2");
  Eigen::MatrixXd xc = center(x);
  Eigen::MatrixXd cov = xc.transpose() * xc / static_cast<double>(n - 1);
  auto chol = cholesky_logdet(cov);
  SymMatrix c = standardize(SymMatrix::from_dense(inverse_from_cholesky(chol.factor)));
  SymMatrix out(c.dim());
  for (int i = 0; i < c.dim(); ++i) {
    out.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) out.set(i, j, -c(i, j));
  }
  return out;
}

}  // namespace treegm
