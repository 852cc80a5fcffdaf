#pragma once

#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "sag/data.hpp"
#include "sag/loss.hpp"

namespace sag {

/// Any smooth finite sum g(x) = (1/n) sum_i f_i(x) the generic algorithms
/// and the convergence-theory checks can run on.
template <class P>
concept FiniteSumProblem = requires(const P& f, std::size_t i, const DenseVector& x, DenseVector& out) {
  { f.n() } -> std::convertible_to<std::size_t>;
  { f.dim() } -> std::convertible_to<std::size_t>;
  { f.component_value(i, x) } -> std::convertible_to<double>;
  f.component_gradient(i, x, out);
  { f.value(x) } -> std::convertible_to<double>;
  f.gradient(x, out);
  f.hessian_vector(x, x, out);
};

struct ComponentEval {
  double value;
  DenseVector gradient;
  /// Gradient of the loss term alone; supported on the example's features.
  SparseVector loss_gradient;
};

struct BatchEval {
  double value;
  DenseVector gradient;
};

struct ProblemConstants {
  /// Lipschitz constant of every component gradient.
  double L;
  /// Guaranteed strong convexity constant (the regularization strength).
  double mu;
};

/// l2-regularized empirical risk over a linear model:
///   f_i(x) = (lambda/2)|x|^2 + loss(a_i'x, b_i).
class Objective {
 public:
  Objective(DatasetPtr data, Loss loss, double lambda) : data_(std::move(data)), loss_(loss), lambda_(lambda) {
    if (!data_) throw std::invalid_argument("objective needs a dataset");
    if (!(lambda_ >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    if (loss_ == Loss::logistic && !data_->binary_labels())
      throw std::invalid_argument("logistic loss requires labels in {-1, +1}");
  }

  std::size_t n() const { return data_->n(); }
  std::size_t dim() const { return data_->p(); }
  double lambda() const { return lambda_; }
  Loss loss() const { return loss_; }
  const Dataset& data() const { return *data_; }
  const DatasetPtr& data_ptr() const { return data_; }

  const Example& example(std::size_t i) const {
    if (i >= n()) throw std::out_of_range("component index " + std::to_string(i) + " out of range");
    return (*data_)[i];
  }

  double margin(std::size_t i, const DenseVector& x) const { return example(i).features.dot(x); }
  double loss_value(std::size_t i, double z) const { return loss::value(loss_, z, (*data_)[i].label); }
  double loss_derivative(std::size_t i, double z) const { return loss::derivative(loss_, z, (*data_)[i].label); }

  double component_value(std::size_t i, const DenseVector& x) const {
    check_dim(x);
    return 0.5 * lambda_ * x.squaredNorm() + loss_value(i, margin(i, x));
  }

  void component_gradient(std::size_t i, const DenseVector& x, DenseVector& out) const {
    check_dim(x);
    const auto& ex = example(i);
    const double s = loss::derivative(loss_, ex.features.dot(x), ex.label);
    out = lambda_ * x;
    ex.features.add_to(out, s);
  }

  ComponentEval component_eval(std::size_t i, const DenseVector& x) const {
    check_dim(x);
    const auto& ex = example(i);
    const double z = ex.features.dot(x);
    const double s = loss::derivative(loss_, z, ex.label);
    ComponentEval r{0.5 * lambda_ * x.squaredNorm() + loss::value(loss_, z, ex.label), lambda_ * x,
                    ex.features.scaled(s)};
    ex.features.add_to(r.gradient, s);
    return r;
  }

  double value(const DenseVector& x) const {
    check_dim(x);
    double sum = 0.0;
    for (const auto& ex : data_->examples()) sum += loss::value(loss_, ex.features.dot(x), ex.label);
    return 0.5 * lambda_ * x.squaredNorm() + sum / static_cast<double>(n());
  }

  void gradient(const DenseVector& x, DenseVector& out) const {
    check_dim(x);
    DenseVector acc = DenseVector::Zero(x.size());
    for (const auto& ex : data_->examples())
      ex.features.add_to(acc, loss::derivative(loss_, ex.features.dot(x), ex.label));
    out = lambda_ * x + acc / static_cast<double>(n());
  }

  /// Value and gradient in one sweep, summing components in index order.
  BatchEval batch_eval(const DenseVector& x) const {
    check_dim(x);
    double sum = 0.0;
    DenseVector acc = DenseVector::Zero(x.size());
    for (const auto& ex : data_->examples()) {
      const double z = ex.features.dot(x);
      sum += loss::value(loss_, z, ex.label);
      ex.features.add_to(acc, loss::derivative(loss_, z, ex.label));
    }
    const auto n_d = static_cast<double>(n());
    return {0.5 * lambda_ * x.squaredNorm() + sum / n_d, lambda_ * x + acc / n_d};
  }

  void hessian_vector(const DenseVector& x, const DenseVector& v, DenseVector& out) const {
    check_dim(x);
    DenseVector acc = DenseVector::Zero(x.size());
    for (const auto& ex : data_->examples()) {
      const double h = loss::curvature(loss_, ex.features.dot(x), ex.label);
      if (h != 0.0) ex.features.add_to(acc, h * ex.features.dot(v));
    }
    out = lambda_ * v + acc / static_cast<double>(n());
  }

 private:
  void check_dim(const DenseVector& x) const {
    if (static_cast<std::size_t>(x.size()) != dim())
      throw std::invalid_argument("iterate dimension " + std::to_string(x.size()) + " != " +
                                  std::to_string(dim()));
  }

  DatasetPtr data_;
  Loss loss_;
  double lambda_;
};

static_assert(FiniteSumProblem<Objective>);

/// L = lambda + (max loss curvature) * max_i |a_i|^2, mu = lambda. The
/// component Hessian is lambda*I + l''(a'x) a a', whose top eigenvalue is
/// bounded by the squared norm of a_i.
inline ProblemConstants lipschitz_constant(const Objective& f) {
  return {f.lambda() + loss::max_curvature(f.loss()) * f.data().max_squared_norm(), f.lambda()};
}

/// Central differences of g, one coordinate at a time.
template <FiniteSumProblem P>
DenseVector finite_diff_gradient(const P& f, const DenseVector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  DenseVector out(x.size());
  DenseVector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = f.value(probe);
    probe[j] = x[j] - h;
    const double down = f.value(probe);
    probe[j] = x[j];
    out[j] = (up - down) / (2.0 * h);
  }
  return out;
}

/// Batch evaluation for any problem; Objective has a fused overload.
template <FiniteSumProblem P>
BatchEval batch_eval(const P& f, const DenseVector& x) {
  DenseVector g;
  f.gradient(x, g);
  return {f.value(x), std::move(g)};
}

inline BatchEval batch_eval(const Objective& f, const DenseVector& x) { return f.batch_eval(x); }

/// f_i(x) = (c/2)|x - center_i|^2. Every component has curvature exactly c,
/// so L = mu = c; used where the large-step analysis needs n*mu/L >= 8 with
/// only a handful of components.
class QuadraticCenters {
 public:
  QuadraticCenters(Eigen::MatrixXd centers, double curvature)
      : centers_(std::move(centers)), curvature_(curvature) {
    if (centers_.cols() == 0 || centers_.rows() == 0) throw std::invalid_argument("need at least one center");
    if (!(curvature_ > 0.0)) throw std::invalid_argument("curvature must be positive");
  }

  std::size_t n() const { return static_cast<std::size_t>(centers_.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(centers_.rows()); }
  double curvature() const { return curvature_; }
  const Eigen::MatrixXd& centers() const { return centers_; }
  ProblemConstants constants() const { return {curvature_, curvature_}; }
  DenseVector minimizer() const { return centers_.rowwise().mean(); }

  double component_value(std::size_t i, const DenseVector& x) const {
    return 0.5 * curvature_ * (x - centers_.col(static_cast<Eigen::Index>(i))).squaredNorm();
  }
  void component_gradient(std::size_t i, const DenseVector& x, DenseVector& out) const {
    out = curvature_ * (x - centers_.col(static_cast<Eigen::Index>(i)));
  }
  double value(const DenseVector& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n(); ++i) s += component_value(i, x);
    return s / static_cast<double>(n());
  }
  void gradient(const DenseVector& x, DenseVector& out) const {
    DenseVector acc = DenseVector::Zero(x.size());
    DenseVector gi;
    for (std::size_t i = 0; i < n(); ++i) {
      component_gradient(i, x, gi);
      acc += gi;
    }
    out = acc / static_cast<double>(n());
  }
  void hessian_vector(const DenseVector&, const DenseVector& v, DenseVector& out) const { out = curvature_ * v; }

 private:
  Eigen::MatrixXd centers_;
  double curvature_;
};

static_assert(FiniteSumProblem<QuadraticCenters>);

}  // namespace sag
