#pragma once

#include <cstdint>
#include <vector>

#include "sag/sag.hpp"

namespace sag::fixtures {

/// f_1 = x^2/2, f_2 = (x-2)^2/2: squared loss with a_i = 1 and targets 0, 2.
inline DatasetPtr toy_data() {
  std::vector<Example> ex;
  ex.push_back({SparseVector({{0, 1.0}}, 1), 0.0});
  ex.push_back({SparseVector({{0, 1.0}}, 1), 2.0});
  return share(Dataset(std::move(ex), 1));
}

inline Objective toy_objective() { return Objective(toy_data(), Loss::squared, 0.0); }

/// Single-component dataset.
inline DatasetPtr single_example(const DenseVector& a, double label) {
  std::vector<Example> ex;
  ex.push_back({SparseVector::from_dense(a), label});
  return share(Dataset(std::move(ex), static_cast<std::size_t>(a.size())));
}

inline DatasetPtr random_data(std::size_t n, std::size_t p, double density, std::uint64_t seed,
                              Loss loss = Loss::logistic) {
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.density = density;
  spec.seed = seed;
  spec.loss = loss;
  return share(make_synthetic(spec));
}

inline DenseVector random_vector(Rng& rng, std::size_t p, double scale = 1.0) {
  DenseVector v(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = scale * (2.0 * uniform_unit(rng) - 1.0);
  return v;
}

inline QuadraticCenters random_centers(std::size_t n, std::size_t p, double curvature, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd c(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < c.cols(); ++i) c.col(i) = random_vector(rng, p, 2.0);
  return QuadraticCenters(std::move(c), curvature);
}

/// Random memories and iterate around the fixed point.
inline Theta random_theta(Rng& rng, const Theta& center, double scale) {
  Theta t = center;
  for (Eigen::Index i = 0; i < t.y.cols(); ++i) t.y.col(i) += random_vector(rng, t.p(), scale);
  t.x += random_vector(rng, t.p(), scale);
  return t;
}

}  // namespace sag::fixtures
