#include "dynkc/metric.hpp"

#include <cmath>

namespace dynkc {

MetricSpace MetricSpace::from_matrix(std::vector<std::vector<double>> matrix) {
  std::size_t n = matrix.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) throw ValidationError("distance matrix is not square");
    if (matrix[i][i] != 0.0) throw ValidationError("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      double v = matrix[i][j];
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("distance matrix entries must be finite and nonnegative");
      if (v != matrix[j][i]) throw ValidationError("distance matrix must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        if (matrix[i][j] > matrix[i][l] + matrix[l][j])
          throw ValidationError("distance matrix violates the triangle inequality");
  MetricSpace m;
  m.matrix_ = std::move(matrix);
  return m;
}

void MetricSpace::add_point(PointId id, const std::vector<double>& coords) {
  if (known(id)) throw ValidationError("point id " + std::to_string(id) + " was already used");
  if (matrix_mode()) {
    if (!coords.empty()) throw ValidationError("matrix mode takes bare ids, not coordinates");
    if (id >= matrix_.size())
      throw ValidationError("point id " + std::to_string(id) + " exceeds the matrix size");
  } else {
    if (coords.empty()) throw ValidationError("euclidean mode requires coordinates");
    for (double c : coords)
      if (!std::isfinite(c)) throw ValidationError("coordinates must be finite");
    if (dim_ == 0) dim_ = coords.size();
    if (coords.size() != dim_)
      throw ValidationError("coordinate dimension mismatch for id " + std::to_string(id));
  }
  if (id >= live_.size()) {
    live_.resize(id + 1, 0);
    has_point_.resize(id + 1, 0);
    if (!matrix_mode()) coords_.resize(id + 1);
  }
  live_[id] = 1;
  has_point_[id] = 1;
  if (!matrix_mode()) coords_[id] = coords;
  ++live_count_;
}

void MetricSpace::remove_point(PointId id) {
  if (!is_live(id)) throw ValidationError("point id " + std::to_string(id) + " is not live");
  live_[id] = 0;
  --live_count_;
}

const std::vector<double>& MetricSpace::coords(PointId id) const {
  DYNKC_CHECK(!matrix_mode(), "matrix mode has no coordinates");
  DYNKC_CHECK(known(id), "unknown point id");
  return coords_[id];
}

double MetricSpace::dist(PointId a, PointId b) const {
  evals_.fetch_add(1, std::memory_order_relaxed);
  if (matrix_mode()) {
    DYNKC_CHECK(a < matrix_.size() && b < matrix_.size(), "matrix index out of range");
    return matrix_[a][b];
  }
  DYNKC_CHECK(known(a) && known(b), "distance between unknown points");
  const auto& ca = coords_[a];
  const auto& cb = coords_[b];
  double s = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    double d = ca[i] - cb[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace dynkc
