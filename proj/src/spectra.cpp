#include "specmet/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "specmet/errors.hpp"

namespace specmet {
namespace {

std::string ident(const std::string& layer, int slice) {
  return "'" + layer + "' slice " + std::to_string(slice);
}

void clamp_floor(Eigen::VectorXd& eigs) {
  if (eigs.size() == 0) return;
  const double floor = kEsdZeroFloor * eigs[eigs.size() - 1];
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    if (eigs[i] < floor) eigs[i] = 0.0;
}

}  // namespace

ESD esd(const WeightMatrix& w) {
  if (w.rows() == 0 || w.cols() == 0)
    throw DomainError("cannot take ESD of empty matrix " + ident(w.owner_layer, w.slice_index));
  if (!w.values.allFinite())
    throw DataError("non-finite entries in matrix " + ident(w.owner_layer, w.slice_index));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(w.values);  // singular values only
  if (svd.info() != Eigen::Success)
    throw NumericError("SVD failed on matrix " + ident(w.owner_layer, w.slice_index));
  const Eigen::VectorXd& sv = svd.singularValues();  // descending

  ESD e;
  e.owner_layer = w.owner_layer;
  e.slice_index = w.slice_index;
  e.eigenvalues.resize(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double s = sv[sv.size() - 1 - i];
    e.eigenvalues[i] = s * s;
  }
  clamp_floor(e.eigenvalues);
  return e;
}

ESD esd_from_eigenvalues(Eigen::VectorXd eigenvalues, std::string owner_layer, int slice_index) {
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (!std::isfinite(eigenvalues[i]) || eigenvalues[i] < 0.0)
      throw DomainError("ESD eigenvalues must be finite and >= 0");
  }
  std::sort(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  clamp_floor(eigenvalues);
  ESD e;
  e.owner_layer = std::move(owner_layer);
  e.slice_index = slice_index;
  e.eigenvalues = std::move(eigenvalues);
  return e;
}

double spectral_norm_sq(const ESD& e) {
  if (e.n() == 0) throw DomainError("empty ESD for " + ident(e.owner_layer, e.slice_index));
  return e.lambda_max();
}

double frobenius_norm_sq(const ESD& e) {
  if (e.n() == 0) throw DomainError("empty ESD for " + ident(e.owner_layer, e.slice_index));
  return e.eigenvalues.sum();
}

double shatten_norm_sum(const ESD& e, double a) {
  if (e.n() == 0) throw DomainError("empty ESD for " + ident(e.owner_layer, e.slice_index));
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError("Shatten exponent must be finite and > 0, got " + std::to_string(a));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < e.n(); ++i)
    if (e.eigenvalues[i] > 0.0) sum += std::pow(e.eigenvalues[i], a);
  return sum;
}

}  // namespace specmet
