// Empirical spectral density of a weight matrix: the eigenvalues of W^T W,
// computed as squared singular values of W so we never square the condition
// number. Norm summaries all read off the ESD.
#pragma once

#include <Eigen/Dense>
#include <string>

#include "specmet/model_store.hpp"

namespace specmet {

// Relative floor below which eigenvalues are treated as exact zeros.
inline constexpr double kEsdZeroFloor = 1e-12;

struct ESD {
  std::string owner_layer;
  int slice_index = 0;
  Eigen::VectorXd eigenvalues;  // ascending, >= 0

  Eigen::Index n() const { return eigenvalues.size(); }
  double lambda_max() const { return n() ? eigenvalues[n() - 1] : 0.0; }
};

ESD esd(const WeightMatrix& w);

// Builds an ESD from raw eigenvalues (sorted and floor-clamped on the way in).
// Used when the spectrum is synthesized rather than measured.
ESD esd_from_eigenvalues(Eigen::VectorXd eigenvalues, std::string owner_layer = "synthetic",
                         int slice_index = 0);

double spectral_norm_sq(const ESD& e);   // lambda_max = ||W||_2^2
double frobenius_norm_sq(const ESD& e);  // sum lambda_i = ||W||_F^2
// sum over positive eigenvalues of lambda_i^a; a must be > 0
double shatten_norm_sum(const ESD& e, double a);

}  // namespace specmet
