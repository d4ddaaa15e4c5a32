#pragma once

// Two entangled spin-1 particles A and B.  Single-particle basis order is
// (m = +1, 0, -1) everywhere: in amplitude storage, in probability triples and in I/O.

#include <array>
#include <complex>

#include "popper/errors.hpp"

namespace popper::spin {

using cplx = std::complex<double>;
using Matrix3 = std::array<std::array<cplx, 3>, 3>;
using Distribution = std::array<double, 3>;  ///< (p(+1), p(0), p(-1))

enum class Axis { x, z };
enum class Particle { A, B };

/// Eigenvalue m in {+1, 0, -1}  <->  basis index {0, 1, 2}.
int index_of(int m);
int value_of(int index);

class SpinState {
 public:
  /// amplitudes[iA][iB] in the z basis of both particles.
  explicit SpinState(const Matrix3& amplitudes);

  const Matrix3& amplitudes() const { return amplitudes_; }
  cplx amplitude(int mA, int mB) const { return amplitudes_[index_of(mA)][index_of(mB)]; }

 private:
  Matrix3 amplitudes_;
};

struct MeasurementOutcome {
  Axis axis;
  Particle particle;
  int value;
  double probability;
  SpinState post_state;
};

/// alpha |+1,-1> + beta |0,0> + alpha |-1,+1>, requiring 2 alpha^2 + beta^2 = 1.
SpinState make_popper_spin_state(double alpha, double beta);

/// Rows are the S_x eigenvectors for m = +1, 0, -1 expressed in the S_z basis,
/// each with its first nonzero component real and positive.
const Matrix3& x_basis_matrix();

Distribution marginal_probabilities(const SpinState& state, Particle particle, Axis axis);

MeasurementOutcome condition_on(const SpinState& state, Particle particle, Axis axis, int value);

/// Variance of the eigenvalue {+1, 0, -1} under a distribution.
double eigenvalue_variance(const Distribution& p);

}  // namespace popper::spin
