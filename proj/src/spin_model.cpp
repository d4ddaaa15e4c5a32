#include "popper/spin_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace popper::spin {

namespace {

constexpr double kNormTolerance = 1e-12;

Matrix3 diagonalize_sx() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix3d sx;
  sx << 0, r, 0, r, 0, r, 0, r, 0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(sx);
  // Eigenvalues come out ascending: -1, 0, +1.
  Matrix3 u{};
  for (int row = 0; row < 3; ++row) {
    Eigen::Vector3d v = solver.eigenvectors().col(2 - row);
    const auto first = std::find_if(v.data(), v.data() + 3, [](double c) { return std::abs(c) > 1e-12; });
    if (*first < 0) v = -v;
    for (int col = 0; col < 3; ++col) u[row][col] = cplx(std::abs(v[col]) < 1e-15 ? 0.0 : v[col], 0.0);
  }
  return u;
}

// Amplitude of particle `p` in its `axis` basis state `row`, with the partner left in z.
// Returns the partner's (unnormalized) z amplitudes.
std::array<cplx, 3> project(const SpinState& state, Particle p, Axis axis, int row) {
  const Matrix3& psi = state.amplitudes();
  std::array<cplx, 3> partner{};
  for (int k = 0; k < 3; ++k) {
    if (axis == Axis::z) {
      partner[k] = (p == Particle::A) ? psi[row][k] : psi[k][row];
    } else {
      const auto& bra = x_basis_matrix()[row];
      cplx acc{};
      for (int j = 0; j < 3; ++j) acc += std::conj(bra[j]) * ((p == Particle::A) ? psi[j][k] : psi[k][j]);
      partner[k] = acc;
    }
  }
  return partner;
}

}  // namespace

int index_of(int m) {
  if (m < -1 || m > 1) throw DomainError("spin-1 eigenvalue must be +1, 0 or -1");
  return 1 - m;
}

int value_of(int index) { return 1 - index; }

SpinState::SpinState(const Matrix3& amplitudes) : amplitudes_(amplitudes) {
  double norm = 0.0;
  for (const auto& row : amplitudes_)
    for (const auto& c : row) norm += std::norm(c);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw DomainError("spin state is not normalized: sum |c|^2 = " + std::to_string(norm));
  }
}

SpinState make_popper_spin_state(double alpha, double beta) {
  const double norm = 2.0 * alpha * alpha + beta * beta;
  if (std::abs(norm - 1.0) > 1e-9) {
    throw DomainError("2 alpha^2 + beta^2 must equal 1, got " + std::to_string(norm));
  }
  // Renormalize away the admitted 1e-9 slack so the state invariant holds to 1e-12.
  const double s = 1.0 / std::sqrt(norm);
  Matrix3 amps{};
  amps[index_of(+1)][index_of(-1)] = alpha * s;
  amps[index_of(0)][index_of(0)] = beta * s;
  amps[index_of(-1)][index_of(+1)] = alpha * s;
  return SpinState(amps);
}

const Matrix3& x_basis_matrix() {
  static const Matrix3 u = diagonalize_sx();
  return u;
}

Distribution marginal_probabilities(const SpinState& state, Particle particle, Axis axis) {
  Distribution p{};
  for (int row = 0; row < 3; ++row) {
    for (const cplx& c : project(state, particle, axis, row)) p[row] += std::norm(c);
  }
  return p;
}

MeasurementOutcome condition_on(const SpinState& state, Particle particle, Axis axis, int value) {
  const int row = index_of(value);
  const auto partner = project(state, particle, axis, row);
  double prob = 0.0;
  for (const cplx& c : partner) prob += std::norm(c);
  if (prob < 1e-15) {
    throw ImpossibleOutcome("outcome " + std::to_string(value) + " has zero probability");
  }
  const double scale = 1.0 / std::sqrt(prob);
  // Post state |m>_measured (x) partner, written back in the z basis of both particles.
  Matrix3 post{};
  for (int j = 0; j < 3; ++j) {
    const cplx ket = (axis == Axis::z) ? cplx(j == row ? 1.0 : 0.0) : x_basis_matrix()[row][j];
    for (int k = 0; k < 3; ++k) {
      const cplx amp = ket * partner[k] * scale;
      if (particle == Particle::A) {
        post[j][k] = amp;
      } else {
        post[k][j] = amp;
      }
    }
  }
  return MeasurementOutcome{axis, particle, value, prob, SpinState(post)};
}

double eigenvalue_variance(const Distribution& p) {
  double mean = 0.0;
  double second = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double m = value_of(i);
    mean += m * p[i];
    second += m * m * p[i];
  }
  return second - mean * mean;
}

}  // namespace popper::spin
