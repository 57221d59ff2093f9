// Copyright 2026 The nmrswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nmrswitch/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "nmrswitch/errors.hpp"

namespace nmrswitch::qcore {

namespace {

constexpr Complex kI{0.0, 1.0};

bool all_finite(const Matrix& m) { return m.allFinite(); }

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " +
                            std::to_string(a) + " vs " + std::to_string(b));
  }
}

double wrap_phase(double phi) {
  double r = std::remainder(phi, 2.0 * kPi);
  return r <= -kPi ? r + 2.0 * kPi : r;
}

}  // namespace

std::size_t spins_for_dimension(std::size_t dim) {
  if (dim < 2 || !std::has_single_bit(dim) ||
      dim > (std::size_t{1} << kMaxSpins)) {
    throw std::invalid_argument("dimension " + std::to_string(dim) +
                                " is not a supported power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(dim));
}

// ---------------------------------------------------------------------------
// UnitaryOperator

UnitaryOperator::UnitaryOperator(Matrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("unitary operator must be square");
  }
  (void)spins_for_dimension(dim());
  if (!all_finite(m_)) {
    throw std::invalid_argument("unitary operator has non-finite entries");
  }
  if (double err = unitarity_error(); !(err <= tol)) {
    throw std::invalid_argument("matrix is not unitary (deviation " +
                                std::to_string(err) + ")");
  }
}

UnitaryOperator UnitaryOperator::assume_unitary(Matrix m) {
  return UnitaryOperator(std::move(m), Trusted{});
}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
  (void)spins_for_dimension(dim);
  const auto d = static_cast<Eigen::Index>(dim);
  return UnitaryOperator(Matrix::Identity(d, d), Trusted{});
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return UnitaryOperator(m_.adjoint(), Trusted{});
}

UnitaryOperator UnitaryOperator::with_phase(double phi) const {
  return UnitaryOperator(m_ * std::polar(1.0, phi), Trusted{});
}

double UnitaryOperator::unitarity_error() const {
  const Matrix product = m_ * m_.adjoint();
  return max_abs(product - Matrix::Identity(m_.rows(), m_.cols()));
}

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b) {
  require_same_dim(a.dim(), b.dim(), "operator product");
  return UnitaryOperator(a.m_ * b.m_, UnitaryOperator::Trusted{});
}

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(Vector amplitudes, double tol)
    : amps_(std::move(amplitudes)) {
  (void)spins_for_dimension(dim());
  if (!amps_.allFinite()) {
    throw std::invalid_argument("state has non-finite amplitudes");
  }
  const double norm2 = amps_.squaredNorm();
  if (!(std::abs(norm2 - 1.0) <= tol)) {
    throw std::invalid_argument("state is not normalized (norm^2 = " +
                                std::to_string(norm2) + ")");
  }
}

StateVector StateVector::basis(std::size_t nspins, std::size_t index) {
  if (nspins == 0 || nspins > kMaxSpins) {
    throw std::invalid_argument("unsupported register size");
  }
  const std::size_t dim = std::size_t{1} << nspins;
  if (index >= dim) {
    throw std::out_of_range("basis index out of range");
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v), Trusted{});
}

StateVector StateVector::assume_normalized(Vector amplitudes) {
  (void)spins_for_dimension(static_cast<std::size_t>(amplitudes.size()));
  return StateVector(std::move(amplitudes), Trusted{});
}

DensityOperator::DensityOperator(Matrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) {
    throw std::invalid_argument("density operator must be square");
  }
  (void)spins_for_dimension(dim());
  if (!all_finite(rho_)) {
    throw std::invalid_argument("density operator has non-finite entries");
  }
  if (max_abs(rho_ - rho_.adjoint()) > 1e-12) {
    throw std::invalid_argument("density operator is not Hermitian");
  }
  if (std::abs(rho_.trace() - Complex{1.0, 0.0}) > 1e-12) {
    throw std::invalid_argument("density operator trace is not 1");
  }
  const Matrix hermitian = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian,
                                               Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("density operator is not positive");
  }
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  const Vector& v = psi.amplitudes();
  return DensityOperator(v * v.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(std::size_t nspins) {
  if (nspins == 0 || nspins > kMaxSpins) {
    throw std::invalid_argument("unsupported register size");
  }
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << nspins);
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
}

// ---------------------------------------------------------------------------
// Axes and spin operators

SpinAxis negate(SpinAxis axis) {
  switch (axis) {
    case SpinAxis::PlusX: return SpinAxis::MinusX;
    case SpinAxis::MinusX: return SpinAxis::PlusX;
    case SpinAxis::PlusY: return SpinAxis::MinusY;
    case SpinAxis::MinusY: return SpinAxis::PlusY;
    case SpinAxis::PlusZ: return SpinAxis::MinusZ;
    case SpinAxis::MinusZ: return SpinAxis::PlusZ;
  }
  throw std::logic_error("bad axis");
}

bool is_negative(SpinAxis axis) {
  return axis == SpinAxis::MinusX || axis == SpinAxis::MinusY ||
         axis == SpinAxis::MinusZ;
}

std::string_view to_string(SpinAxis axis) {
  switch (axis) {
    case SpinAxis::PlusX: return "+x";
    case SpinAxis::MinusX: return "-x";
    case SpinAxis::PlusY: return "+y";
    case SpinAxis::MinusY: return "-y";
    case SpinAxis::PlusZ: return "+z";
    case SpinAxis::MinusZ: return "-z";
  }
  throw std::logic_error("bad axis");
}

SpinAxis parse_axis(std::string_view token) {
  if (token == "+x" || token == "x") return SpinAxis::PlusX;
  if (token == "-x") return SpinAxis::MinusX;
  if (token == "+y" || token == "y") return SpinAxis::PlusY;
  if (token == "-y") return SpinAxis::MinusY;
  if (token == "+z" || token == "z") return SpinAxis::PlusZ;
  if (token == "-z") return SpinAxis::MinusZ;
  throw ParseError(0, "unknown axis '" + std::string(token) + "'");
}

Matrix2 spin_x() {
  Matrix2 m;
  m << 0.0, 0.5, 0.5, 0.0;
  return m;
}

Matrix2 spin_y() {
  Matrix2 m;
  m << 0.0, -0.5 * kI, 0.5 * kI, 0.0;
  return m;
}

Matrix2 spin_z() {
  Matrix2 m;
  m << 0.5, 0.0, 0.0, -0.5;
  return m;
}

Matrix2 spin_operator(SpinAxis axis) {
  switch (axis) {
    case SpinAxis::PlusX: return spin_x();
    case SpinAxis::MinusX: return -spin_x();
    case SpinAxis::PlusY: return spin_y();
    case SpinAxis::MinusY: return -spin_y();
    case SpinAxis::PlusZ: return spin_z();
    case SpinAxis::MinusZ: return -spin_z();
  }
  throw std::logic_error("bad axis");
}

UnitaryOperator pauli_x() {
  return UnitaryOperator::assume_unitary(Matrix(2.0 * spin_x()));
}
UnitaryOperator pauli_y() {
  return UnitaryOperator::assume_unitary(Matrix(2.0 * spin_y()));
}
UnitaryOperator pauli_z() {
  return UnitaryOperator::assume_unitary(Matrix(2.0 * spin_z()));
}

UnitaryOperator hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  m << s, s, s, -s;
  return UnitaryOperator::assume_unitary(std::move(m));
}

// ---------------------------------------------------------------------------
// Products and embeddings

namespace {

Matrix kron_matrix(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

UnitaryOperator kron(const UnitaryOperator& a, const UnitaryOperator& b) {
  if (a.nspins() + b.nspins() > kMaxSpins) {
    throw std::invalid_argument("kron: register too large");
  }
  return UnitaryOperator::assume_unitary(kron_matrix(a.matrix(), b.matrix()));
}

Matrix embed_operator(const Matrix2& op, std::size_t spin,
                      std::size_t nspins) {
  if (nspins == 0 || nspins > kMaxSpins) {
    throw std::invalid_argument("unsupported register size");
  }
  if (spin >= nspins) {
    throw std::out_of_range("spin " + std::to_string(spin) +
                            " out of range for " + std::to_string(nspins) +
                            " spins");
  }
  const auto left = static_cast<Eigen::Index>(std::size_t{1} << spin);
  const auto right =
      static_cast<Eigen::Index>(std::size_t{1} << (nspins - 1 - spin));
  return kron_matrix(kron_matrix(Matrix::Identity(left, left), Matrix(op)),
                     Matrix::Identity(right, right));
}

UnitaryOperator rotation(SpinAxis axis, double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("rotation angle must be finite");
  }
  // exp(-i theta I_axis) with I_{-a} = -I_a.
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const Matrix2 sigma = 2.0 * spin_operator(axis);
  Matrix m = c * Matrix::Identity(2, 2) - kI * s * Matrix(sigma);
  return UnitaryOperator::assume_unitary(std::move(m));
}

UnitaryOperator embed(const UnitaryOperator& u, std::size_t spin,
                      std::size_t nspins) {
  if (u.dim() != 2) {
    throw DimensionMismatch("embed expects a single-spin operator");
  }
  return UnitaryOperator::assume_unitary(
      embed_operator(Matrix2(u.matrix()), spin, nspins));
}

void left_multiply(Matrix& m, const Matrix2& g, std::size_t spin,
                   std::size_t nspins) {
  if (spin >= nspins) throw std::out_of_range("spin out of range");
  const auto dim = static_cast<std::size_t>(m.rows());
  require_same_dim(dim, std::size_t{1} << nspins, "left_multiply");
  const std::size_t mask = spin_mask(spin, nspins);
  const Complex g00 = g(0, 0), g01 = g(0, 1), g10 = g(1, 0), g11 = g(1, 1);
  for (std::size_t i0 = 0; i0 < dim; ++i0) {
    if (i0 & mask) continue;
    const auto r0 = static_cast<Eigen::Index>(i0);
    const auto r1 = static_cast<Eigen::Index>(i0 | mask);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex a = m(r0, c);
      const Complex b = m(r1, c);
      m(r0, c) = g00 * a + g01 * b;
      m(r1, c) = g10 * a + g11 * b;
    }
  }
}

void left_multiply(Matrix& m, const Matrix4& g, std::size_t first,
                   std::size_t second, std::size_t nspins) {
  if (first >= nspins || second >= nspins) {
    throw std::out_of_range("spin out of range");
  }
  if (first == second) {
    throw std::invalid_argument("two-spin gate needs distinct spins");
  }
  const auto dim = static_cast<std::size_t>(m.rows());
  require_same_dim(dim, std::size_t{1} << nspins, "left_multiply");
  const std::size_t mf = spin_mask(first, nspins);
  const std::size_t ms = spin_mask(second, nspins);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & (mf | ms)) continue;
    const Eigen::Index rows[4] = {
        static_cast<Eigen::Index>(base),
        static_cast<Eigen::Index>(base | ms),
        static_cast<Eigen::Index>(base | mf),
        static_cast<Eigen::Index>(base | mf | ms),
    };
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      Complex in[4];
      for (int k = 0; k < 4; ++k) in[k] = m(rows[k], c);
      for (int r = 0; r < 4; ++r) {
        Complex acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += g(r, k) * in[k];
        m(rows[r], c) = acc;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Global phase

namespace {

double deviation_at(const Matrix& u, const Matrix& v, double phi) {
  const Complex phase = std::polar(1.0, phi);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      worst = std::max(worst, std::abs(u(i, j) - phase * v(i, j)));
    }
  }
  return worst;
}

}  // namespace

PhaseAlignment align_global_phase(const UnitaryOperator& u,
                                  const UnitaryOperator& v) {
  require_same_dim(u.dim(), v.dim(), "global phase distance");
  const Matrix& a = u.matrix();
  const Matrix& b = v.matrix();

  // Seed: the phase that best aligns the two in Frobenius norm.
  const Complex overlap_trace = (b.adjoint() * a).trace();
  double seed = 0.0;
  if (std::abs(overlap_trace) > 1e-14) {
    seed = std::arg(overlap_trace);
  } else {
    Eigen::Index bi = 0, bj = 0;
    a.cwiseAbs().maxCoeff(&bi, &bj);
    if (std::abs(b(bi, bj)) > 0.0) {
      seed = std::arg(a(bi, bj)) - std::arg(b(bi, bj));
    }
  }

  double best_phi = seed;
  double best = deviation_at(a, b, seed);

  // The max-norm objective is a maximum of shifted sinusoids; scan a grid
  // then polish the best cell by golden-section search.
  constexpr int kGrid = 64;
  constexpr double kStep = 2.0 * kPi / kGrid;
  for (int k = 0; k < kGrid; ++k) {
    const double phi = seed + k * kStep;
    const double d = deviation_at(a, b, phi);
    if (d < best) {
      best = d;
      best_phi = phi;
    }
  }

  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_phi - kStep;
  double hi = best_phi + kStep;
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = deviation_at(a, b, x1);
  double f2 = deviation_at(a, b, x2);
  for (int it = 0; it < 120 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = deviation_at(a, b, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = deviation_at(a, b, x2);
    }
  }
  for (auto [phi, d] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (d < best) {
      best = d;
      best_phi = phi;
    }
  }
  return PhaseAlignment{best, wrap_phase(best_phi)};
}

double global_phase_distance(const UnitaryOperator& u,
                             const UnitaryOperator& v) {
  return align_global_phase(u, v).distance;
}

StateVector apply(const UnitaryOperator& u, const StateVector& s) {
  require_same_dim(u.dim(), s.dim(), "apply");
  return StateVector::assume_normalized(u.matrix() * s.amplitudes());
}

double overlap(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "overlap");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace nmrswitch::qcore
