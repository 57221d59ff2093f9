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

// Dense complex linear algebra for small spin registers.
//
// Basis convention: for an n-spin register the computational basis index
// has spin 0 as its most significant bit, so |b0 b1 ... b(n-1)> lives at
// index sum_k b_k * 2^(n-1-k). Every Kronecker product and embedding in
// this library follows that ordering.

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace nmrswitch::qcore {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;

// Closed-form algebra (single rotations, Kronecker products).
inline constexpr double kClosedFormTol = 1e-12;
// Unitarity check applied when wrapping an arbitrary matrix.
inline constexpr double kUnitaryTol = 1e-10;
// Products of many compiled pulses.
inline constexpr double kCompiledTol = 1e-9;

// Largest register handled by the dense representation.
inline constexpr std::size_t kMaxSpins = 12;

// Returns log2(dim); throws std::invalid_argument unless dim is a power of
// two in [2, 2^kMaxSpins].
std::size_t spins_for_dimension(std::size_t dim);

// Bit mask selecting `spin` in a basis index of an `nspins` register.
constexpr std::size_t spin_mask(std::size_t spin, std::size_t nspins) {
  return std::size_t{1} << (nspins - 1 - spin);
}

class UnitaryOperator {
 public:
  // Validates finiteness and U U^dagger = 1 (max elementwise deviation
  // <= tol). Throws std::invalid_argument otherwise.
  explicit UnitaryOperator(Matrix m, double tol = kUnitaryTol);

  // Wraps a matrix the caller has built from unitary factors. No check.
  static UnitaryOperator assume_unitary(Matrix m);
  static UnitaryOperator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t nspins() const { return spins_for_dimension(dim()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(std::size_t row, std::size_t col) const {
    return m_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  UnitaryOperator adjoint() const;
  // e^{i phi} U.
  UnitaryOperator with_phase(double phi) const;

  // Max elementwise deviation of U U^dagger from the identity.
  double unitarity_error() const;

  friend UnitaryOperator operator*(const UnitaryOperator& a,
                                   const UnitaryOperator& b);

 private:
  struct Trusted {};
  UnitaryOperator(Matrix m, Trusted) : m_(std::move(m)) {}

  Matrix m_;
};

class StateVector {
 public:
  // Validates length 2^n, finite amplitudes and sum |c_i|^2 = 1 within tol.
  explicit StateVector(Vector amplitudes, double tol = kClosedFormTol);

  static StateVector basis(std::size_t nspins, std::size_t index);
  static StateVector assume_normalized(Vector amplitudes);

  std::size_t nspins() const { return spins_for_dimension(dim()); }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const {
    return amps_(static_cast<Eigen::Index>(i));
  }
  double norm() const { return amps_.norm(); }

 private:
  struct Trusted {};
  StateVector(Vector v, Trusted) : amps_(std::move(v)) {}

  Vector amps_;
};

class DensityOperator {
 public:
  // Validates Hermitian (1e-12), unit trace (1e-12) and positive
  // semidefinite (smallest eigenvalue >= -1e-10).
  explicit DensityOperator(Matrix rho);

  static DensityOperator pure(const StateVector& psi);
  static DensityOperator maximally_mixed(std::size_t nspins);

  std::size_t nspins() const { return spins_for_dimension(dim()); }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }

 private:
  Matrix rho_;
};

enum class SpinAxis { PlusX, MinusX, PlusY, MinusY, PlusZ, MinusZ };

SpinAxis negate(SpinAxis axis);
bool is_negative(SpinAxis axis);
// "+x", "-x", ... ; parse also accepts a bare "x"/"y"/"z".
std::string_view to_string(SpinAxis axis);
SpinAxis parse_axis(std::string_view token);

// Spin-1/2 angular momentum components I_a = sigma_a / 2.
Matrix2 spin_x();
Matrix2 spin_y();
Matrix2 spin_z();
// I_axis with the sign of the axis folded in (I_{-x} = -I_x).
Matrix2 spin_operator(SpinAxis axis);

UnitaryOperator pauli_x();
UnitaryOperator pauli_y();
UnitaryOperator pauli_z();
UnitaryOperator hadamard();

// Embeds an arbitrary 2x2 operator at `spin`, identity elsewhere.
Matrix embed_operator(const Matrix2& op, std::size_t spin, std::size_t nspins);

UnitaryOperator kron(const UnitaryOperator& a, const UnitaryOperator& b);

// exp(-i theta I_axis), closed form cos(theta/2) 1 - i sin(theta/2) sigma.
// For a minus axis this is exp(-i (-theta) I_axis).
UnitaryOperator rotation(SpinAxis axis, double theta);

// Throws std::out_of_range unless spin < nspins.
UnitaryOperator embed(const UnitaryOperator& u, std::size_t spin,
                      std::size_t nspins);

// In-place left multiplication m <- G m, where G is the 2x2 gate `g`
// acting on `spin` of an `nspins` register. O(dim * cols).
void left_multiply(Matrix& m, const Matrix2& g, std::size_t spin,
                   std::size_t nspins);
// Same for a 4x4 gate on the ordered pair (first, second); `first` is the
// more significant index of g's basis.
void left_multiply(Matrix& m, const Matrix4& g, std::size_t first,
                   std::size_t second, std::size_t nspins);

struct PhaseAlignment {
  double distance = 0.0;  // max_ij |u_ij - e^{i phase} v_ij|
  double phase = 0.0;     // in (-pi, pi]
};

// Minimises the max elementwise deviation over the global phase of v.
PhaseAlignment align_global_phase(const UnitaryOperator& u,
                                  const UnitaryOperator& v);
double global_phase_distance(const UnitaryOperator& u,
                             const UnitaryOperator& v);

StateVector apply(const UnitaryOperator& u, const StateVector& s);

// |<a|b>|^2.
double overlap(const StateVector& a, const StateVector& b);

}  // namespace nmrswitch::qcore
