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

// Quantum switch: classical bits enter through C/Q conversion, are permuted
// by a constant-depth CN circuit, and leave through Q/C readout.
//
// Any permutation factors as p = s1 . s2 with both s_i involutions. An
// involution is a set of disjoint transpositions; each transposition is a
// three-CN swap, and disjoint swaps share layers, so every permutation of
// any port count routes in at most 6 CN layers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmrswitch/gatecomp.hpp"
#include "nmrswitch/qcore.hpp"
#include "nmrswitch/spinsim.hpp"

namespace nmrswitch::qswitch {

// Bijection on {0..n-1}; image(i) is the output port for input port i.
class Permutation {
 public:
  // Throws std::invalid_argument unless `images` is a bijection.
  explicit Permutation(std::vector<std::size_t> images);
  static Permutation identity(std::size_t n);

  std::size_t size() const { return images_.size(); }
  std::size_t operator()(std::size_t i) const { return images_.at(i); }
  const std::vector<std::size_t>& images() const { return images_; }

  Permutation inverse() const;
  bool is_identity() const;
  bool is_involution() const;
  // Cycles of length >= 2, each rotated to start at its smallest element,
  // ordered by that element.
  std::vector<std::vector<std::size_t>> cycles() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::size_t> images_;
};

// (a * b)(i) = a(b(i)): apply b first.
Permutation operator*(const Permutation& a, const Permutation& b);

// "2 0 1" means 0 -> 2, 1 -> 0, 2 -> 1. Throws ParseError.
Permutation parse_permutation(std::string_view input);
std::string to_string(const Permutation& p);

class ClassicalFrame {
 public:
  explicit ClassicalFrame(std::vector<std::uint8_t> bits);
  // Characters '0'/'1', port 0 leftmost. Throws ParseError.
  static ClassicalFrame parse(std::string_view bits);
  // Bit pattern of a basis index; port 0 is the most significant bit.
  static ClassicalFrame from_index(std::size_t nports, std::size_t index);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_.at(i); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t basis_index() const;
  std::string str() const;

  bool operator==(const ClassicalFrame&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// One frame per line; blank lines and '#' comments ignored.
std::vector<ClassicalFrame> parse_frames(std::string_view input);

enum class PortKind { Classical, Quantum };

class SwitchConfig {
 public:
  explicit SwitchConfig(Permutation routing,
                        std::vector<PortKind> port_kinds = {});

  std::size_t nports() const { return routing_.size(); }
  const Permutation& permutation() const { return routing_; }
  const std::vector<PortKind>& port_kinds() const { return kinds_; }

 private:
  Permutation routing_;
  std::vector<PortKind> kinds_;
};

struct InvolutionPair {
  Permutation first;   // applied second
  Permutation second;  // applied first; first * second == target
};

qcore::StateVector c2q(const ClassicalFrame& frame);

inline constexpr double kReadoutTol = 1e-6;
// Throws SuperposedState unless one basis probability is >= 1 - tol.
ClassicalFrame q2c(const qcore::StateVector& state, double tol = kReadoutTol);

gatecomp::QuantumCircuit cross_circuit_2x2();
gatecomp::QuantumCircuit bypass_circuit_2x2();

InvolutionPair permutation_to_involutions(const Permutation& p);

// <= 6 CN layers routing input bit i to output port p(i).
gatecomp::QuantumCircuit build_switch_circuit(const Permutation& p);

enum class RoutingMode { Ideal, Pulse };

// Holds the switch unitary for one configuration so frames can be routed
// without rebuilding it. Pulse mode needs a spin system whose size equals
// the port count; pairs used by the circuit must be coupled.
class Router {
 public:
  Router(SwitchConfig config, RoutingMode mode,
         const std::optional<spinsim::SpinSystem>& system = std::nullopt);

  const SwitchConfig& config() const { return config_; }
  const gatecomp::QuantumCircuit& circuit() const { return circuit_; }
  const qcore::UnitaryOperator& unitary() const { return unitary_; }

  qcore::StateVector route_state(const qcore::StateVector& in) const;
  ClassicalFrame route(const ClassicalFrame& frame,
                       double tol = kReadoutTol) const;

 private:
  SwitchConfig config_;
  gatecomp::QuantumCircuit circuit_;
  qcore::UnitaryOperator unitary_;
};

ClassicalFrame route_frame(
    const SwitchConfig& cfg, const ClassicalFrame& frame, RoutingMode mode,
    const std::optional<spinsim::SpinSystem>& system = std::nullopt);

}  // namespace nmrswitch::qswitch
