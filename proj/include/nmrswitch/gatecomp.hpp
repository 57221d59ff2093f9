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

// Gate-level circuits and their lowering to NMR pulse sequences.
//
// Lowering rules (time order left to right):
//   Rz(theta)       (pi/2)_{-x}  (theta)_{y}  (pi/2)_{x}
//   H               (pi/4)_{y}   (pi)_{x}     (pi/4)_{-y}
//   N               (pi)_{x}
//   CPhase(theta)   Rz_c(-k/2)  Rz_t(-k/2)  tau,   k = (-theta) mod 2pi,
//                   tau = k / (2 pi J)
//   CN(c, t)        H_t  CPhase(pi)  H_t
//
// During tau, couplings that involve neither c nor t are refocused with
// pi_x pulses on the other coupled spins (Walsh-function patterns), so a
// CN in an all-pairs-coupled register touches only its own pair.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nmrswitch/qcore.hpp"
#include "nmrswitch/spinsim.hpp"

namespace nmrswitch::gatecomp {

struct Not {
  std::size_t spin = 0;
  bool operator==(const Not&) const = default;
};
struct Hadamard {
  std::size_t spin = 0;
  bool operator==(const Hadamard&) const = default;
};
struct RotZ {
  std::size_t spin = 0;
  double theta = 0.0;
  bool operator==(const RotZ&) const = default;
};
struct CPhase {
  std::size_t control = 0;
  std::size_t target = 1;
  double theta = qcore::kPi;
  bool operator==(const CPhase&) const = default;
};
struct CN {
  std::size_t control = 0;
  std::size_t target = 1;
  bool operator==(const CN&) const = default;
};

using Gate = std::variant<Not, Hadamard, RotZ, CPhase, CN>;

// Spins the gate acts on.
std::vector<std::size_t> spins_of(const Gate& g);
std::string describe(const Gate& g);

class QuantumCircuit {
 public:
  using Layer = std::vector<Gate>;

  explicit QuantumCircuit(std::size_t nspins);
  QuantumCircuit(std::size_t nspins, std::vector<Layer> layers);

  // Throws std::invalid_argument when gates in the layer share a spin or
  // address a spin >= nspins.
  QuantumCircuit& add_layer(Layer layer);

  std::size_t nspins() const { return nspins_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t gate_count() const;

  bool operator==(const QuantumCircuit&) const = default;

 private:
  std::size_t nspins_;
  std::vector<Layer> layers_;
};

qcore::UnitaryOperator ideal_unitary(const Gate& g, std::size_t nspins);
// Layer unitaries multiplied in time order.
qcore::UnitaryOperator ideal_unitary(const QuantumCircuit& c);

spinsim::PulseSequence compile_rz(std::size_t spin, double theta);
spinsim::PulseSequence compile_h(std::size_t spin);
spinsim::PulseSequence compile_not(std::size_t spin);
// Throws CouplingError when control and target are not J-coupled in sys.
spinsim::PulseSequence compile_cphase(const spinsim::SpinSystem& sys,
                                      std::size_t control, std::size_t target,
                                      double theta = qcore::kPi);
spinsim::PulseSequence compile_cn(const spinsim::SpinSystem& sys,
                                  std::size_t control, std::size_t target);
spinsim::PulseSequence compile_gate(const spinsim::SpinSystem& sys,
                                    const Gate& g);
// Per-gate sequences concatenated in layer order; gates inside a layer are
// emitted one after another.
spinsim::PulseSequence compile_circuit(const spinsim::SpinSystem& sys,
                                       const QuantumCircuit& c);

struct VerificationReport {
  double distance = 0.0;
  double phase = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

VerificationReport verify(const spinsim::SpinSystem& sys,
                          const spinsim::PulseSequence& seq,
                          const qcore::UnitaryOperator& target,
                          double tol = qcore::kCompiledTol);

// Text form, one gate per line: "N s", "H s", "RZ s theta", "CP c t theta",
// "CN c t"; layers separated by "---". Blank lines and '#' comments are
// ignored.
std::string serialize(const QuantumCircuit& c);
// nspins == 0 infers the width from the largest index used (at least 1).
QuantumCircuit parse_circuit(std::string_view input, std::size_t nspins = 0);

}  // namespace nmrswitch::gatecomp
