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

#include "nmrswitch/gatecomp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

#include "nmrswitch/errors.hpp"
#include "nmrswitch/text.hpp"

namespace nmrswitch::gatecomp {

using qcore::Complex;
using qcore::kPi;
using qcore::Matrix;
using qcore::SpinAxis;
using qcore::UnitaryOperator;
using spinsim::DelayEvent;
using spinsim::PulseEvent;
using spinsim::PulseSequence;
using spinsim::SpinSystem;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_distinct(std::size_t a, std::size_t b) {
  if (a == b) {
    throw std::invalid_argument("control and target must differ");
  }
}

}  // namespace

std::vector<std::size_t> spins_of(const Gate& g) {
  return std::visit(
      Overloaded{
          [](const Not& x) { return std::vector<std::size_t>{x.spin}; },
          [](const Hadamard& x) { return std::vector<std::size_t>{x.spin}; },
          [](const RotZ& x) { return std::vector<std::size_t>{x.spin}; },
          [](const CPhase& x) {
            return std::vector<std::size_t>{x.control, x.target};
          },
          [](const CN& x) {
            return std::vector<std::size_t>{x.control, x.target};
          },
      },
      g);
}

std::string describe(const Gate& g) {
  using std::to_string;
  return std::visit(
      Overloaded{
          [](const Not& x) { return "N " + to_string(x.spin); },
          [](const Hadamard& x) { return "H " + to_string(x.spin); },
          [](const RotZ& x) {
            return "RZ " + to_string(x.spin) + " " + text::exact(x.theta);
          },
          [](const CPhase& x) {
            return "CP " + to_string(x.control) + " " + to_string(x.target) +
                   " " + text::exact(x.theta);
          },
          [](const CN& x) {
            return "CN " + to_string(x.control) + " " + to_string(x.target);
          },
      },
      g);
}

// ---------------------------------------------------------------------------
// QuantumCircuit

QuantumCircuit::QuantumCircuit(std::size_t nspins) : nspins_(nspins) {
  if (nspins == 0 || nspins > qcore::kMaxSpins) {
    throw std::invalid_argument("unsupported circuit width");
  }
}

QuantumCircuit::QuantumCircuit(std::size_t nspins, std::vector<Layer> layers)
    : QuantumCircuit(nspins) {
  for (auto& layer : layers) add_layer(std::move(layer));
}

QuantumCircuit& QuantumCircuit::add_layer(Layer layer) {
  std::set<std::size_t> used;
  for (const Gate& g : layer) {
    const auto spins = spins_of(g);
    if (spins.size() == 2) require_distinct(spins[0], spins[1]);
    if (const auto* rz = std::get_if<RotZ>(&g); rz && !std::isfinite(rz->theta)) {
      throw std::invalid_argument("rotation angle must be finite");
    }
    if (const auto* cp = std::get_if<CPhase>(&g);
        cp && !std::isfinite(cp->theta)) {
      throw std::invalid_argument("phase angle must be finite");
    }
    for (std::size_t s : spins) {
      if (s >= nspins_) {
        throw std::invalid_argument(describe(g) + ": spin " +
                                    std::to_string(s) + " out of range for " +
                                    std::to_string(nspins_) + " spins");
      }
      if (!used.insert(s).second) {
        throw std::invalid_argument(describe(g) + ": spin " +
                                    std::to_string(s) +
                                    " already used in this layer");
      }
    }
  }
  layers_.push_back(std::move(layer));
  return *this;
}

std::size_t QuantumCircuit::gate_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.size();
  return n;
}

// ---------------------------------------------------------------------------
// Ideal unitaries

namespace {

void left_multiply_gate(Matrix& m, const Gate& g, std::size_t nspins) {
  std::visit(
      Overloaded{
          [&](const Not& x) {
            qcore::left_multiply(m, qcore::Matrix2(qcore::pauli_x().matrix()),
                                 x.spin, nspins);
          },
          [&](const Hadamard& x) {
            qcore::left_multiply(
                m, qcore::Matrix2(qcore::hadamard().matrix()), x.spin, nspins);
          },
          [&](const RotZ& x) {
            qcore::left_multiply(
                m,
                qcore::Matrix2(
                    qcore::rotation(SpinAxis::PlusZ, x.theta).matrix()),
                x.spin, nspins);
          },
          [&](const CPhase& x) {
            qcore::Matrix4 g4 = qcore::Matrix4::Identity();
            g4(3, 3) = std::polar(1.0, x.theta);
            qcore::left_multiply(m, g4, x.control, x.target, nspins);
          },
          [&](const CN& x) {
            qcore::Matrix4 g4 = qcore::Matrix4::Zero();
            g4(0, 0) = g4(1, 1) = g4(2, 3) = g4(3, 2) = 1.0;
            qcore::left_multiply(m, g4, x.control, x.target, nspins);
          },
      },
      g);
}

Matrix identity_matrix(std::size_t nspins) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << nspins);
  return Matrix::Identity(d, d);
}

}  // namespace

UnitaryOperator ideal_unitary(const Gate& g, std::size_t nspins) {
  QuantumCircuit c(nspins);
  c.add_layer({g});
  return ideal_unitary(c);
}

UnitaryOperator ideal_unitary(const QuantumCircuit& c) {
  Matrix m = identity_matrix(c.nspins());
  for (const auto& layer : c.layers()) {
    for (const Gate& g : layer) left_multiply_gate(m, g, c.nspins());
  }
  return UnitaryOperator::assume_unitary(std::move(m));
}

// ---------------------------------------------------------------------------
// Lowering

PulseSequence compile_rz(std::size_t spin, double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("rotation angle must be finite");
  }
  // Rz(theta + 2pi) = -Rz(theta): reduce to [-pi, pi].
  const double r = std::remainder(theta, 2.0 * kPi);
  PulseSequence seq;
  seq.append(PulseEvent{spin, SpinAxis::MinusX, kPi / 2.0});
  if (r != 0.0) {
    seq.append(PulseEvent{spin, r > 0.0 ? SpinAxis::PlusY : SpinAxis::MinusY,
                          std::abs(r)});
  }
  seq.append(PulseEvent{spin, SpinAxis::PlusX, kPi / 2.0});
  return seq;
}

PulseSequence compile_h(std::size_t spin) {
  PulseSequence seq;
  seq.append(PulseEvent{spin, SpinAxis::PlusY, kPi / 4.0});
  seq.append(PulseEvent{spin, SpinAxis::PlusX, kPi});
  seq.append(PulseEvent{spin, SpinAxis::MinusY, kPi / 4.0});
  return seq;
}

PulseSequence compile_not(std::size_t spin) {
  PulseSequence seq;
  seq.append(PulseEvent{spin, SpinAxis::PlusX, kPi});
  return seq;
}

namespace {

// Free evolution of length tau in which only the (control, target) coupling
// acts. Every other coupled spin k follows the Walsh function w_k(s) =
// (-1)^popcount(k' & s) over 2^m equal segments, toggled by pi_x pulses;
// distinct non-constant Walsh functions average to zero against each other
// and against the constant function carried by control and target.
PulseSequence coupled_evolution(const SpinSystem& sys, std::size_t control,
                                std::size_t target, double tau) {
  std::vector<std::size_t> spectators;
  for (std::size_t k = 0; k < sys.size(); ++k) {
    if (k == control || k == target) continue;
    for (std::size_t l = 0; l < sys.size(); ++l) {
      if (l != k && sys.coupled(k, l)) {
        spectators.push_back(k);
        break;
      }
    }
  }

  PulseSequence seq;
  if (spectators.empty()) {
    seq.append(DelayEvent{tau});
    return seq;
  }

  const std::size_t segments = std::bit_ceil(spectators.size() + 1);
  auto sign = [](std::size_t walsh, std::size_t segment) {
    return std::popcount(walsh & segment) % 2 == 0 ? 1 : -1;
  };
  auto flip = [&](std::size_t spin) {
    seq.append(PulseEvent{spin, SpinAxis::PlusX, kPi});
  };
  for (std::size_t s = 0; s < segments; ++s) {
    for (std::size_t i = 0; i < spectators.size(); ++i) {
      const int previous = s == 0 ? 1 : sign(i + 1, s - 1);
      if (sign(i + 1, s) != previous) flip(spectators[i]);
    }
    seq.append(DelayEvent{tau / static_cast<double>(segments)});
  }
  for (std::size_t i = 0; i < spectators.size(); ++i) {
    if (sign(i + 1, segments - 1) < 0) flip(spectators[i]);
  }
  return seq;
}

}  // namespace

PulseSequence compile_cphase(const SpinSystem& sys, std::size_t control,
                             std::size_t target, double theta) {
  require_distinct(control, target);
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("phase angle must be finite");
  }
  if (control >= sys.size() || target >= sys.size() ||
      !sys.coupled(control, target)) {
    throw CouplingError("spins " + std::to_string(control) + " and " +
                        std::to_string(target) +
                        " are not coupled in this " +
                        std::to_string(sys.size()) + "-spin system");
  }
  // CPhase(theta) = Rz_c(-c/2) Rz_t(-c/2) exp(-i c IzSz) up to global phase
  // whenever c = -theta (mod 2pi). The delay produces c = 2 pi J tau, so c
  // takes the sign of J.
  double kappa = std::fmod(-theta, 2.0 * kPi);
  if (kappa < 0.0) kappa += 2.0 * kPi;
  PulseSequence seq;
  if (kappa == 0.0) return seq;

  const double j = sys.coupling(control, target);
  const double c = j > 0.0 ? kappa : kappa - 2.0 * kPi;
  seq.append(compile_rz(control, -c / 2.0));
  seq.append(compile_rz(target, -c / 2.0));
  const double tau = spinsim::coupling_delay(std::abs(j), std::abs(c) / 2.0);
  seq.append(coupled_evolution(sys, control, target, tau));
  return seq;
}

PulseSequence compile_cn(const SpinSystem& sys, std::size_t control,
                         std::size_t target) {
  PulseSequence seq = compile_h(target);
  seq.append(compile_cphase(sys, control, target, kPi));
  seq.append(compile_h(target));
  return seq;
}

PulseSequence compile_gate(const SpinSystem& sys, const Gate& g) {
  for (std::size_t s : spins_of(g)) {
    if (s >= sys.size()) {
      if (std::holds_alternative<CN>(g) || std::holds_alternative<CPhase>(g)) {
        throw CouplingError(describe(g) + ": spin " + std::to_string(s) +
                            " is not part of this " +
                            std::to_string(sys.size()) + "-spin system");
      }
      throw std::out_of_range(describe(g) + ": spin " + std::to_string(s) +
                              " is not part of the system");
    }
  }
  return std::visit(
      Overloaded{
          [&](const Not& x) { return compile_not(x.spin); },
          [&](const Hadamard& x) { return compile_h(x.spin); },
          [&](const RotZ& x) { return compile_rz(x.spin, x.theta); },
          [&](const CPhase& x) {
            return compile_cphase(sys, x.control, x.target, x.theta);
          },
          [&](const CN& x) { return compile_cn(sys, x.control, x.target); },
      },
      g);
}

PulseSequence compile_circuit(const SpinSystem& sys, const QuantumCircuit& c) {
  PulseSequence seq;
  for (const auto& layer : c.layers()) {
    for (const Gate& g : layer) seq.append(compile_gate(sys, g));
  }
  return seq;
}

VerificationReport verify(const SpinSystem& sys, const PulseSequence& seq,
                          const UnitaryOperator& target, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (target.dim() != (std::size_t{1} << sys.size())) {
    throw DimensionMismatch("target acts on " +
                            std::to_string(target.nspins()) +
                            " spins, system has " +
                            std::to_string(sys.size()));
  }
  const auto alignment =
      qcore::align_global_phase(target, spinsim::sequence_propagator(sys, seq));
  return VerificationReport{alignment.distance, alignment.phase, tol,
                            alignment.distance <= tol};
}

// ---------------------------------------------------------------------------
// Text format

std::string serialize(const QuantumCircuit& c) {
  std::string out;
  bool first = true;
  for (const auto& layer : c.layers()) {
    if (!first) out += "---\n";
    first = false;
    for (const Gate& g : layer) out += describe(g) + "\n";
  }
  return out;
}

namespace {

Gate parse_gate(const std::vector<std::string_view>& tok) {
  auto expect = [&](std::size_t n, const char* form) {
    if (tok.size() != n) {
      throw ParseError(0, std::string("expected '") + form + "'");
    }
  };
  const std::string_view op = tok[0];
  if (op == "N") {
    expect(2, "N <spin>");
    return Not{text::to_index(tok[1])};
  }
  if (op == "H") {
    expect(2, "H <spin>");
    return Hadamard{text::to_index(tok[1])};
  }
  if (op == "RZ") {
    expect(3, "RZ <spin> <theta>");
    return RotZ{text::to_index(tok[1]), text::to_double(tok[2])};
  }
  if (op == "CP") {
    expect(4, "CP <control> <target> <theta>");
    return CPhase{text::to_index(tok[1]), text::to_index(tok[2]),
                  text::to_double(tok[3])};
  }
  if (op == "CN") {
    expect(3, "CN <control> <target>");
    return CN{text::to_index(tok[1]), text::to_index(tok[2])};
  }
  throw ParseError(0, "unknown gate '" + std::string(op) + "'");
}

}  // namespace

QuantumCircuit parse_circuit(std::string_view input, std::size_t nspins) {
  struct Entry {
    Gate gate;
    std::size_t line;
  };
  std::vector<std::vector<Entry>> layers(1);
  std::size_t line_no = 0;
  std::size_t widest = 0;
  for (const auto& line : text::lines(input)) {
    ++line_no;
    const auto tok = text::tokens(line);
    if (tok.empty()) continue;
    if (tok.size() == 1 && tok[0] == "---") {
      layers.emplace_back();
      continue;
    }
    try {
      Gate g = parse_gate(tok);
      for (std::size_t s : spins_of(g)) widest = std::max(widest, s + 1);
      layers.back().push_back(Entry{std::move(g), line_no});
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    }
  }

  QuantumCircuit circuit(nspins == 0 ? std::max<std::size_t>(widest, 1)
                                     : nspins);
  for (auto& entries : layers) {
    if (entries.empty()) continue;
    QuantumCircuit::Layer layer;
    for (auto& e : entries) {
      try {
        QuantumCircuit probe(circuit.nspins());
        layer.push_back(e.gate);
        probe.add_layer(layer);
      } catch (const std::invalid_argument& err) {
        throw ParseError(e.line, err.what());
      }
    }
    circuit.add_layer(std::move(layer));
  }
  return circuit;
}

}  // namespace nmrswitch::gatecomp
