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

#include "nmrswitch/qswitch.hpp"

#include <algorithm>
#include <stdexcept>

#include "nmrswitch/errors.hpp"
#include "nmrswitch/text.hpp"

namespace nmrswitch::qswitch {

using gatecomp::CN;
using gatecomp::QuantumCircuit;
using qcore::StateVector;

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<std::size_t> images)
    : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (std::size_t v : images_) {
    if (v >= images_.size() || seen[v]) {
      throw std::invalid_argument("not a bijection on " +
                                  std::to_string(images_.size()) + " ports");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return Permutation(std::move(v));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> v(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) v[images_[i]] = i;
  return Permutation(std::move(v));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

bool Permutation::is_involution() const {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[images_[i]] != i) return false;
  }
  return true;
}

std::vector<std::vector<std::size_t>> Permutation::cycles() const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(images_.size(), false);
  for (std::size_t start = 0; start < images_.size(); ++start) {
    if (seen[start] || images_[start] == start) continue;
    std::vector<std::size_t> cycle;
    for (std::size_t x = start; !seen[x]; x = images_[x]) {
      seen[x] = true;
      cycle.push_back(x);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("composing permutations of different size");
  }
  std::vector<std::size_t> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a(b(i));
  return Permutation(std::move(v));
}

Permutation parse_permutation(std::string_view input) {
  std::vector<std::size_t> images;
  for (auto tok : text::tokens(input)) images.push_back(text::to_index(tok));
  if (images.empty()) throw ParseError(0, "empty permutation");
  try {
    return Permutation(std::move(images));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

std::string to_string(const Permutation& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(p(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frames

ClassicalFrame::ClassicalFrame(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  if (bits_.empty() || bits_.size() > qcore::kMaxSpins) {
    throw std::invalid_argument("frame width must be 1.." +
                                std::to_string(qcore::kMaxSpins));
  }
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("frame bits must be 0 or 1");
  }
}

ClassicalFrame ClassicalFrame::parse(std::string_view bits) {
  std::vector<std::uint8_t> v;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw ParseError(0, "frame '" + std::string(bits) +
                              "' must contain only 0 and 1");
    }
    v.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  try {
    return ClassicalFrame(std::move(v));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

ClassicalFrame ClassicalFrame::from_index(std::size_t nports,
                                          std::size_t index) {
  std::vector<std::uint8_t> v(nports);
  for (std::size_t i = 0; i < nports; ++i) {
    v[i] = (index & qcore::spin_mask(i, nports)) ? 1 : 0;
  }
  return ClassicalFrame(std::move(v));
}

std::size_t ClassicalFrame::basis_index() const {
  std::size_t idx = 0;
  for (auto b : bits_) idx = (idx << 1) | b;
  return idx;
}

std::string ClassicalFrame::str() const {
  std::string s;
  for (auto b : bits_) s += static_cast<char>('0' + b);
  return s;
}

std::vector<ClassicalFrame> parse_frames(std::string_view input) {
  std::vector<ClassicalFrame> frames;
  std::size_t line_no = 0;
  for (auto line : text::lines(input)) {
    ++line_no;
    const auto tok = text::tokens(line);
    if (tok.empty()) continue;
    if (tok.size() != 1) throw ParseError(line_no, "one frame per line");
    try {
      frames.push_back(ClassicalFrame::parse(tok[0]));
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return frames;
}

SwitchConfig::SwitchConfig(Permutation routing, std::vector<PortKind> kinds)
    : routing_(std::move(routing)), kinds_(std::move(kinds)) {
  if (routing_.size() == 0) throw std::invalid_argument("switch has no ports");
  if (kinds_.empty()) kinds_.assign(routing_.size(), PortKind::Classical);
  if (kinds_.size() != routing_.size()) {
    throw std::invalid_argument("one port kind per port");
  }
}

// ---------------------------------------------------------------------------
// Conversion

StateVector c2q(const ClassicalFrame& frame) {
  return StateVector::basis(frame.size(), frame.basis_index());
}

ClassicalFrame q2c(const StateVector& state, double tol) {
  Eigen::Index best = 0;
  const double p = state.amplitudes().cwiseAbs2().maxCoeff(&best);
  if (p < 1.0 - tol) {
    throw SuperposedState("no basis state dominates (max probability " +
                          text::sig9(p) + ")");
  }
  return ClassicalFrame::from_index(state.nspins(),
                                    static_cast<std::size_t>(best));
}

// ---------------------------------------------------------------------------
// Circuits

QuantumCircuit cross_circuit_2x2() {
  return QuantumCircuit(2, {{CN{0, 1}}, {CN{1, 0}}, {CN{0, 1}}});
}

QuantumCircuit bypass_circuit_2x2() { return QuantumCircuit(2); }

InvolutionPair permutation_to_involutions(const Permutation& p) {
  // For a cycle c_0 -> c_1 -> ... -> c_{L-1} -> c_0 with c_0 minimal:
  //   second(c_k) = c_{-k},  first(c_k) = c_{1-k}   (indices mod L)
  // so first(second(c_k)) = c_{k+1}.
  std::vector<std::size_t> first = Permutation::identity(p.size()).images();
  std::vector<std::size_t> second = first;
  for (const auto& cycle : p.cycles()) {
    const std::size_t len = cycle.size();
    for (std::size_t k = 0; k < len; ++k) {
      second[cycle[k]] = cycle[(len - k) % len];
      first[cycle[k]] = cycle[(len + 1 - k) % len];
    }
  }
  return InvolutionPair{Permutation(std::move(first)),
                        Permutation(std::move(second))};
}

namespace {

// Three layers of parallel CNs swapping every transposition of `inv`.
void append_swaps(QuantumCircuit& c, const Permutation& inv) {
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    if (inv(i) > i) swaps.emplace_back(i, inv(i));
  }
  if (swaps.empty()) return;
  QuantumCircuit::Layer forward, backward;
  for (auto [a, b] : swaps) {
    forward.push_back(CN{a, b});
    backward.push_back(CN{b, a});
  }
  c.add_layer(forward);
  c.add_layer(backward);
  c.add_layer(forward);
}

}  // namespace

QuantumCircuit build_switch_circuit(const Permutation& p) {
  const auto [first, second] = permutation_to_involutions(p);
  QuantumCircuit c(p.size());
  append_swaps(c, second);
  append_swaps(c, first);
  return c;
}

// ---------------------------------------------------------------------------
// Routing

namespace {

qcore::UnitaryOperator switch_unitary(
    const QuantumCircuit& circuit, RoutingMode mode,
    const std::optional<spinsim::SpinSystem>& system) {
  if (mode == RoutingMode::Ideal) return gatecomp::ideal_unitary(circuit);
  const spinsim::SpinSystem sys =
      system ? *system
             : (circuit.nspins() == 2
                    ? spinsim::SpinSystem::standard_chloroform()
                    : spinsim::SpinSystem::uniform(circuit.nspins()));
  if (sys.size() != circuit.nspins()) {
    throw DimensionMismatch("spin system has " + std::to_string(sys.size()) +
                            " spins, switch has " +
                            std::to_string(circuit.nspins()) + " ports");
  }
  return spinsim::sequence_propagator(sys,
                                      gatecomp::compile_circuit(sys, circuit));
}

}  // namespace

Router::Router(SwitchConfig config, RoutingMode mode,
               const std::optional<spinsim::SpinSystem>& system)
    : config_(std::move(config)),
      circuit_(build_switch_circuit(config_.permutation())),
      unitary_(switch_unitary(circuit_, mode, system)) {}

StateVector Router::route_state(const StateVector& in) const {
  if (in.nspins() != config_.nports()) {
    throw DimensionMismatch("state width does not match the port count");
  }
  return qcore::apply(unitary_, in);
}

ClassicalFrame Router::route(const ClassicalFrame& frame, double tol) const {
  if (frame.size() != config_.nports()) {
    throw DimensionMismatch("frame has " + std::to_string(frame.size()) +
                            " bits, switch has " +
                            std::to_string(config_.nports()) + " ports");
  }
  return q2c(route_state(c2q(frame)), tol);
}

ClassicalFrame route_frame(const SwitchConfig& cfg, const ClassicalFrame& frame,
                           RoutingMode mode,
                           const std::optional<spinsim::SpinSystem>& system) {
  return Router(cfg, mode, system).route(frame);
}

}  // namespace nmrswitch::qswitch
