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

// Spin-system model and pulse-sequence propagators.
//
// Everything is computed in the doubly rotating frame under the hard-pulse
// approximation: RF pulses are instantaneous rotations, and only free
// evolution (delays) sees the offset and weak-coupling Hamiltonian
//
//   H = 2 pi * ( sum_k offset_k Iz_k + sum_{k<l} J_kl Iz_k Iz_l ).
//
// A sequence is time ordered; its propagator multiplies event propagators
// with the first event rightmost.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nmrswitch/qcore.hpp"

namespace nmrswitch::spinsim {

struct Spin {
  std::string name;
  int channel = 1;
  double offset_hz = 0.0;
};

struct ChannelCalibration {
  double power_db = 0.0;
  double t90_s = 0.0;  // duration of a pi/2 pulse at power_db
};

class SpinSystem {
 public:
  using CouplingTable = std::map<std::pair<std::size_t, std::size_t>, double>;

  // Couplings may be given for either ordering of a pair; giving both with
  // different values is an error. Every spin's channel needs a calibration.
  SpinSystem(std::vector<Spin> spins, const CouplingTable& couplings,
             std::map<int, ChannelCalibration> calibration);

  // 13C-labelled chloroform: 1H on channel 1, 13C on channel 2, J = 215 Hz.
  static SpinSystem standard_chloroform();
  // Synthetic register with every pair coupled by j_hz; channel k+1 per spin.
  static SpinSystem uniform(std::size_t nspins, double j_hz = 215.0,
                            double t90_s = 10e-6);

  std::size_t size() const { return spins_.size(); }
  const std::vector<Spin>& spins() const { return spins_; }
  const Spin& spin(std::size_t i) const { return spins_.at(i); }

  // J_ij in Hz, 0 when the pair is uncoupled. Throws std::out_of_range on a
  // bad index.
  double coupling(std::size_t i, std::size_t j) const;
  bool coupled(std::size_t i, std::size_t j) const {
    return coupling(i, j) != 0.0;
  }
  const CouplingTable& couplings() const { return couplings_; }

  // Throws std::out_of_range for an unknown channel.
  const ChannelCalibration& calibration(int channel) const;
  const std::map<int, ChannelCalibration>& calibrations() const {
    return calibration_;
  }

  // Diagonal of H (rad/s) in the computational basis.
  std::vector<double> energies() const;

 private:
  std::vector<Spin> spins_;
  CouplingTable couplings_;  // keys ordered (i < j)
  std::map<int, ChannelCalibration> calibration_;
};

// An RF pulse on one spin about +-x or +-y. Angle in (0, 2 pi].
struct PulseEvent {
  std::size_t spin = 0;
  qcore::SpinAxis axis = qcore::SpinAxis::PlusX;
  double angle = 0.0;

  bool operator==(const PulseEvent&) const = default;
};

// Free evolution.
struct DelayEvent {
  double duration = 0.0;

  bool operator==(const DelayEvent&) const = default;
};

using SequenceEvent = std::variant<PulseEvent, DelayEvent>;

// Throws std::invalid_argument when the event breaks its invariants.
void validate(const PulseEvent& e);
void validate(const DelayEvent& e);

class PulseSequence {
 public:
  PulseSequence() = default;
  explicit PulseSequence(std::vector<SequenceEvent> events);

  PulseSequence& append(const PulseEvent& e);
  PulseSequence& append(const DelayEvent& e);
  PulseSequence& append(const PulseSequence& later);

  const std::vector<SequenceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  std::size_t pulse_count() const;
  std::size_t delay_count() const;
  double total_delay() const;

  bool operator==(const PulseSequence&) const = default;

 private:
  std::vector<SequenceEvent> events_;
};

// `earlier` followed by `later`.
PulseSequence concat(PulseSequence earlier, const PulseSequence& later);

// One event per line: "P <spin> <axis> <angle_rad>" or "D <seconds>".
// Numbers use 17 significant digits, so parse(serialize(s)) == s.
std::string serialize(const PulseSequence& seq);
// Blank lines and '#' comments are ignored. Throws ParseError.
PulseSequence parse_sequence(std::string_view input);

SpinSystem standard_chloroform();

// Pulse length for a tip angle at the channel's calibrated power:
// t90 * theta / (pi/2).
double angle_to_duration(const SpinSystem& sys, int channel, double theta);

// Delay realising exp(-i phi 2IzSz) under coupling j_hz: phi / (pi J).
double coupling_delay(double j_hz, double phi);

// Wall-clock length of a sequence: calibrated pulse lengths plus delays.
double sequence_duration(const SpinSystem& sys, const PulseSequence& seq);

qcore::UnitaryOperator pulse_propagator(const SpinSystem& sys,
                                        const PulseEvent& e);
qcore::UnitaryOperator delay_propagator(const SpinSystem& sys, double t);
qcore::UnitaryOperator sequence_propagator(const SpinSystem& sys,
                                           const PulseSequence& seq);

// Applies the sequence to a state without forming the propagator.
qcore::StateVector evolve(const SpinSystem& sys, const PulseSequence& seq,
                          const qcore::StateVector& psi);

}  // namespace nmrswitch::spinsim
