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

#include "nmrswitch/spinsim.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "nmrswitch/errors.hpp"
#include "nmrswitch/text.hpp"

namespace nmrswitch::spinsim {

using qcore::kPi;
using qcore::Matrix;
using qcore::SpinAxis;
using qcore::StateVector;
using qcore::UnitaryOperator;

// ---------------------------------------------------------------------------
// SpinSystem

SpinSystem::SpinSystem(std::vector<Spin> spins, const CouplingTable& couplings,
                       std::map<int, ChannelCalibration> calibration)
    : spins_(std::move(spins)), calibration_(std::move(calibration)) {
  if (spins_.empty() || spins_.size() > qcore::kMaxSpins) {
    throw std::invalid_argument("spin system needs 1.." +
                                std::to_string(qcore::kMaxSpins) + " spins");
  }
  std::set<int> channels;
  for (const Spin& s : spins_) {
    if (s.channel <= 0) {
      throw std::invalid_argument("channel numbers must be positive");
    }
    if (!channels.insert(s.channel).second) {
      throw std::invalid_argument("channel " + std::to_string(s.channel) +
                                  " assigned to more than one spin");
    }
    if (!std::isfinite(s.offset_hz)) {
      throw std::invalid_argument("offset must be finite");
    }
    auto it = calibration_.find(s.channel);
    if (it == calibration_.end()) {
      throw std::invalid_argument("no calibration for channel " +
                                  std::to_string(s.channel));
    }
  }
  for (const auto& [channel, cal] : calibration_) {
    if (!(cal.t90_s > 0.0) || !std::isfinite(cal.t90_s)) {
      throw std::invalid_argument("t90 must be positive on channel " +
                                  std::to_string(channel));
    }
  }
  for (const auto& [pair, j] : couplings) {
    auto [a, b] = pair;
    if (a >= spins_.size() || b >= spins_.size() || a == b) {
      throw std::invalid_argument("coupling between invalid spins");
    }
    if (!std::isfinite(j)) {
      throw std::invalid_argument("coupling constant must be finite");
    }
    const auto key = std::minmax(a, b);
    auto [it, inserted] = couplings_.emplace(key, j);
    if (!inserted && it->second != j) {
      throw std::invalid_argument("asymmetric coupling for pair (" +
                                  std::to_string(a) + "," + std::to_string(b) +
                                  ")");
    }
  }
}

SpinSystem SpinSystem::standard_chloroform() {
  return SpinSystem(
      {Spin{"1H", 1, 0.0}, Spin{"13C", 2, 0.0}}, {{{0, 1}, 215.0}},
      {{1, ChannelCalibration{3.00, 9.5e-6}},
       {2, ChannelCalibration{-3.00, 12.6e-6}}});
}

SpinSystem SpinSystem::uniform(std::size_t nspins, double j_hz,
                               double t90_s) {
  std::vector<Spin> spins;
  std::map<int, ChannelCalibration> cal;
  CouplingTable couplings;
  for (std::size_t i = 0; i < nspins; ++i) {
    const int channel = static_cast<int>(i) + 1;
    spins.push_back(Spin{"q" + std::to_string(i), channel, 0.0});
    cal.emplace(channel, ChannelCalibration{0.0, t90_s});
    for (std::size_t j = i + 1; j < nspins; ++j) couplings[{i, j}] = j_hz;
  }
  return SpinSystem(std::move(spins), couplings, std::move(cal));
}

double SpinSystem::coupling(std::size_t i, std::size_t j) const {
  if (i >= spins_.size() || j >= spins_.size()) {
    throw std::out_of_range("spin index out of range");
  }
  auto it = couplings_.find(std::minmax(i, j));
  return it == couplings_.end() ? 0.0 : it->second;
}

const ChannelCalibration& SpinSystem::calibration(int channel) const {
  auto it = calibration_.find(channel);
  if (it == calibration_.end()) {
    throw std::out_of_range("unknown channel " + std::to_string(channel));
  }
  return it->second;
}

std::vector<double> SpinSystem::energies() const {
  const std::size_t n = spins_.size();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> e(dim, 0.0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    auto z = [&](std::size_t k) {
      return (idx & qcore::spin_mask(k, n)) ? -0.5 : 0.5;
    };
    double h = 0.0;
    for (std::size_t k = 0; k < n; ++k) h += spins_[k].offset_hz * z(k);
    for (const auto& [pair, j] : couplings_) {
      h += j * z(pair.first) * z(pair.second);
    }
    e[idx] = 2.0 * kPi * h;
  }
  return e;
}

SpinSystem standard_chloroform() { return SpinSystem::standard_chloroform(); }

// ---------------------------------------------------------------------------
// Events and sequences

void validate(const PulseEvent& e) {
  if (e.axis == SpinAxis::PlusZ || e.axis == SpinAxis::MinusZ) {
    throw std::invalid_argument(
        "RF pulses act about x or y; decompose z rotations");
  }
  if (!std::isfinite(e.angle) || !(e.angle > 0.0) || e.angle > 2.0 * kPi) {
    throw std::invalid_argument("pulse angle must lie in (0, 2pi]");
  }
}

void validate(const DelayEvent& e) {
  if (!std::isfinite(e.duration) || e.duration < 0.0) {
    throw std::invalid_argument("delay must be finite and non-negative");
  }
}

PulseSequence::PulseSequence(std::vector<SequenceEvent> events)
    : events_(std::move(events)) {
  for (const auto& e : events_) {
    std::visit([](const auto& ev) { validate(ev); }, e);
  }
}

PulseSequence& PulseSequence::append(const PulseEvent& e) {
  validate(e);
  events_.emplace_back(e);
  return *this;
}

PulseSequence& PulseSequence::append(const DelayEvent& e) {
  validate(e);
  events_.emplace_back(e);
  return *this;
}

PulseSequence& PulseSequence::append(const PulseSequence& later) {
  events_.insert(events_.end(), later.events_.begin(), later.events_.end());
  return *this;
}

std::size_t PulseSequence::pulse_count() const {
  std::size_t n = 0;
  for (const auto& e : events_) n += std::holds_alternative<PulseEvent>(e);
  return n;
}

std::size_t PulseSequence::delay_count() const {
  return events_.size() - pulse_count();
}

double PulseSequence::total_delay() const {
  double t = 0.0;
  for (const auto& e : events_) {
    if (const auto* d = std::get_if<DelayEvent>(&e)) t += d->duration;
  }
  return t;
}

PulseSequence concat(PulseSequence earlier, const PulseSequence& later) {
  earlier.append(later);
  return earlier;
}

std::string serialize(const PulseSequence& seq) {
  std::string out;
  for (const auto& e : seq.events()) {
    if (const auto* p = std::get_if<PulseEvent>(&e)) {
      out += "P " + std::to_string(p->spin) + " " +
             std::string(qcore::to_string(p->axis)) + " " +
             text::exact(p->angle) + "\n";
    } else {
      out += "D " + text::exact(std::get<DelayEvent>(e).duration) + "\n";
    }
  }
  return out;
}

PulseSequence parse_sequence(std::string_view input) {
  PulseSequence seq;
  std::size_t line_no = 0;
  for (const auto& line : text::lines(input)) {
    ++line_no;
    const auto tokens = text::tokens(line);
    if (tokens.empty()) continue;
    try {
      if (tokens[0] == "P") {
        if (tokens.size() != 4) {
          throw ParseError(0, "expected 'P <spin> <axis> <angle>'");
        }
        PulseEvent p{text::to_index(tokens[1]), qcore::parse_axis(tokens[2]),
                     text::to_double(tokens[3])};
        seq.append(p);
      } else if (tokens[0] == "D") {
        if (tokens.size() != 2) throw ParseError(0, "expected 'D <seconds>'");
        seq.append(DelayEvent{text::to_double(tokens[1])});
      } else {
        throw ParseError(0, "unknown event '" + std::string(tokens[0]) + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Calibration arithmetic

double angle_to_duration(const SpinSystem& sys, int channel, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("tip angle must be positive");
  }
  return sys.calibration(channel).t90_s * (theta / (kPi / 2.0));
}

double coupling_delay(double j_hz, double phi) {
  if (!(j_hz > 0.0) || !std::isfinite(j_hz)) {
    throw std::invalid_argument("coupling constant must be positive");
  }
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    throw std::invalid_argument("coupling angle must be positive");
  }
  return phi / (kPi * j_hz);
}

double sequence_duration(const SpinSystem& sys, const PulseSequence& seq) {
  double t = 0.0;
  for (const auto& e : seq.events()) {
    if (const auto* p = std::get_if<PulseEvent>(&e)) {
      t += angle_to_duration(sys, sys.spin(p->spin).channel, p->angle);
    } else {
      t += std::get<DelayEvent>(e).duration;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Propagators

namespace {

void check_spin(const SpinSystem& sys, std::size_t spin) {
  if (spin >= sys.size()) {
    throw std::out_of_range("pulse on spin " + std::to_string(spin) +
                            " of a " + std::to_string(sys.size()) +
                            "-spin system");
  }
}

qcore::Matrix2 pulse_matrix(const PulseEvent& e) {
  return qcore::Matrix2(qcore::rotation(e.axis, e.angle).matrix());
}

std::vector<qcore::Complex> delay_phases(const std::vector<double>& energies,
                                         double t) {
  std::vector<qcore::Complex> ph(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    ph[i] = std::polar(1.0, -energies[i] * t);
  }
  return ph;
}

// m <- E m for every event in time order; m may be a matrix or a column.
void apply_events(const SpinSystem& sys, const PulseSequence& seq, Matrix& m) {
  const std::size_t n = sys.size();
  const auto energies = sys.energies();
  for (const auto& e : seq.events()) {
    if (const auto* p = std::get_if<PulseEvent>(&e)) {
      check_spin(sys, p->spin);
      qcore::left_multiply(m, pulse_matrix(*p), p->spin, n);
    } else {
      const double t = std::get<DelayEvent>(e).duration;
      if (t == 0.0) continue;
      const auto ph = delay_phases(energies, t);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        m.row(r) *= ph[static_cast<std::size_t>(r)];
      }
    }
  }
}

}  // namespace

UnitaryOperator pulse_propagator(const SpinSystem& sys, const PulseEvent& e) {
  validate(e);
  check_spin(sys, e.spin);
  return qcore::embed(qcore::rotation(e.axis, e.angle), e.spin, sys.size());
}

UnitaryOperator delay_propagator(const SpinSystem& sys, double t) {
  validate(DelayEvent{t});
  const auto ph = delay_phases(sys.energies(), t);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(ph.size()),
                          static_cast<Eigen::Index>(ph.size()));
  for (std::size_t i = 0; i < ph.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = ph[i];
  }
  return UnitaryOperator::assume_unitary(std::move(m));
}

UnitaryOperator sequence_propagator(const SpinSystem& sys,
                                    const PulseSequence& seq) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << sys.size());
  Matrix m = Matrix::Identity(dim, dim);
  apply_events(sys, seq, m);
  return UnitaryOperator::assume_unitary(std::move(m));
}

StateVector evolve(const SpinSystem& sys, const PulseSequence& seq,
                   const StateVector& psi) {
  if (psi.nspins() != sys.size()) {
    throw DimensionMismatch("state width does not match the spin system");
  }
  Matrix column = psi.amplitudes();
  apply_events(sys, seq, column);
  return StateVector::assume_normalized(column.col(0));
}

}  // namespace nmrswitch::spinsim
