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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmrswitch/acquisition.hpp"
#include "nmrswitch/errors.hpp"
#include "nmrswitch/gatecomp.hpp"
#include "nmrswitch/qswitch.hpp"
#include "nmrswitch/text.hpp"

namespace nmrswitch::cli {

namespace {

using nlohmann::json;

// Raised for bad input that the argument parser cannot see (file contents,
// flag combinations). Maps to kUsageError.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
}

double round9(double v) { return std::stod(text::sig9(v)); }

// ---------------------------------------------------------------------------
// compile

struct CompileArgs {
  std::string circuit_file;
  std::string system = "chloroform";
  std::string output;
  bool json = false;
};

int cmd_compile(const CompileArgs& a, std::ostream& out, std::ostream& err) {
  const auto sys = parse_system(a.system);
  const auto parsed = gatecomp::parse_circuit(read_file(a.circuit_file));
  const gatecomp::QuantumCircuit circuit(
      std::max(parsed.nspins(), sys.size()), parsed.layers());
  const auto seq = gatecomp::compile_circuit(sys, circuit);
  const double duration = spinsim::sequence_duration(sys, seq);

  const std::string serialized = spinsim::serialize(seq);
  std::ostream& summary = a.output.empty() ? err : out;
  if (a.output.empty()) {
    out << serialized;
  } else {
    write_file(a.output, serialized);
  }
  if (a.json) {
    json j{{"pulses", seq.pulse_count()},
           {"delays", seq.delay_count()},
           {"duration_s", round9(duration)},
           {"delay_s", round9(seq.total_delay())}};
    summary << j.dump(2) << "\n";
  } else {
    summary << "pulses " << seq.pulse_count() << "\n"
            << "delays " << seq.delay_count() << "\n"
            << "duration_s " << text::sig9(duration) << "\n"
            << "delay_s " << text::sig9(seq.total_delay()) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string sequence_file;
  std::string gate;
  std::string circuit_file;
  std::string system = "chloroform";
  double tol = qcore::kCompiledTol;
  bool json = false;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto sys = parse_system(a.system);
  const auto seq = spinsim::parse_sequence(read_file(a.sequence_file));
  if (a.gate.empty() == a.circuit_file.empty()) {
    throw UsageError("give exactly one of --gate or --circuit");
  }
  qcore::UnitaryOperator target =
      qcore::UnitaryOperator::identity(std::size_t{1} << sys.size());
  if (!a.circuit_file.empty()) {
    target = gatecomp::ideal_unitary(
        gatecomp::parse_circuit(read_file(a.circuit_file), sys.size()));
  } else if (a.gate != "I") {
    target = gatecomp::ideal_unitary(gatecomp::parse_circuit(a.gate, sys.size()));
  }
  const auto report = gatecomp::verify(sys, seq, target, a.tol);
  if (a.json) {
    json j{{"distance", round9(report.distance)},
           {"phase", round9(report.phase)},
           {"tolerance", round9(report.tolerance)},
           {"passed", report.passed}};
    out << j.dump(2) << "\n";
  } else {
    out << "distance " << text::sig9(report.distance) << "\n"
        << "phase " << text::sig9(report.phase) << "\n"
        << "tolerance " << text::sig9(report.tolerance) << "\n"
        << "result " << (report.passed ? "pass" : "fail") << "\n";
  }
  return report.passed ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// switch

struct SwitchArgs {
  std::string permutation;
  std::string frames_file;
  std::string mode = "ideal";
  std::string system;
  std::string output;
  std::string emit_circuit;
  unsigned jobs = 1;
};

std::vector<qswitch::ClassicalFrame> route_all(
    const qswitch::Router& router,
    const std::vector<qswitch::ClassicalFrame>& frames, unsigned jobs) {
  std::vector<std::optional<qswitch::ClassicalFrame>> routed(frames.size());
  std::vector<std::exception_ptr> errors(frames.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        routed[i] = router.route(frames[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t k = std::clamp<std::size_t>(jobs, 1, frames.size() + 1);
  if (k <= 1 || frames.size() < 2) {
    work(0, frames.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (frames.size() + k - 1) / k;
    for (std::size_t b = 0; b < frames.size(); b += chunk) {
      pool.emplace_back(work, b, std::min(frames.size(), b + chunk));
    }
    for (auto& t : pool) t.join();
  }
  std::vector<qswitch::ClassicalFrame> result;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    result.push_back(*routed[i]);
  }
  return result;
}

int cmd_switch(const SwitchArgs& a, std::ostream& out) {
  const auto perm = qswitch::parse_permutation(a.permutation);
  const auto frames = qswitch::parse_frames(read_file(a.frames_file));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].size() != perm.size()) {
      throw UsageError("frame " + std::to_string(i + 1) + " has " +
                       std::to_string(frames[i].size()) + " bits, switch has " +
                       std::to_string(perm.size()) + " ports");
    }
  }
  const auto mode = a.mode == "pulse" ? qswitch::RoutingMode::Pulse
                                      : qswitch::RoutingMode::Ideal;
  std::optional<spinsim::SpinSystem> sys;
  if (!a.system.empty()) sys = parse_system(a.system);
  const qswitch::Router router(qswitch::SwitchConfig(perm), mode, sys);

  if (!a.emit_circuit.empty()) {
    write_file(a.emit_circuit, gatecomp::serialize(router.circuit()));
  }
  std::string text_out;
  for (const auto& f : route_all(router, frames, a.jobs)) {
    text_out += f.str() + "\n";
  }
  if (a.output.empty()) {
    out << text_out;
  } else {
    write_file(a.output, text_out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumArgs {
  std::string frame;
  std::string state_file;
  std::string route;
  std::string system = "chloroform";
  acquisition::AcquisitionParams params;
  double threshold = 0.5;
  std::string fid_csv;
  std::string spectrum_csv;
  std::string peaks_json;
  bool json = false;
};

qcore::StateVector read_state(const std::string& path) {
  std::vector<qcore::Complex> amps;
  const std::string content = read_file(path);
  std::size_t line_no = 0;
  for (auto line : text::lines(content)) {
    ++line_no;
    const auto tok = text::tokens(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(line_no, "expected '<re> <im>'");
    try {
      amps.emplace_back(text::to_double(tok[0]), text::to_double(tok[1]));
    } catch (const ParseError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  qcore::Vector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = amps[i];
  }
  return qcore::StateVector(std::move(v), 1e-9);
}

int cmd_spectrum(const SpectrumArgs& a, std::ostream& out) {
  const auto sys = parse_system(a.system);
  if (a.frame.empty() == a.state_file.empty()) {
    throw UsageError("give exactly one of --frame or --state");
  }
  qcore::StateVector psi =
      a.frame.empty() ? read_state(a.state_file)
                      : qswitch::c2q(qswitch::ClassicalFrame::parse(a.frame));
  if (psi.nspins() != sys.size()) {
    throw UsageError("preparation has " + std::to_string(psi.nspins()) +
                     " spins, system has " + std::to_string(sys.size()));
  }
  if (!a.route.empty()) {
    const qswitch::Router router(
        qswitch::SwitchConfig(qswitch::parse_permutation(a.route)),
        qswitch::RoutingMode::Ideal);
    psi = router.route_state(psi);
  }

  const auto timing = acquisition::derive_timing(a.params);
  const auto fid = acquisition::simulate_fid(
      sys, qcore::DensityOperator::pure(psi), a.params);
  const auto spec = acquisition::spectrum(fid);
  const auto peaks = acquisition::peak_pick(spec, a.threshold);

  if (!a.fid_csv.empty()) write_file(a.fid_csv, acquisition::fid_csv(fid));
  if (!a.spectrum_csv.empty()) {
    write_file(a.spectrum_csv, acquisition::spectrum_csv(spec));
  }
  if (!a.peaks_json.empty()) {
    write_file(a.peaks_json, acquisition::peaks_json(peaks));
  }

  if (a.json) {
    json j{{"fidres_hz", round9(timing.fidres_hz)},
           {"aq_s", round9(timing.aq_s)},
           {"dwell_s", round9(timing.dwell_s)},
           {"bin_width_hz", round9(spec.bin_width_hz)},
           {"peaks", json::parse(acquisition::peaks_json(peaks))}};
    out << j.dump(2) << "\n";
  } else {
    out << "fidres_hz " << text::sig9(timing.fidres_hz) << "\n"
        << "aq_s " << text::sig9(timing.aq_s) << "\n"
        << "dwell_s " << text::sig9(timing.dwell_s) << "\n"
        << "bin_width_hz " << text::sig9(spec.bin_width_hz) << "\n"
        << "peaks " << peaks.size() << "\n";
    for (const auto& p : peaks) {
      out << "peak " << text::sig9(p.freq_hz) << " "
          << text::sig9(p.magnitude) << "\n";
    }
  }
  return kOk;
}

}  // namespace

spinsim::SpinSystem parse_system(const std::string& spec) {
  if (spec == "chloroform") return spinsim::SpinSystem::standard_chloroform();
  const auto parts = [&] {
    std::vector<std::string> v;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) v.push_back(item);
    return v;
  }();
  if (!parts.empty() && parts[0] == "uniform" &&
      (parts.size() == 2 || parts.size() == 3)) {
    try {
      const std::size_t n = text::to_index(parts[1]);
      const double j = parts.size() == 3 ? text::to_double(parts[2]) : 215.0;
      return spinsim::SpinSystem::uniform(n, j);
    } catch (const std::exception& e) {
      throw UsageError("bad system '" + spec + "': " + e.what());
    }
  }
  throw UsageError("unknown system '" + spec +
                   "' (use chloroform or uniform:<n>[:<J_hz>])");
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"NMR quantum switch simulator and pulse compiler",
               "nmrswitch"};
  app.set_config("--config", "", "key=value file; command-line flags win");
  app.require_subcommand(1);

  CompileArgs compile;
  auto* c = app.add_subcommand("compile", "Lower a circuit to pulses");
  c->add_option("circuit", compile.circuit_file, "Circuit file")->required();
  c->add_option("--system", compile.system, "chloroform | uniform:<n>[:J]");
  c->add_option("-o,--output", compile.output, "Pulse sequence output file");
  c->add_flag("--json", compile.json, "Summary as JSON");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check a sequence against a target");
  v->add_option("sequence", verify.sequence_file, "Pulse sequence file")
      ->required();
  v->add_option("--gate", verify.gate, "Target gate line, e.g. 'CN 0 1' or I");
  v->add_option("--circuit", verify.circuit_file, "Target circuit file");
  v->add_option("--system", verify.system, "chloroform | uniform:<n>[:J]");
  v->add_option("--tol", verify.tol, "Global-phase distance tolerance")
      ->check(CLI::PositiveNumber);
  v->add_flag("--json", verify.json, "Report as JSON");

  SwitchArgs sw;
  auto* s = app.add_subcommand("switch", "Route classical frames");
  s->add_option("--perm", sw.permutation, "Image list, e.g. '1 0'")
      ->required();
  s->add_option("frames", sw.frames_file, "Frames file")->required();
  s->add_option("--mode", sw.mode, "ideal | pulse")
      ->check(CLI::IsMember({"ideal", "pulse"}));
  s->add_option("--system", sw.system, "Spin system for pulse mode");
  s->add_option("-o,--output", sw.output, "Routed frames output file");
  s->add_option("--emit-circuit", sw.emit_circuit, "Write the CN circuit");
  s->add_option("--jobs", sw.jobs, "Worker threads")->check(CLI::PositiveNumber);

  SpectrumArgs sp;
  auto* p = app.add_subcommand("spectrum", "Simulate FID and spectrum");
  p->add_option("--frame", sp.frame, "Basis preparation, e.g. 01");
  p->add_option("--state", sp.state_file, "State file of '<re> <im>' lines");
  p->add_option("--route", sp.route, "Route through a switch first");
  p->add_option("--system", sp.system, "chloroform | uniform:<n>[:J]");
  p->add_option("--td", sp.params.td, "Time-domain points (real)");
  p->add_option("--sw", sp.params.sw_hz, "Spectral width (Hz)");
  p->add_option("--ns", sp.params.ns, "Number of scans");
  p->add_option("--ds", sp.params.ds, "Dummy scans");
  p->add_option("--observe", sp.params.observed_spin, "Observed spin");
  p->add_option("--threshold", sp.threshold, "Peak threshold, fraction of max");
  p->add_option("--fid-csv", sp.fid_csv, "FID CSV output");
  p->add_option("--spectrum-csv", sp.spectrum_csv, "Spectrum CSV output");
  p->add_option("--peaks-json", sp.peaks_json, "Peak list JSON output");
  p->add_flag("--json", sp.json, "Summary as JSON");

  std::vector<const char*> argv{"nmrswitch"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*c) return cmd_compile(compile, out, err);
    if (*v) return cmd_verify(verify, out);
    if (*s) return cmd_switch(sw, out);
    if (*p) return cmd_spectrum(sp, out);
  } catch (const CouplingError& e) {
    err << "coupling error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace nmrswitch::cli
