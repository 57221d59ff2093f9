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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "nmrswitch/acquisition.hpp"
#include "nmrswitch/gatecomp.hpp"
#include "nmrswitch/qswitch.hpp"
#include "oracles.hpp"

namespace {

using namespace nmrswitch;
using qcore::Complex;
using qcore::kPi;
using qcore::Matrix;

struct Outcome {
  bool ok;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1. Compiled CN equals the ideal CN up to global phase.
Outcome compiled_cn() {
  const auto start = Clock::now();
  const auto sys = spinsim::standard_chloroform();
  const auto report = gatecomp::verify(sys, gatecomp::compile_cn(sys, 0, 1),
                                       gatecomp::ideal_unitary(gatecomp::CN{0, 1}, 2),
                                       1e-9);
  const double t = seconds_since(start);
  return {report.passed && report.distance <= 1e-9 && t < 1.0,
          fmt("distance %.3g (<= 1e-9), %.3g s (< 1 s)", report.distance, t)};
}

// 2. The four commuting diagonal factors give diag(1,1,1,-1).
Outcome closed_form_cphase() {
  const Matrix iz = oracle::on_spin(oracle::sigma_z() / 2.0, 0, 2);
  const Matrix sz = oracle::on_spin(oracle::sigma_z() / 2.0, 1, 2);
  auto factor = [](const Matrix& generator) {
    Matrix out = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      out(i, i) = std::polar(1.0, -(kPi / 2) * generator(i, i).real());
    }
    return out;
  };
  const Matrix product = factor(-0.5 * oracle::identity(4)) * factor(iz) *
                         factor(sz) * factor(-2.0 * iz * sz);
  Matrix target = Matrix::Zero(4, 4);
  target.diagonal() << 1, 1, 1, -1;
  const double d = qcore::global_phase_distance(qcore::UnitaryOperator(product),
                                                qcore::UnitaryOperator(target));
  const double brute = oracle::phase_distance(product, target);
  return {d <= 1e-12 && brute <= 1e-12,
          fmt("distance %.3g, brute-force %.3g (<= 1e-12)", d, brute)};
}

// 3. Compiled Rz for fixed and random angles, and compiled H.
Outcome z_and_h_decompositions() {
  const auto sys = spinsim::SpinSystem::uniform(1);
  std::vector<double> angles{kPi / 4, kPi / 2, kPi};
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
  for (int i = 0; i < 20; ++i) angles.push_back(angle(rng));
  double worst = 0.0;
  for (double theta : angles) {
    const Matrix u =
        spinsim::sequence_propagator(sys, gatecomp::compile_rz(0, theta)).matrix();
    const Matrix rz = oracle::mat2(std::polar(1.0, -theta / 2), 0, 0,
                                   std::polar(1.0, theta / 2));
    worst = std::max(worst, oracle::phase_distance(u, rz));
  }
  const Matrix h =
      spinsim::sequence_propagator(sys, gatecomp::compile_h(0)).matrix();
  const double dh = oracle::phase_distance(h, oracle::hadamard());
  return {worst <= 1e-10 && dh <= 1e-10,
          fmt("worst Rz distance %.3g over %g angles, H distance %.3g (<= 1e-10)",
              worst, static_cast<double>(angles.size()), dh)};
}

// 4. Cross mode routes 00, 10, 01, 11 to 00, 01, 10, 11.
Outcome cross_mode_routing() {
  const qswitch::SwitchConfig cross(qswitch::Permutation({1, 0}));
  const char* in[] = {"00", "10", "01", "11"};
  const char* out[] = {"00", "01", "10", "11"};
  double worst_overlap = 1.0;
  bool ok = true;
  for (auto mode : {qswitch::RoutingMode::Ideal, qswitch::RoutingMode::Pulse}) {
    const qswitch::Router router(cross, mode,
                                 spinsim::SpinSystem::standard_chloroform());
    for (int k = 0; k < 4; ++k) {
      const auto f = qswitch::ClassicalFrame::parse(in[k]);
      const auto expected = qswitch::ClassicalFrame::parse(out[k]);
      ok = ok && router.route(f) == expected;
      if (mode == qswitch::RoutingMode::Pulse) {
        worst_overlap = std::min(
            worst_overlap, qcore::overlap(router.route_state(qswitch::c2q(f)),
                                          qswitch::c2q(expected)));
      }
    }
  }
  ok = ok && worst_overlap >= 1 - 1e-8;
  return {ok, std::string(ok ? "8/8 routes correct" : "routing mismatch") +
                  fmt(", worst pulse-mode overlap 1 - %.3g (>= 1 - 1e-8)",
                      1 - worst_overlap)};
}

// 5. Six-layer switch: all permutations n <= 4, 100 random for n = 8.
Outcome constant_depth_switch() {
  const auto start = Clock::now();
  std::size_t max_layers = 0, checked = 0;
  bool ok = true;
  auto check = [&](const oracle::Perm& images,
                   const std::vector<std::size_t>& frames) {
    const auto c = qswitch::build_switch_circuit(qswitch::Permutation(images));
    max_layers = std::max(max_layers, c.layer_count());
    ok = ok && c.layer_count() <= 6;
    const qswitch::Router router(
        qswitch::SwitchConfig(qswitch::Permutation(images)),
        qswitch::RoutingMode::Ideal);
    for (std::size_t idx : frames) {
      const auto out = router.route(
          qswitch::ClassicalFrame::from_index(images.size(), idx));
      ok = ok && out.basis_index() == oracle::route_index(images, idx);
      ++checked;
    }
  };
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<std::size_t> all(std::size_t{1} << n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (const auto& p : oracle::all_perms(n)) check(p, all);
  }
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::Perm p = oracle::identity_perm(8);
    std::shuffle(p.begin(), p.end(), rng);
    std::vector<std::size_t> frames(100);
    for (auto& f : frames) f = rng() % 256;
    check(p, frames);
  }
  const double t = seconds_since(start);
  return {ok && t < 10.0,
          fmt("max %g layers (<= 6), %g frames routed, %.3g s (< 10 s)",
              static_cast<double>(max_layers), static_cast<double>(checked), t)};
}

// 6. Calibration arithmetic.
Outcome calibration() {
  const auto sys = spinsim::standard_chloroform();
  const double pi1 = spinsim::angle_to_duration(sys, 1, kPi);
  const double pi2 = spinsim::angle_to_duration(sys, 2, kPi);
  const double tau = spinsim::coupling_delay(215.0, kPi / 2);
  const double rel = std::abs(tau - 1.0 / 430.0) * 430.0;
  // Exact decimal check.
  const bool exact = fmt("%.10g", pi1 * 1e6) == "19" &&
                     fmt("%.10g", pi2 * 1e6) == "25.2";
  return {exact && rel <= 1e-9,
          fmt("pi pulse ch1 %.10g us, ch2 %.10g us, tau relative error %.3g",
              pi1 * 1e6, pi2 * 1e6, rel)};
}

// 7. Acquisition arithmetic.
Outcome acquisition_timing() {
  const auto t = acquisition::derive_timing(acquisition::AcquisitionParams{});
  const double aq_rel = std::abs(t.aq_s - 1.63845) / 1.63845;
  return {std::abs(t.fidres_hz - 0.305176) <= 1e-6 && aq_rel <= 1e-3,
          fmt("fidres %.9g Hz, aq %.9g s (%.3g from 1.63845 s)", t.fidres_hz,
              t.aq_s, aq_rel)};
}

// 8. Carbon |0> and |1> put the proton line J apart.
Outcome doublet() {
  const auto start = Clock::now();
  const auto sys = spinsim::standard_chloroform();
  const acquisition::AcquisitionParams p;
  const double fidres = acquisition::derive_timing(p).fidres_hz;
  auto line = [&](std::size_t idx) {
    const auto rho = qcore::DensityOperator::pure(qcore::StateVector::basis(2, idx));
    const auto peaks = acquisition::peak_pick(
        acquisition::spectrum(acquisition::simulate_fid(sys, rho, p)), 0.5);
    return peaks.size() == 1 ? peaks[0].freq_hz : std::nan("");
  };
  const double up = line(0b00), down = line(0b01);
  const double split = up - down;
  const double t = seconds_since(start);
  return {std::abs(split - 215.0) <= 2 * fidres && t < 5.0,
          fmt("lines %.6g / %.6g Hz, split %.6g Hz (215 +- 2 fidres)", up, down,
              split) +
              fmt(", %.3g s (< 5 s)", t)};
}

// 9. Property suites.
Outcome properties() {
  const auto start = Clock::now();
  std::mt19937_64 rng(9);
  std::string failed;
  auto require = [&](bool cond, const char* what) {
    if (!cond && failed.find(what) == std::string::npos) {
      failed += failed.empty() ? what : std::string(", ") + what;
    }
  };

  // Unitarity of propagators and norm preservation.
  const auto three = spinsim::SpinSystem::uniform(3, 180.0);
  std::uniform_real_distribution<double> angle(1e-3, 2 * kPi);
  std::uniform_real_distribution<double> delay(0.0, 1e-2);
  constexpr qcore::SpinAxis axes[] = {qcore::SpinAxis::PlusX, qcore::SpinAxis::MinusX,
                                      qcore::SpinAxis::PlusY, qcore::SpinAxis::MinusY};
  for (int trial = 0; trial < 200; ++trial) {
    const spinsim::PulseEvent e{rng() % 3, axes[rng() % 4], angle(rng)};
    require(spinsim::pulse_propagator(three, e).unitarity_error() <= 1e-10,
            "pulse unitarity");
    require(spinsim::delay_propagator(three, delay(rng)).unitarity_error() <= 1e-10,
            "delay unitarity");
    spinsim::PulseSequence seq;
    for (int k = 0; k < 100; ++k) {
      if (k % 5 == 4) seq.append(spinsim::DelayEvent{delay(rng)});
      else seq.append(spinsim::PulseEvent{rng() % 3, axes[rng() % 4], angle(rng)});
    }
    require(spinsim::sequence_propagator(three, seq).unitarity_error() <= 1e-10,
            "sequence unitarity");
    const qcore::StateVector psi(oracle::random_state(8, rng));
    require(std::abs(spinsim::evolve(three, seq, psi).norm() - 1.0) <= 1e-12,
            "norm preservation");
    const qcore::UnitaryOperator u(oracle::haar_unitary(8, rng));
    require(std::abs(qcore::apply(u, psi).norm() - 1.0) <= 1e-12,
            "norm preservation");
  }

  // Involution pairs for every permutation with n <= 6.
  for (std::size_t n = 1; n <= 6; ++n) {
    for (const auto& images : oracle::all_perms(n)) {
      const auto pair = qswitch::permutation_to_involutions(qswitch::Permutation(images));
      const auto& a = pair.first.images();
      const auto& b = pair.second.images();
      require(oracle::compose(a, a) == oracle::identity_perm(n) &&
                  oracle::compose(b, b) == oracle::identity_perm(n) &&
                  oracle::compose(a, b) == images,
              "involution pairs");
    }
  }

  // C/Q then Q/C is the identity.
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t idx = 0; idx < (std::size_t{1} << n); ++idx) {
      const auto f = qswitch::ClassicalFrame::from_index(n, idx);
      require(qswitch::q2c(qswitch::c2q(f)) == f, "q2c(c2q)");
    }
  }

  // FID linearity on convex mixtures.
  const auto sys = spinsim::standard_chloroform();
  acquisition::AcquisitionParams p;
  p.td = 1024;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracle::haar_unitary(4, rng);
    const Matrix b = oracle::haar_unitary(4, rng);
    const Matrix ra = a.col(0) * a.col(0).adjoint();
    const Matrix rb = b.col(0) * b.col(0).adjoint();
    const double w = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto fa = acquisition::simulate_fid(sys, qcore::DensityOperator(ra), p);
    const auto fb = acquisition::simulate_fid(sys, qcore::DensityOperator(rb), p);
    const auto fm = acquisition::simulate_fid(
        sys, qcore::DensityOperator(w * ra + (1 - w) * rb), p);
    for (std::size_t k = 0; k < fm.samples.size(); ++k) {
      require(std::abs(fm.samples[k] - (w * fa.samples[k] + (1 - w) * fb.samples[k])) <=
                  1e-10,
              "FID linearity");
    }
  }

  // Parseval with the unnormalised DFT.
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    acquisition::FIDRecord fid;
    fid.dwell_s = 1e-4;
    const std::size_t m = 1 + rng() % 20000;
    for (std::size_t k = 0; k < m; ++k) fid.samples.emplace_back(g(rng), g(rng));
    double et = 0.0, ef = 0.0;
    for (Complex x : fid.samples) et += std::norm(x);
    for (Complex x : acquisition::spectrum(fid).amplitudes) ef += std::norm(x);
    require(std::abs(ef - static_cast<double>(m) * et) <=
                1e-9 * static_cast<double>(m) * et,
            "Parseval");
  }

  const double t = seconds_since(start);
  require(t < 60.0, "runtime");
  return {failed.empty(), (failed.empty() ? std::string("all properties hold")
                                          : "failed: " + failed) +
                              fmt(", %.3g s (< 60 s)", t)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"compiled CN equivalence", compiled_cn},
      {"control-phase closed form", closed_form_cphase},
      {"z-rotation and Hadamard decompositions", z_and_h_decompositions},
      {"cross-mode routing", cross_mode_routing},
      {"constant-depth switch", constant_depth_switch},
      {"calibration arithmetic", calibration},
      {"acquisition arithmetic", acquisition_timing},
      {"doublet invariant", doublet},
      {"property suites", properties},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failures;
    std::printf("%s %d %s: %s\n", o.ok ? "PASS" : "FAIL", index, name,
                o.detail.c_str());
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
