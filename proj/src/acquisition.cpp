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

#include "nmrswitch/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>
#include <json.hpp>

#include "nmrswitch/errors.hpp"
#include "nmrswitch/text.hpp"

namespace nmrswitch::acquisition {

using qcore::Complex;
using qcore::Matrix;

void AcquisitionParams::validate() const {
  if (td < 2 || td % 2 != 0) {
    throw std::invalid_argument("TD must be even and at least 2");
  }
  if (!(sw_hz > 0.0) || !std::isfinite(sw_hz)) {
    throw std::invalid_argument("SW must be positive");
  }
  if (ns == 0) throw std::invalid_argument("NS must be at least 1");
}

Timing derive_timing(const AcquisitionParams& p) {
  p.validate();
  const double td = static_cast<double>(p.td);
  return Timing{p.sw_hz / td, td / (2.0 * p.sw_hz), 1.0 / (2.0 * p.sw_hz)};
}

FIDRecord simulate_fid(const spinsim::SpinSystem& sys,
                       const qcore::DensityOperator& rho,
                       const AcquisitionParams& p) {
  p.validate();
  const std::size_t n = sys.size();
  if (rho.nspins() != n) {
    throw DimensionMismatch("density operator width does not match system");
  }
  if (p.observed_spin >= n) {
    throw std::out_of_range("observed spin " + std::to_string(p.observed_spin) +
                            " not in system");
  }

  // Readout pulse.
  Matrix r = Matrix::Identity(rho.matrix().rows(), rho.matrix().cols());
  qcore::left_multiply(
      r,
      qcore::Matrix2(
          qcore::rotation(qcore::SpinAxis::PlusY, qcore::kPi / 2.0).matrix()),
      p.observed_spin, n);
  const Matrix pulsed = r * rho.matrix() * r.adjoint();

  // Ix + i Iy = |0><1| on the observed spin: s(t) = sum over pairs (a, b),
  // b with the observed bit clear and a = b with it set, of
  // rho_ab exp(-i (E_a - E_b) t).
  struct Line {
    Complex weight;
    double omega;
  };
  const auto energies = sys.energies();
  const std::size_t mask = qcore::spin_mask(p.observed_spin, n);
  std::vector<Line> lines;
  for (std::size_t b = 0; b < energies.size(); ++b) {
    if (b & mask) continue;
    const std::size_t a = b | mask;
    const Complex w = pulsed(static_cast<Eigen::Index>(a),
                             static_cast<Eigen::Index>(b));
    if (w != Complex{0.0, 0.0}) lines.push_back({w, energies[a] - energies[b]});
  }

  FIDRecord fid;
  fid.dwell_s = 1.0 / p.sw_hz;
  fid.samples.assign(p.td / 2, Complex{0.0, 0.0});
  const double scans = static_cast<double>(p.ns);
  for (std::size_t k = 0; k < fid.samples.size(); ++k) {
    const double t = static_cast<double>(k) * fid.dwell_s;
    Complex s{0.0, 0.0};
    for (const Line& l : lines) s += l.weight * std::polar(1.0, -l.omega * t);
    fid.samples[k] = scans * s;
  }
  return fid;
}

namespace {

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Complex> forward_dft(const std::vector<Complex>& x,
                                 std::size_t size) {
  std::vector<Complex> in(size, Complex{0.0, 0.0});
  std::copy(x.begin(), x.end(), in.begin());
  std::vector<Complex> out(size);
  auto* fin = reinterpret_cast<fftw_complex*>(in.data());
  auto* fout = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(size), fin, fout, FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

Spectrum spectrum(const FIDRecord& fid, std::size_t transform_size) {
  if (fid.samples.empty()) throw std::invalid_argument("empty FID");
  if (!(fid.dwell_s > 0.0)) throw std::invalid_argument("dwell must be > 0");
  const std::size_t m =
      transform_size == 0 ? fid.samples.size() : transform_size;
  if (m < fid.samples.size()) {
    throw std::invalid_argument("transform size smaller than the FID");
  }

  const auto x = forward_dft(fid.samples, m);
  Spectrum s;
  s.bin_width_hz = 1.0 / (static_cast<double>(m) * fid.dwell_s);
  s.freqs_hz.resize(m);
  s.amplitudes.resize(m);
  // Bins k = k_min .. k_min + m - 1 with k_min = -floor((m-1)/2).
  const auto k_min = -static_cast<long long>((m - 1) / 2);
  const auto mm = static_cast<long long>(m);
  for (std::size_t j = 0; j < m; ++j) {
    const long long k = k_min + static_cast<long long>(j);
    s.freqs_hz[j] = static_cast<double>(k) * s.bin_width_hz;
    s.amplitudes[j] = x[static_cast<std::size_t>(((k % mm) + mm) % mm)];
  }
  return s;
}

std::vector<Peak> peak_pick(const Spectrum& s, double threshold) {
  if (s.amplitudes.empty()) throw std::invalid_argument("empty spectrum");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  std::vector<double> mag(s.amplitudes.size());
  std::transform(s.amplitudes.begin(), s.amplitudes.end(), mag.begin(),
                 [](Complex c) { return std::abs(c); });
  const double top = *std::max_element(mag.begin(), mag.end());
  std::vector<Peak> peaks;
  if (top == 0.0) return peaks;
  const double floor = threshold * top;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    if (mag[j] < floor) continue;
    const bool rises = j == 0 || mag[j] > mag[j - 1];
    const bool falls = j + 1 == mag.size() || mag[j] >= mag[j + 1];
    if (rises && falls) peaks.push_back(Peak{s.freqs_hz[j], mag[j]});
  }
  return peaks;
}

std::string fid_csv(const FIDRecord& fid) {
  std::string out = "index,time_s,re,im\n";
  for (std::size_t k = 0; k < fid.samples.size(); ++k) {
    out += std::to_string(k) + "," +
           text::sig9(static_cast<double>(k) * fid.dwell_s) + "," +
           text::sig9(fid.samples[k].real()) + "," +
           text::sig9(fid.samples[k].imag()) + "\n";
  }
  return out;
}

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "index,freq_hz,re,im\n";
  for (std::size_t j = 0; j < s.amplitudes.size(); ++j) {
    out += std::to_string(j) + "," + text::sig9(s.freqs_hz[j]) + "," +
           text::sig9(s.amplitudes[j].real()) + "," +
           text::sig9(s.amplitudes[j].imag()) + "\n";
  }
  return out;
}

std::string peaks_json(const std::vector<Peak>& peaks) {
  auto rounded = [](double v) { return std::stod(text::sig9(v)); };
  nlohmann::json arr = nlohmann::json::array();
  for (const Peak& p : peaks) {
    arr.push_back({{"freq_hz", rounded(p.freq_hz)},
                   {"magnitude", rounded(p.magnitude)}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace nmrswitch::acquisition
