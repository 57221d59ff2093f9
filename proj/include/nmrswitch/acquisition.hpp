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

// Synthetic NMR readout.
//
// TD counts real points (Bruker convention): the FID holds TD/2 complex
// quadrature samples spaced 1/SW apart. Hence
//   FIDRES = SW / TD,   AQ = TD / (2 SW),   real-point dwell = 1 / (2 SW).
//
// The observed signal is s(t) = NS * tr(rho(t) (Ix + i Iy)) on the observed
// spin after a (pi/2)_{+y} readout pulse, with free evolution under the
// offset and J-coupling Hamiltonian of the spin system. With J > 0 and the
// partner spin in |0> the line sits at +J/2.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nmrswitch/qcore.hpp"
#include "nmrswitch/spinsim.hpp"

namespace nmrswitch::acquisition {

struct AcquisitionParams {
  std::size_t td = 32768;
  double sw_hz = 10000.0;
  std::size_t ns = 8;
  std::size_t ds = 0;
  std::size_t observed_spin = 0;

  // Throws std::invalid_argument: td >= 2 and even, sw > 0, ns >= 1.
  void validate() const;
};

struct Timing {
  double fidres_hz = 0.0;
  double aq_s = 0.0;
  double dwell_s = 0.0;  // per real point
};

Timing derive_timing(const AcquisitionParams& p);

struct FIDRecord {
  std::vector<qcore::Complex> samples;
  double dwell_s = 0.0;  // between complex points, 1 / SW
};

struct Spectrum {
  std::vector<double> freqs_hz;  // ascending, covering (-SW/2, SW/2]
  std::vector<qcore::Complex> amplitudes;
  double bin_width_hz = 0.0;
};

struct Peak {
  double freq_hz = 0.0;
  double magnitude = 0.0;
};

FIDRecord simulate_fid(const spinsim::SpinSystem& sys,
                       const qcore::DensityOperator& rho,
                       const AcquisitionParams& p);

// Unnormalised forward DFT X_k = sum_n x_n e^{-2 pi i k n / M}, M the
// transform size, with the axis centred on the carrier. M defaults to the
// sample count; a larger `transform_size` zero-fills. Parseval:
// sum |X|^2 = M sum |x|^2.
Spectrum spectrum(const FIDRecord& fid, std::size_t transform_size = 0);

// Local maxima of |X| at or above threshold * max|X|, sorted by frequency.
std::vector<Peak> peak_pick(const Spectrum& s, double threshold);

// CSV: header, then "index,<time_s|freq_hz>,re,im" rows, 9 significant
// digits.
std::string fid_csv(const FIDRecord& fid);
std::string spectrum_csv(const Spectrum& s);
// JSON array of {"freq_hz": ..., "magnitude": ...}.
std::string peaks_json(const std::vector<Peak>& peaks);

}  // namespace nmrswitch::acquisition
