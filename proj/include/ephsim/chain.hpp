#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ephsim/dynamics.hpp"

namespace ephsim {

enum class SegmentKind { loss, gain };

/// One lossy or amplifying stretch of channel, described by its power factor.
struct Segment {
  SegmentKind kind = SegmentKind::loss;
  double power_factor = 1.0;
  /// +|ln G| for loss, -|ln G| for gain (absorption counts positive).
  double dispersion_tag = 0.0;

  static Segment loss(double power_factor);
  static Segment gain(double power_factor);
};

struct ChainReport {
  double final_amplitude_factor = 1.0;
  double added_noise_photons = 0.0;
  double net_dispersion = 0.0;
  std::size_t segment_count = 0;
  std::size_t amplifier_count = 0;
};

/// Propagates amplitude, added spontaneous-emission photons and dispersion through
/// `segments`, starting from `upstream` (the identity report by default).
ChainReport propagate(std::span<const Segment> segments, const ChainReport& upstream = {});

/// run_chain: amplitude factor applied to `input_amplitude` is final_amplitude_factor.
ChainReport run_chain(std::span<const Segment> segments);

/// n_a (loss g^{-1/n_a}, gain g^{1/n_a}) pairs.
std::vector<Segment> balanced_chain(double total_gain, std::size_t n_amplifiers);

/// Scalar dispersion accumulator: loss_strength - gain_strength.
double dispersion_cancellation(double loss_strength, double gain_strength);

/// |drift_absorber(k) + drift_amplifier(k)| per mode for banks that differ only in inversion.
std::vector<double> dispersion_cancellation_modes(const WavePacket& packet,
                                                  const OscillatorBank& absorber, cplx alpha,
                                                  double t);

struct NoiseScanRow {
  std::size_t n_amplifiers = 0;
  double added_noise = 0.0;
};

struct NoiseScan {
  std::vector<NoiseScanRow> rows;
  double limit = 0.0;              ///< ln g
  bool strictly_decreasing = true;  ///< in increasing n_A order
  bool above_limit = true;
};

NoiseScan noise_scaling_scan(double total_gain, std::span<const std::size_t> n_amplifiers);

}  // namespace ephsim
