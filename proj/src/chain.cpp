#include "ephsim/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ephsim {

Segment Segment::loss(double power_factor) {
  if (!(power_factor > 0.0 && power_factor <= 1.0)) {
    throw std::invalid_argument("Segment::loss: power factor must lie in (0, 1], got " +
                                std::to_string(power_factor));
  }
  return Segment{SegmentKind::loss, power_factor, std::abs(std::log(power_factor))};
}

Segment Segment::gain(double power_factor) {
  if (!(power_factor >= 1.0) || !std::isfinite(power_factor)) {
    throw std::invalid_argument("Segment::gain: power factor must be >= 1, got " +
                                std::to_string(power_factor));
  }
  return Segment{SegmentKind::gain, power_factor, -std::abs(std::log(power_factor))};
}

ChainReport propagate(std::span<const Segment> segments, const ChainReport& upstream) {
  ChainReport r = upstream;
  for (const auto& s : segments) {
    if (!(s.power_factor > 0.0)) {
      throw std::invalid_argument("propagate: segment power factor must be positive");
    }
    r.final_amplitude_factor *= std::sqrt(s.power_factor);
    // Earlier noise sees this segment's power factor like the signal does.
    r.added_noise_photons *= s.power_factor;
    if (s.kind == SegmentKind::gain) {
      r.added_noise_photons += s.power_factor - 1.0;
      ++r.amplifier_count;
    }
    r.net_dispersion += s.dispersion_tag;
    ++r.segment_count;
  }
  return r;
}

ChainReport run_chain(std::span<const Segment> segments) {
  if (segments.empty()) throw std::invalid_argument("run_chain: empty segment list");
  return propagate(segments);
}

std::vector<Segment> balanced_chain(double total_gain, std::size_t n_amplifiers) {
  if (!(total_gain >= 1.0)) throw std::invalid_argument("balanced_chain: total gain must be >= 1");
  if (n_amplifiers == 0) throw std::invalid_argument("balanced_chain: need n_A >= 1");
  const double log_per = std::log(total_gain) / static_cast<double>(n_amplifiers);
  std::vector<Segment> chain;
  chain.reserve(2 * n_amplifiers);
  for (std::size_t i = 0; i < n_amplifiers; ++i) {
    chain.push_back(Segment::loss(std::exp(-log_per)));
    chain.push_back(Segment::gain(std::exp(log_per)));
  }
  return chain;
}

double dispersion_cancellation(double loss_strength, double gain_strength) {
  if (!(loss_strength >= 0.0) || !(gain_strength >= 0.0)) {
    throw std::invalid_argument("dispersion_cancellation: strengths must be >= 0");
  }
  return loss_strength - gain_strength;
}

std::vector<double> dispersion_cancellation_modes(const WavePacket& packet,
                                                  const OscillatorBank& absorber, cplx alpha,
                                                  double t) {
  OscillatorBank abs_bank = absorber;
  abs_bank.inverted = false;
  OscillatorBank amp_bank = absorber;
  amp_bank.inverted = true;
  std::vector<double> residual;
  residual.reserve(packet.grid.size());
  for (double k : packet.grid.k_values()) {
    const cplx loss = field_drift_second_order(k, packet, abs_bank, alpha, t);
    const cplx gain = field_drift_second_order(k, packet, amp_bank, alpha, t);
    residual.push_back(std::abs(loss + gain));
  }
  return residual;
}

NoiseScan noise_scaling_scan(double total_gain, std::span<const std::size_t> n_amplifiers) {
  if (!(total_gain >= 1.0)) throw std::invalid_argument("noise_scaling_scan: g must be >= 1");
  if (n_amplifiers.empty()) throw std::invalid_argument("noise_scaling_scan: no n_A values");
  std::vector<std::size_t> ns(n_amplifiers.begin(), n_amplifiers.end());
  std::sort(ns.begin(), ns.end());

  NoiseScan scan;
  scan.limit = std::log(total_gain);
  for (std::size_t n : ns) {
    const auto chain = balanced_chain(total_gain, n);
    scan.rows.push_back({n, run_chain(chain).added_noise_photons});
  }
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    if (!(scan.rows[i].added_noise > scan.limit)) scan.above_limit = false;
    if (i > 0 && !(scan.rows[i].added_noise < scan.rows[i - 1].added_noise)) {
      scan.strictly_decreasing = false;
    }
  }
  return scan;
}

}  // namespace ephsim
