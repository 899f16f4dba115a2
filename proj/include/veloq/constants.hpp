#pragma once

namespace veloq::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Sr fine-structure qubit platform defaults.
inline constexpr double lambda_clock = 698e-9;   // 1S0 -> 3P0, m
inline constexpr double lambda_fs = 17.2e-6;     // effective FS control wavelength, m
inline constexpr double lambda_688 = 688e-9;     // three-photon selectivity beam, m
inline constexpr double lambda_uv = 317e-9;      // Rydberg excitation, m

inline constexpr double rabi_three_photon = two_pi * 40e3;   // rad/s
inline constexpr double rabi_fs = two_pi * 120e3;            // rad/s
inline constexpr double rabi_rydberg = two_pi * 5e6;         // rad/s

// SI shuttling baseline: 100 um in 200 us cubic move.
inline constexpr double baseline_move_distance = 100e-6;     // m
inline constexpr double baseline_move_duration = 200e-6;     // s
inline constexpr double baseline_jerk = 1.5e8;               // 12 d / T^3, m/s^3

}  // namespace veloq::constants
