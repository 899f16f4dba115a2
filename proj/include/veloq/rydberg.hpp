#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "veloq/constants.hpp"
#include "veloq/geometry.hpp"
#include "veloq/statesim.hpp"

namespace veloq::rydberg {

struct RydbergParams {
    double rabi = constants::rabi_rydberg;          // rad/s
    double blockade = 50.0 * constants::rabi_rydberg;  // rad/s
    double rydberg_decay = 0.0;                     // 1/s
    Vec2 k_uv{constants::two_pi / constants::lambda_uv, 0.0};
    double leakage_loss_prob = 0.0;                 // ionization surrogate, per gate
};

// Phase-modulated global pulse: phi(t) = sum_m c_m cos(pi m t / T), m = 1..M,
// driving |1> <-> |r> at constant Rabi frequency. z_correction is the
// single-qubit Z rotation that turns the accumulated phases into CZ.
struct PulseProfile {
    double duration = 0.0;              // s
    std::vector<double> phase_coeffs;   // c_1..c_M
    double z_correction = 0.0;          // rad

    double phase(double t) const;

    std::string to_json() const;
    static PulseProfile from_json(const std::string& text);
};

struct GateResult {
    double bell_fidelity = 0.0;
    double leakage = 0.0;
    // phases on |00>,|01>,|10>,|11> after the Z correction (CZ target: 0,0,0,pi)
    std::array<double, 4> basis_phases{};

    statesim::FlybyGate to_flyby_gate() const { return {basis_phases, leakage}; }
};

class SynthesisError : public std::runtime_error {
public:
    SynthesisError(const std::string& msg, PulseProfile best)
        : std::runtime_error(msg), best_profile(std::move(best)) {}
    PulseProfile best_profile;
};

// Diagonal action of the pulse on the computational basis (|00> is inert):
// a01 = <01|U|01> etc. Missing norm is population left in Rydberg states or
// lost to decay.
struct GateAmplitudes {
    std::complex<double> a01;
    std::complex<double> a10;
    std::complex<double> a11;
};

// Integrates the blockaded two-atom dynamics for the given per-atom Rydberg
// detunings (rad/s). CF4 Magnus steps with matrix exponentials; decay enters
// as a non-Hermitian -i Gamma/2 on Rydberg populations.
GateAmplitudes evolve_gate(const PulseProfile& profile, const RydbergParams& params,
                           double delta1, double delta2, int n_steps = 2400);

// Average two-qubit gate infidelity against CZ, minimized over the global
// single-qubit Z correction; *best_z receives the optimal correction.
double avg_gate_infidelity(const GateAmplitudes& amps, double* best_z = nullptr);

// Searches cosine-series phase profiles for the shortest pulse implementing
// CZ up to a global Z rotation. Deterministic (fixed starts and duration
// grid, shortest workable duration first). Throws SynthesisError with the
// best profile attached if nothing reaches infidelity 1e-3.
PulseProfile synthesize_time_optimal_cz(const RydbergParams& params);

// Two-atom gate at per-atom velocities: Doppler offsets delta_i = -k_uv . v_i,
// Bell fidelity extracted by the parity-oscillation protocol on the state
// prepared through the standard pi/2 - CZ - pi/4 global sequence.
GateResult simulate_cz(const PulseProfile& profile, const RydbergParams& params, Vec2 v1,
                       Vec2 v2);

// F = (P00 + P11)/2 + C/2 with C the fitted parity-oscillation amplitude of
// <ZZ> after a global analysis pi/2 pulse of swept phase. Accepts a pure
// (possibly subnormalized) state or a weighted ensemble of them.
double bell_fidelity_protocol(const Eigen::Vector4cd& state, int n_phases = 24);
double bell_fidelity_protocol(const std::vector<std::pair<double, Eigen::Vector4cd>>& ensemble,
                              int n_phases = 24);

// Global equatorial rotation R(angle, az) on both qubits of a 4-dim state.
Eigen::Matrix4cd global_rotation(double angle, double az);

// Bell-state preparation sequence used throughout: global pi/2, the gate,
// global pi/4 at azimuth pi.
Eigen::Vector4cd bell_prep_state(const Eigen::Matrix4cd& gate);

struct SsbResult {
    double per_gate_fidelity = 0.0;
    double fit_stderr = 0.0;
    double amplitude = 0.0;
    double offset = 0.0;
    std::vector<double> return_probs;
};

// Simplified symmetric-stabilizer-style benchmarking: |++> followed by N
// interleaved CZ gates (even N, ideal circuit = identity) under the given
// noise; the return probability is fit to A p^N + B and p is reported as the
// per-gate fidelity.
SsbResult ssb_gate_fidelity(const std::vector<int>& n_gates, const statesim::NoiseModel& noise,
                            std::uint64_t shots, std::uint64_t seed);

namespace detail {

// Final states of the three driven blocks, for unitarity and blockade-limit
// diagnostics. Bases: {|q1>,|qr>} and {|11>,|1r>,|r1>,|rr>}.
struct BlockStates {
    Eigen::Vector2cd s01;
    Eigen::Vector2cd s10;
    Eigen::Vector4cd s11;
};

BlockStates evolve_blocks(const PulseProfile& profile, const RydbergParams& params,
                          double delta1, double delta2, int n_steps = 2400);

}  // namespace detail

}  // namespace veloq::rydberg
