#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "veloq/rng.hpp"
#include "veloq/statesim_kernels.hpp"

namespace veloq::statesim {

enum class ExecPolicy { kSerial, kParallel };

enum class Basis { kZ, kX };

struct NoiseChannel {
    enum class Kind {
        kDepolarizing1q,
        kDepolarizing2q,
        kDephasing,
        kLoss,
        kReadoutFlip,
        kLeakage,
    };
    enum class Attach {
        kSingleQubitGate,
        kTwoQubitGate,
        kTransfer,
        kMeasure,
    };

    Kind kind;
    double strength = 0.0;  // [0,1]
    Attach attach;
};

using NoiseModel = std::vector<NoiseChannel>;

struct MeasurementRecord {
    static constexpr int kLost = -1;

    std::uint64_t shot = 0;
    std::vector<int> outcomes;  // 0, 1, or kLost per atom
    bool kept = true;
};

// Fly-by entangling gate summary consumed from the Rydberg simulation:
// diagonal phases on the computational basis plus a per-gate probability of
// kicking one pair atom out of the qubit manifold.
struct FlybyGate {
    std::array<double, 4> phases{0.0, 0.0, 0.0, 0.0};  // 00, 01, 10, 11
    double leakage = 0.0;
};

struct AtomFlags {
    bool in_manifold = true;
    bool lost = false;
    bool leaked = false;          // decay/ionization, heralded by SRD
    bool transfer_failed = false; // failed velocity-selective transfer
    // outcome staged by a velocity-selective exit transfer, consumed by the
    // next measure() on this atom
    std::optional<int> pending_readout;
};

// N-qubit state vector with per-atom loss/leakage flags and Monte-Carlo
// noise. Lost or leaked atoms are excluded from coherent operations;
// addressing one directly is a protocol error. Loss collapses the atom in Z
// (quantum-trajectory treatment of tracing out).
class QuantumRegister {
public:
    QuantumRegister(int n, std::uint64_t seed, std::uint64_t shot = 0,
                    ExecPolicy policy = ExecPolicy::kSerial);

    int n() const { return n_; }
    const std::vector<amp_t>& amplitudes() const { return amps_; }
    std::vector<amp_t>& amplitudes() { return amps_; }
    const AtomFlags& flags(int atom) const { return flags_.at(static_cast<std::size_t>(atom)); }
    ShotRng& rng() { return rng_; }

    void set_noise(NoiseModel model) { noise_ = std::move(model); }
    const NoiseModel& noise() const { return noise_; }

    // atom usable for coherent ops
    bool active(int atom) const;

    // Marks atoms as starting outside the qubit manifold (ground-state
    // reservoir). Only valid while they are still in |0>.
    void park_in_ground(const std::vector<int>& atoms);

    void apply_single_qubit(const std::vector<int>& targets, const Eigen::Matrix2cd& u);
    void apply_cz(const std::vector<std::pair<int, int>>& pairs);
    void apply_flyby_cz(std::pair<int, int> pair, const FlybyGate& gate);

    // Velocity-selective transfer. Out-of-manifold targets attempt to enter
    // (success probability transfer_fidelity, landing in |0>; failures are
    // flagged detectable). In-manifold targets attempt to exit: the |0>
    // component is transferred to ground for the following fast image; a
    // failed exit stages a `lost` readout. Every spectator suffers a
    // manifold flip with probability spectator_infidelity.
    void velocity_selective_transfer(const std::vector<int>& targets, double transfer_fidelity,
                                     double spectator_infidelity);

    MeasurementRecord measure(const std::vector<int>& targets, Basis basis);

    // Exact <psi|P|psi> on the current trajectory state.
    double expectation(const PauliString& p) const;

    double norm() const;

    // Explicit noise events (also used by the attached-channel machinery).
    void apply_depolarizing1q(int atom, double p);
    void apply_depolarizing2q(std::pair<int, int> pair, double p);
    void apply_dephasing(int atom, double p);
    void apply_loss(int atom, double p);
    void apply_leakage(int atom, double p);

private:
    void require_active(int atom, const char* what) const;
    void apply_pauli(int atom, char p);
    void run_attached(NoiseChannel::Attach attach, const std::vector<int>& atoms);
    int collapse(int atom);  // sample Z outcome and project
    double readout_flip_prob() const;

    int n_;
    std::size_t dim_;
    std::vector<amp_t> amps_;
    std::vector<AtomFlags> flags_;
    ShotRng rng_;
    ExecPolicy policy_;
    NoiseModel noise_;
};

enum class PostSelectRule {
    kAllPresent,       // every outcome is 0/1
    kParityEven,       // all present and an even number of 1s
    kAncillaOutcome,   // specific atom reports a specific value
};

struct PostSelectResult {
    std::vector<MeasurementRecord> kept;
    double discard_fraction = 0.0;
    double discard_stderr = 0.0;
};

// Filters records; throws std::runtime_error when nothing survives.
PostSelectResult post_select(const std::vector<MeasurementRecord>& records, PostSelectRule rule,
                             int ancilla_atom = -1, int ancilla_value = 0);

struct McEstimate {
    double mean = 0.0;
    double stderr = 0.0;
    std::uint64_t shots = 0;
};

// Monte-Carlo expectation over noise trajectories: `build` prepares one shot
// on a fresh register (noise sampled from the register's RNG), then the
// exact expectation of `p` on that trajectory is accumulated. Shots are
// OpenMP-parallel with counter-based per-shot RNG streams; the reduction is
// serial in shot order, so results do not depend on the thread count.
McEstimate mc_expectation(int n_qubits, std::uint64_t shots, std::uint64_t seed,
                          const NoiseModel& noise,
                          const std::function<void(QuantumRegister&)>& build,
                          const PauliString& p);

// Runs `shot_fn` for every shot index (OpenMP-parallel, deterministic
// per-shot streams) and returns the records in shot order.
std::vector<MeasurementRecord> run_shots(
    std::uint64_t shots, std::uint64_t seed,
    const std::function<MeasurementRecord(std::uint64_t shot, ShotRng&)>& shot_fn);

// Records CSV: header `shot,atom0,...,atomN,kept`; lost outcomes written as
// the string `lost`.
std::string records_to_csv(const std::vector<MeasurementRecord>& records, int n_atoms);

}  // namespace veloq::statesim
