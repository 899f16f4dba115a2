#include "veloq/statesim.hpp"

#include <omp.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace veloq::statesim {

using std::complex;

namespace {

constexpr int kMaxQubits = 16;

const Eigen::Matrix2cd& pauli_matrix(char p) {
    static const Eigen::Matrix2cd X = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
    static const Eigen::Matrix2cd Y =
        (Eigen::Matrix2cd() << 0, complex<double>(0, -1), complex<double>(0, 1), 0).finished();
    static const Eigen::Matrix2cd Z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    static const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
    switch (p) {
        case 'X': return X;
        case 'Y': return Y;
        case 'Z': return Z;
        default: return I;
    }
}

constexpr char kPauliChars[4] = {'I', 'X', 'Y', 'Z'};

}  // namespace

QuantumRegister::QuantumRegister(int n, std::uint64_t seed, std::uint64_t shot, ExecPolicy policy)
    : n_(n),
      dim_(std::size_t{1} << n),
      amps_(dim_, amp_t{0.0, 0.0}),
      flags_(static_cast<std::size_t>(n)),
      rng_(seed, shot),
      policy_(policy) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("QuantumRegister: qubit count must be in [1,16]");
    }
    amps_[0] = 1.0;
}

bool QuantumRegister::active(int atom) const {
    const AtomFlags& f = flags(atom);
    return f.in_manifold && !f.lost && !f.leaked;
}

void QuantumRegister::require_active(int atom, const char* what) const {
    const AtomFlags& f = flags(atom);
    if (f.lost || f.leaked) {
        throw std::runtime_error(std::string(what) + ": atom is lost");
    }
    if (!f.in_manifold) {
        throw std::runtime_error(std::string(what) + ": atom is outside the qubit manifold");
    }
}

void QuantumRegister::park_in_ground(const std::vector<int>& atoms) {
    for (int a : atoms) {
        require_active(a, "park_in_ground");
        if (kernels::prob_one_serial(amps_.data(), dim_, a) > 1e-12) {
            throw std::runtime_error("park_in_ground: atom not in |0>");
        }
        flags_[static_cast<std::size_t>(a)].in_manifold = false;
    }
}

void QuantumRegister::apply_single_qubit(const std::vector<int>& targets,
                                         const Eigen::Matrix2cd& u) {
    for (int t : targets) {
        require_active(t, "apply_single_qubit");
        if (policy_ == ExecPolicy::kParallel) {
            kernels::apply_1q_omp(amps_.data(), dim_, t, u);
        } else {
            kernels::apply_1q_serial(amps_.data(), dim_, t, u);
        }
    }
    run_attached(NoiseChannel::Attach::kSingleQubitGate, targets);
}

void QuantumRegister::apply_cz(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    std::vector<int> atoms;
    for (auto [a, b] : pairs) {
        if (a == b || seen[static_cast<std::size_t>(a)] || seen[static_cast<std::size_t>(b)]) {
            throw std::invalid_argument("apply_cz: pairs must be disjoint");
        }
        seen[static_cast<std::size_t>(a)] = seen[static_cast<std::size_t>(b)] = true;
        require_active(a, "apply_cz");
        require_active(b, "apply_cz");
        atoms.push_back(a);
        atoms.push_back(b);
    }
    static const std::array<amp_t, 4> cz_diag = {amp_t{1, 0}, amp_t{1, 0}, amp_t{1, 0},
                                                 amp_t{-1, 0}};
    for (auto [a, b] : pairs) {
        if (policy_ == ExecPolicy::kParallel) {
            kernels::apply_diag2_omp(amps_.data(), dim_, a, b, cz_diag);
        } else {
            kernels::apply_diag2_serial(amps_.data(), dim_, a, b, cz_diag);
        }
    }
    run_attached(NoiseChannel::Attach::kTwoQubitGate, atoms);
}

void QuantumRegister::apply_flyby_cz(std::pair<int, int> pair, const FlybyGate& gate) {
    require_active(pair.first, "apply_flyby_cz");
    require_active(pair.second, "apply_flyby_cz");
    std::array<amp_t, 4> diag;
    for (int i = 0; i < 4; ++i) {
        diag[static_cast<std::size_t>(i)] = std::exp(amp_t{0.0, gate.phases[static_cast<std::size_t>(i)]});
    }
    // phases[1] belongs to |01> = first atom excited
    if (policy_ == ExecPolicy::kParallel) {
        kernels::apply_diag2_omp(amps_.data(), dim_, pair.first, pair.second, diag);
    } else {
        kernels::apply_diag2_serial(amps_.data(), dim_, pair.first, pair.second, diag);
    }
    if (gate.leakage > 0.0 && rng_.bernoulli(gate.leakage)) {
        int victim = rng_.bernoulli(0.5) ? pair.first : pair.second;
        collapse(victim);
        flags_[static_cast<std::size_t>(victim)].leaked = true;
        flags_[static_cast<std::size_t>(victim)].in_manifold = false;
    }
    run_attached(NoiseChannel::Attach::kTwoQubitGate, {pair.first, pair.second});
}

void QuantumRegister::velocity_selective_transfer(const std::vector<int>& targets,
                                                  double transfer_fidelity,
                                                  double spectator_infidelity) {
    std::vector<bool> is_target(static_cast<std::size_t>(n_), false);
    for (int t : targets) is_target[static_cast<std::size_t>(t)] = true;

    for (int a = 0; a < n_; ++a) {
        AtomFlags& f = flags_[static_cast<std::size_t>(a)];
        if (f.lost || f.leaked) continue;
        if (is_target[static_cast<std::size_t>(a)]) {
            if (!f.in_manifold) {
                // enter: ground -> |0> of the qubit manifold
                if (rng_.bernoulli(transfer_fidelity)) {
                    f.in_manifold = true;
                    f.transfer_failed = false;
                } else {
                    f.transfer_failed = true;
                }
            } else {
                // exit: |0> component mapped to ground for the fast image
                int outcome = collapse(a);
                if (outcome == 0) {
                    if (rng_.bernoulli(transfer_fidelity)) {
                        f.in_manifold = false;
                        f.pending_readout = 0;
                    } else {
                        f.transfer_failed = true;
                        f.pending_readout = MeasurementRecord::kLost;
                    }
                } else {
                    f.pending_readout = 1;
                }
            }
        } else if (spectator_infidelity > 0.0) {
            if (rng_.bernoulli(spectator_infidelity)) {
                if (!f.in_manifold) {
                    f.in_manifold = true;  // accidental excitation into |0>
                } else {
                    int outcome = collapse(a);
                    if (outcome == 0) f.in_manifold = false;
                }
            }
        }
    }
    run_attached(NoiseChannel::Attach::kTransfer, targets);
}

int QuantumRegister::collapse(int atom) {
    double p1 = kernels::prob_one_serial(amps_.data(), dim_, atom);
    int outcome = rng_.bernoulli(p1) ? 1 : 0;
    kernels::project_serial(amps_.data(), dim_, atom, outcome);
    return outcome;
}

double QuantumRegister::readout_flip_prob() const {
    double p = 0.0;
    for (const NoiseChannel& c : noise_) {
        if (c.kind == NoiseChannel::Kind::kReadoutFlip &&
            c.attach == NoiseChannel::Attach::kMeasure) {
            p += c.strength;
        }
    }
    return p;
}

MeasurementRecord QuantumRegister::measure(const std::vector<int>& targets, Basis basis) {
    // pre-readout channels (loss, leakage) fire first
    run_attached(NoiseChannel::Attach::kMeasure, targets);
    double flip = readout_flip_prob();

    static const Eigen::Matrix2cd H =
        (Eigen::Matrix2cd() << 1, 1, 1, -1).finished() / std::sqrt(2.0);

    MeasurementRecord rec;
    rec.outcomes.assign(static_cast<std::size_t>(n_), 0);
    for (int a = 0; a < n_; ++a) rec.outcomes[static_cast<std::size_t>(a)] = 0;

    for (int t : targets) {
        AtomFlags& f = flags_[static_cast<std::size_t>(t)];
        if (f.lost || f.leaked || f.transfer_failed) {
            rec.outcomes[static_cast<std::size_t>(t)] = MeasurementRecord::kLost;
            continue;
        }
        if (f.pending_readout.has_value()) {
            int o = *f.pending_readout;
            f.pending_readout.reset();
            if (o != MeasurementRecord::kLost && flip > 0.0 && rng_.bernoulli(flip)) o = 1 - o;
            rec.outcomes[static_cast<std::size_t>(t)] = o;
            continue;
        }
        if (!f.in_manifold) {
            // ground-state atom: detected outside the qubit manifold
            rec.outcomes[static_cast<std::size_t>(t)] = MeasurementRecord::kLost;
            continue;
        }
        if (basis == Basis::kX) {
            kernels::apply_1q_serial(amps_.data(), dim_, t, H);
        }
        int o = collapse(t);
        if (basis == Basis::kX) {
            kernels::apply_1q_serial(amps_.data(), dim_, t, H);
        }
        if (flip > 0.0 && rng_.bernoulli(flip)) o = 1 - o;
        rec.outcomes[static_cast<std::size_t>(t)] = o;
    }
    return rec;
}

double QuantumRegister::expectation(const PauliString& p) const {
    if (p.size() != static_cast<std::size_t>(n_)) {
        throw std::invalid_argument("expectation: Pauli string length mismatch");
    }
    if (policy_ == ExecPolicy::kParallel) {
        return kernels::expectation_omp(amps_.data(), dim_, p);
    }
    return kernels::expectation_serial(amps_.data(), dim_, p);
}

double QuantumRegister::norm() const {
    return std::sqrt(policy_ == ExecPolicy::kParallel ? kernels::norm2_omp(amps_.data(), dim_)
                                                      : kernels::norm2_serial(amps_.data(), dim_));
}

void QuantumRegister::apply_pauli(int atom, char p) {
    if (p == 'I') return;
    kernels::apply_1q_serial(amps_.data(), dim_, atom, pauli_matrix(p));
}

void QuantumRegister::apply_depolarizing1q(int atom, double p) {
    if (rng_.bernoulli(p)) {
        apply_pauli(atom, kPauliChars[rng_.uniform_int(4)]);
    }
}

void QuantumRegister::apply_depolarizing2q(std::pair<int, int> pair, double p) {
    if (rng_.bernoulli(p)) {
        apply_pauli(pair.first, kPauliChars[rng_.uniform_int(4)]);
        apply_pauli(pair.second, kPauliChars[rng_.uniform_int(4)]);
    }
}

void QuantumRegister::apply_dephasing(int atom, double p) {
    if (rng_.bernoulli(p)) apply_pauli(atom, 'Z');
}

void QuantumRegister::apply_loss(int atom, double p) {
    AtomFlags& f = flags_[static_cast<std::size_t>(atom)];
    if (f.lost || f.leaked) return;
    if (rng_.bernoulli(p)) {
        if (f.in_manifold) collapse(atom);
        f.lost = true;
        f.in_manifold = false;
    }
}

void QuantumRegister::apply_leakage(int atom, double p) {
    AtomFlags& f = flags_[static_cast<std::size_t>(atom)];
    if (f.lost || f.leaked) return;
    if (rng_.bernoulli(p)) {
        if (f.in_manifold) collapse(atom);
        f.leaked = true;
        f.in_manifold = false;
    }
}

void QuantumRegister::run_attached(NoiseChannel::Attach attach, const std::vector<int>& atoms) {
    for (const NoiseChannel& c : noise_) {
        if (c.attach != attach) continue;
        switch (c.kind) {
            case NoiseChannel::Kind::kDepolarizing1q:
                for (int a : atoms) {
                    if (active(a)) apply_depolarizing1q(a, c.strength);
                }
                break;
            case NoiseChannel::Kind::kDepolarizing2q:
                for (std::size_t i = 0; i + 1 < atoms.size(); i += 2) {
                    if (active(atoms[i]) && active(atoms[i + 1])) {
                        apply_depolarizing2q({atoms[i], atoms[i + 1]}, c.strength);
                    }
                }
                break;
            case NoiseChannel::Kind::kDephasing:
                for (int a : atoms) {
                    if (active(a)) apply_dephasing(a, c.strength);
                }
                break;
            case NoiseChannel::Kind::kLoss:
                for (int a : atoms) apply_loss(a, c.strength);
                break;
            case NoiseChannel::Kind::kLeakage:
                for (int a : atoms) apply_leakage(a, c.strength);
                break;
            case NoiseChannel::Kind::kReadoutFlip:
                break;  // consumed inside measure()
        }
    }
}

PostSelectResult post_select(const std::vector<MeasurementRecord>& records, PostSelectRule rule,
                             int ancilla_atom, int ancilla_value) {
    PostSelectResult out;
    for (const MeasurementRecord& r : records) {
        bool keep = true;
        bool all_present = true;
        int ones = 0;
        for (int o : r.outcomes) {
            if (o == MeasurementRecord::kLost) all_present = false;
            if (o == 1) ++ones;
        }
        switch (rule) {
            case PostSelectRule::kAllPresent:
                keep = all_present;
                break;
            case PostSelectRule::kParityEven:
                keep = all_present && (ones % 2 == 0);
                break;
            case PostSelectRule::kAncillaOutcome:
                keep = r.outcomes.at(static_cast<std::size_t>(ancilla_atom)) == ancilla_value;
                break;
        }
        if (keep) {
            MeasurementRecord kept = r;
            kept.kept = true;
            out.kept.push_back(std::move(kept));
        }
    }
    if (out.kept.empty()) {
        throw std::runtime_error("post_select: no records survive the predicate");
    }
    double n = static_cast<double>(records.size());
    double d = n - static_cast<double>(out.kept.size());
    out.discard_fraction = d / n;
    out.discard_stderr = std::sqrt(out.discard_fraction * (1.0 - out.discard_fraction) / n);
    return out;
}

McEstimate mc_expectation(int n_qubits, std::uint64_t shots, std::uint64_t seed,
                          const NoiseModel& noise,
                          const std::function<void(QuantumRegister&)>& build,
                          const PauliString& p) {
    std::vector<double> vals(shots, 0.0);
    const auto n = static_cast<std::int64_t>(shots);
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < n; ++s) {
        QuantumRegister reg(n_qubits, seed, static_cast<std::uint64_t>(s), ExecPolicy::kSerial);
        reg.set_noise(noise);
        build(reg);
        vals[static_cast<std::size_t>(s)] = reg.expectation(p);
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(shots);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= static_cast<double>(shots) * std::max<double>(1.0, static_cast<double>(shots) - 1.0);
    return {mean, std::sqrt(var), shots};
}

std::vector<MeasurementRecord> run_shots(
    std::uint64_t shots, std::uint64_t seed,
    const std::function<MeasurementRecord(std::uint64_t shot, ShotRng&)>& shot_fn) {
    std::vector<MeasurementRecord> records(shots);
    const auto n = static_cast<std::int64_t>(shots);
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < n; ++s) {
        auto shot = static_cast<std::uint64_t>(s);
        ShotRng rng(seed, shot);
        records[static_cast<std::size_t>(s)] = shot_fn(shot, rng);
        records[static_cast<std::size_t>(s)].shot = shot;
    }
    return records;
}

std::string records_to_csv(const std::vector<MeasurementRecord>& records, int n_atoms) {
    std::ostringstream os;
    os << "shot";
    for (int a = 0; a < n_atoms; ++a) os << ",atom" << a;
    os << ",kept\n";
    for (const MeasurementRecord& r : records) {
        os << r.shot;
        for (int a = 0; a < n_atoms; ++a) {
            int o = r.outcomes.at(static_cast<std::size_t>(a));
            if (o == MeasurementRecord::kLost) {
                os << ",lost";
            } else {
                os << ',' << o;
            }
        }
        os << ',' << (r.kept ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace veloq::statesim
