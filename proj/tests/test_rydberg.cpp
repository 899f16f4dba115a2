#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "veloq/constants.hpp"
#include "veloq/rydberg.hpp"

using namespace veloq;
using namespace veloq::rydberg;
using veloq::constants::pi;
using veloq::constants::two_pi;

namespace {

const RydbergParams& default_params() {
    static RydbergParams p;  // B/Omega = 50, no decay
    return p;
}

const PulseProfile& synthesized() {
    static PulseProfile profile = synthesize_time_optimal_cz(default_params());
    return profile;
}

}  // namespace

TEST_CASE("synthesis reaches sub-1e-4 infidelity at B/Omega = 50") {
    const PulseProfile& p = synthesized();
    GateAmplitudes amps = evolve_gate(p, default_params(), 0.0, 0.0);
    CHECK(avg_gate_infidelity(amps) < 1e-5);

    GateResult r = simulate_cz(p, default_params(), {}, {});
    CHECK(1.0 - r.bell_fidelity < 1e-4);
}

TEST_CASE("synthesized duration sits in the sanity corridor [6,10]/Omega") {
    const PulseProfile& p = synthesized();
    double omega_t = default_params().rabi * p.duration;
    CHECK(omega_t >= 6.0);
    CHECK(omega_t <= 10.0);
}

TEST_CASE("|01> and |10> acquire equal phases under the symmetric drive") {
    GateAmplitudes amps = evolve_gate(synthesized(), default_params(), 0.0, 0.0);
    CHECK(std::arg(amps.a01) == doctest::Approx(std::arg(amps.a10)).epsilon(1e-10));
    CHECK(std::abs(amps.a01 - amps.a10) < 1e-12);
}

TEST_CASE("corrected basis phases implement CZ") {
    GateResult r = simulate_cz(synthesized(), default_params(), {}, {});
    CHECK(r.basis_phases[0] == 0.0);
    CHECK(std::abs(std::remainder(r.basis_phases[1], two_pi)) < 2e-3);
    CHECK(std::abs(std::remainder(r.basis_phases[2], two_pi)) < 2e-3);
    CHECK(std::abs(std::remainder(r.basis_phases[3] - pi, two_pi)) < 2e-3);
    CHECK(r.leakage < 1e-4);
}

TEST_CASE("decay-free block evolution is unitary to 1e-8") {
    PulseProfile p;
    p.duration = 8.0 / default_params().rabi;
    p.phase_coeffs = {0.4, -0.7, 0.2, 0.9};
    auto blocks = detail::evolve_blocks(p, default_params(), 0.3 * default_params().rabi,
                                        -0.1 * default_params().rabi);
    CHECK(std::abs(blocks.s01.norm() - 1.0) < 1e-8);
    CHECK(std::abs(blocks.s10.norm() - 1.0) < 1e-8);
    CHECK(std::abs(blocks.s11.norm() - 1.0) < 1e-8);
}

TEST_CASE("blockade limit approaches the superatom sqrt(2) Rabi model") {
    RydbergParams params;
    params.blockade = 100.0 * params.rabi;
    // constant-phase drive for a quarter of the superatom cycle
    PulseProfile p;
    p.duration = (pi / std::sqrt(2.0)) / params.rabi;
    p.phase_coeffs = {};
    for (double frac : {0.25, 0.5, 1.0}) {
        PulseProfile q = p;
        q.duration = frac * p.duration;
        auto blocks = detail::evolve_blocks(q, params, 0.0, 0.0);
        // population left in |11> vs the two-level superatom prediction
        double p11 = std::norm(blocks.s11(0));
        double predicted = std::cos(0.5 * std::sqrt(2.0) * params.rabi * q.duration);
        predicted *= predicted;
        CHECK(std::abs(p11 - predicted) < 1e-3);
    }
}

TEST_CASE("fly-by fidelity at v=0 matches the static gate to 1e-6") {
    GateResult moving = simulate_cz(synthesized(), default_params(), {0.0, 0.0}, {0.0, 0.0});
    GateResult still = simulate_cz(synthesized(), default_params(), {}, {});
    CHECK(moving.bell_fidelity == doctest::Approx(still.bell_fidelity).epsilon(1e-9));
}

TEST_CASE("fly-by fidelity is even in v and non-increasing over the first lobe") {
    const PulseProfile& p = synthesized();
    std::vector<double> vs = {0.0, 0.05, 0.1, 0.2, 0.4, 0.8};
    std::vector<double> fid;
    for (double v : vs) {
        GateResult plus = simulate_cz(p, default_params(), {v, 0.0}, {});
        GateResult minus = simulate_cz(p, default_params(), {-v, 0.0}, {});
        CHECK(plus.bell_fidelity == doctest::Approx(minus.bell_fidelity).epsilon(1e-9));
        fid.push_back(plus.bell_fidelity);
    }
    for (std::size_t i = 1; i < fid.size(); ++i) {
        CHECK(fid[i] <= fid[i - 1] + 1e-9);
    }
    // moderate infidelity at the flying-ancilla operating point
    GateResult op = simulate_cz(p, default_params(), {0.1, 0.0}, {});
    CHECK(op.bell_fidelity > 0.99);
    CHECK(op.bell_fidelity < 1.0);
}

TEST_CASE("Doppler symmetry: swapping atom velocities leaves Bell fidelity unchanged") {
    const PulseProfile& p = synthesized();
    GateResult ab = simulate_cz(p, default_params(), {0.13, 0.0}, {-0.05, 0.0});
    GateResult ba = simulate_cz(p, default_params(), {-0.05, 0.0}, {0.13, 0.0});
    CHECK(ab.bell_fidelity == doctest::Approx(ba.bell_fidelity).epsilon(1e-9));
}

TEST_CASE("bell protocol: ideal Phi+ gives 1, fully mixed gives 0.25") {
    Eigen::Vector4cd phi_plus = Eigen::Vector4cd::Zero();
    phi_plus(0) = 1.0 / std::sqrt(2.0);
    phi_plus(3) = 1.0 / std::sqrt(2.0);
    CHECK(bell_fidelity_protocol(phi_plus) == doctest::Approx(1.0).epsilon(1e-10));

    std::vector<std::pair<double, Eigen::Vector4cd>> mixed;
    for (int i = 0; i < 4; ++i) {
        Eigen::Vector4cd e = Eigen::Vector4cd::Zero();
        e(i) = 1.0;
        mixed.push_back({0.25, e});
    }
    CHECK(bell_fidelity_protocol(mixed) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK_THROWS_AS(bell_fidelity_protocol(phi_plus, 2), std::runtime_error);
}

TEST_CASE("bell prep sequence on an ideal CZ yields a perfect Bell state") {
    Eigen::Matrix4cd cz = Eigen::Matrix4cd::Identity();
    cz(3, 3) = -1.0;
    Eigen::Vector4cd psi = bell_prep_state(cz);
    CHECK(std::norm(psi(0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(psi(3)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(psi(1)) < 1e-12);
    CHECK(std::norm(psi(2)) < 1e-12);
}

TEST_CASE("SSB recovers injected depolarizing strengths") {
    std::vector<int> lengths = {2, 4, 6, 8, 10};

    SsbResult clean = ssb_gate_fidelity(lengths, {}, 2000, 101);
    CHECK(clean.per_gate_fidelity > 0.9999);

    statesim::NoiseModel eps1 = {{statesim::NoiseChannel::Kind::kDepolarizing2q, 0.01,
                                  statesim::NoiseChannel::Attach::kTwoQubitGate}};
    SsbResult r1 = ssb_gate_fidelity(lengths, eps1, 10000, 103);
    CHECK(std::abs(r1.per_gate_fidelity - 0.990) < 0.0015);
    CHECK(std::abs((1.0 - r1.per_gate_fidelity) - 0.01) / 0.01 < 0.05);

    statesim::NoiseModel eps2 = {{statesim::NoiseChannel::Kind::kDepolarizing2q, 0.0014,
                                  statesim::NoiseChannel::Attach::kTwoQubitGate}};
    SsbResult r2 = ssb_gate_fidelity(lengths, eps2, 40000, 107);
    CHECK(r2.per_gate_fidelity == doctest::Approx(0.9986).epsilon(5e-4));

    CHECK_THROWS_AS(ssb_gate_fidelity({4}, {}, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(ssb_gate_fidelity({3, 5}, {}, 100, 1), std::invalid_argument);
}

TEST_CASE("pulse profile JSON round-trip") {
    const PulseProfile& p = synthesized();
    PulseProfile q = PulseProfile::from_json(p.to_json());
    CHECK(q.duration == p.duration);
    CHECK(q.z_correction == p.z_correction);
    REQUIRE(q.phase_coeffs.size() == p.phase_coeffs.size());
    for (std::size_t i = 0; i < p.phase_coeffs.size(); ++i) {
        CHECK(q.phase_coeffs[i] == p.phase_coeffs[i]);
    }
}

TEST_CASE("synthesis rejects weak blockade") {
    RydbergParams weak;
    weak.blockade = 5.0 * weak.rabi;
    CHECK_THROWS_AS(synthesize_time_optimal_cz(weak), std::invalid_argument);
}
