#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "veloq/statesim.hpp"

using namespace veloq;
using namespace veloq::statesim;
using std::complex;

namespace {

const Eigen::Matrix2cd kX = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
const Eigen::Matrix2cd kH = (Eigen::Matrix2cd() << 1, 1, 1, -1).finished() / std::sqrt(2.0);

Eigen::Matrix2cd rz(double angle) {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
    u(0, 0) = std::exp(complex<double>(0, -angle / 2));
    u(1, 1) = std::exp(complex<double>(0, angle / 2));
    return u;
}

}  // namespace

TEST_CASE("X maps |0> to |1>") {
    QuantumRegister reg(1, 1);
    reg.apply_single_qubit({0}, kX);
    CHECK(std::abs(reg.amplitudes()[1] - amp_t{1, 0}) < 1e-15);
}

TEST_CASE("two quarter Z rotations equal a half rotation") {
    QuantumRegister a(1, 1), b(1, 1);
    a.apply_single_qubit({0}, kH);
    b.apply_single_qubit({0}, kH);
    a.apply_single_qubit({0}, rz(M_PI / 2));
    a.apply_single_qubit({0}, rz(M_PI / 2));
    b.apply_single_qubit({0}, rz(M_PI));
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(a.amplitudes()[i] - b.amplitudes()[i]) < 1e-14);
    }
}

TEST_CASE("Hadamard twice is the identity") {
    QuantumRegister reg(2, 3);
    reg.apply_single_qubit({0, 1}, kH);
    reg.apply_single_qubit({0, 1}, kH);
    CHECK(std::abs(reg.amplitudes()[0] - amp_t{1, 0}) < 1e-12);
}

TEST_CASE("CZ on |++> gives the two-qubit graph state stabilizers") {
    QuantumRegister reg(2, 5);
    reg.apply_single_qubit({0, 1}, kH);
    reg.apply_cz({{0, 1}});
    CHECK(reg.expectation({"XZ"}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reg.expectation({"ZX"}) == doctest::Approx(1.0).epsilon(1e-12));
    reg.apply_cz({{0, 1}});  // CZ^2 = I
    CHECK(reg.expectation({"XI"}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reg.expectation({"IX"}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("overlapping CZ pairs are rejected") {
    QuantumRegister reg(3, 5);
    CHECK_THROWS_AS(reg.apply_cz({{0, 1}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("flyby leakage flags the expected fraction of shots") {
    const double p = 0.12;
    const std::uint64_t shots = 20000;
    int flagged = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        QuantumRegister reg(2, 99, s);
        reg.apply_single_qubit({0, 1}, kH);
        FlybyGate g;
        g.phases = {0, 0, 0, M_PI};
        g.leakage = p;
        reg.apply_flyby_cz({0, 1}, g);
        if (reg.flags(0).leaked || reg.flags(1).leaked) ++flagged;
    }
    double frac = static_cast<double>(flagged) / shots;
    double sigma = std::sqrt(p * (1 - p) / shots);
    CHECK(std::abs(frac - p) < 4 * sigma);
}

TEST_CASE("ideal flyby gate equals CZ") {
    QuantumRegister a(2, 7), b(2, 7);
    a.apply_single_qubit({0, 1}, kH);
    b.apply_single_qubit({0, 1}, kH);
    a.apply_cz({{0, 1}});
    FlybyGate g;
    g.phases = {0, 0, 0, M_PI};
    b.apply_flyby_cz({0, 1}, g);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(a.amplitudes()[i] - b.amplitudes()[i]) < 1e-14);
    }
}

TEST_CASE("gates on lost or parked atoms are protocol errors") {
    QuantumRegister reg(2, 11);
    reg.park_in_ground({1});
    CHECK_THROWS_AS(reg.apply_single_qubit({1}, kX), std::runtime_error);
    reg.apply_loss(0, 1.0);
    CHECK_THROWS_AS(reg.apply_single_qubit({0}, kX), std::runtime_error);
}

TEST_CASE("deterministic selective prep with unit fidelity") {
    QuantumRegister reg(3, 13);
    reg.park_in_ground({0, 1, 2});
    reg.velocity_selective_transfer({0, 2}, 1.0, 0.0);
    CHECK(reg.active(0));
    CHECK(!reg.active(1));
    CHECK(reg.active(2));
}

TEST_CASE("transfer fidelity 0.97 prepares ~97% of targets") {
    const std::uint64_t shots = 20000;
    int prepared = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        QuantumRegister reg(1, 17, s);
        reg.park_in_ground({0});
        reg.velocity_selective_transfer({0}, 0.97, 0.0);
        if (reg.active(0)) ++prepared;
    }
    double frac = static_cast<double>(prepared) / shots;
    CHECK(std::abs(frac - 0.97) < 4 * std::sqrt(0.97 * 0.03 / shots));
}

TEST_CASE("stationary spectators are excited at the configured 0.4% rate") {
    const std::uint64_t shots = 50000;
    int excited = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        QuantumRegister reg(2, 19, s);
        reg.park_in_ground({0, 1});
        reg.velocity_selective_transfer({0}, 1.0, 0.004);
        if (reg.flags(1).in_manifold) ++excited;
    }
    double frac = static_cast<double>(excited) / shots;
    CHECK(std::abs(frac - 0.004) < 4 * std::sqrt(0.004 * 0.996 / shots));
}

TEST_CASE("measurement of |0> in Z is always 0 and |+> in X is always 0") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        QuantumRegister reg(1, 23, s);
        auto rec = reg.measure({0}, Basis::kZ);
        CHECK(rec.outcomes[0] == 0);
        QuantumRegister reg2(1, 23, s);
        reg2.apply_single_qubit({0}, kH);
        auto rec2 = reg2.measure({0}, Basis::kX);
        CHECK(rec2.outcomes[0] == 0);
    }
}

TEST_CASE("Born rule for |+> in Z at 1e4 shots") {
    const std::uint64_t shots = 10000;
    int ones = 0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        QuantumRegister reg(1, 29, s);
        reg.apply_single_qubit({0}, kH);
        ones += reg.measure({0}, Basis::kZ).outcomes[0];
    }
    double frac = static_cast<double>(ones) / shots;
    CHECK(std::abs(frac - 0.5) < 3 * std::sqrt(0.25 / shots));
}

TEST_CASE("exact expectations") {
    QuantumRegister reg(1, 31);
    CHECK(reg.expectation({"Z"}) == doctest::Approx(1.0));
    QuantumRegister reg2(2, 31);
    reg2.apply_single_qubit({0, 1}, kH);
    reg2.apply_cz({{0, 1}});
    CHECK(reg2.expectation({"XZ"}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("depolarizing1q scales <Z> by (1-p)") {
    const double p = 0.2;
    NoiseModel noise = {{NoiseChannel::Kind::kDepolarizing1q, p,
                         NoiseChannel::Attach::kSingleQubitGate}};
    auto est = mc_expectation(1, 20000, 37, noise,
                              [&](QuantumRegister& reg) {
                                  reg.apply_single_qubit({0}, Eigen::Matrix2cd::Identity());
                              },
                              {"Z"});
    CHECK(std::abs(est.mean - (1.0 - p)) < 4 * est.stderr);
    CHECK(est.stderr < 0.01);
}

TEST_CASE("dephasing scales <X> by (1-p) but leaves <Z> alone") {
    const double p = 0.3;
    NoiseModel noise = {{NoiseChannel::Kind::kDephasing, p, NoiseChannel::Attach::kSingleQubitGate}};
    auto x_est = mc_expectation(1, 20000, 41, noise,
                                [&](QuantumRegister& reg) { reg.apply_single_qubit({0}, kH); },
                                {"X"});
    // with probability p a Z flips |+> to |->: <X> = 1 - 2p
    CHECK(std::abs(x_est.mean - (1.0 - 2.0 * p)) < 4 * x_est.stderr);
}

TEST_CASE("post-selection discard fraction matches the loss binomial") {
    const double p = 0.05;
    const int k = 4;
    const std::uint64_t shots = 20000;
    auto records = run_shots(shots, 43, [&](std::uint64_t shot, ShotRng&) {
        QuantumRegister reg(k, 43, shot);
        NoiseModel noise = {{NoiseChannel::Kind::kLoss, p, NoiseChannel::Attach::kMeasure}};
        reg.set_noise(noise);
        return reg.measure({0, 1, 2, 3}, Basis::kZ);
    });
    auto ps = post_select(records, PostSelectRule::kAllPresent);
    double expect = 1.0 - std::pow(1.0 - p, k);
    CHECK(std::abs(ps.discard_fraction - expect) < 4 * ps.discard_stderr);

    auto clean = run_shots(100, 47, [&](std::uint64_t shot, ShotRng&) {
        QuantumRegister reg(2, 47, shot);
        return reg.measure({0, 1}, Basis::kZ);
    });
    CHECK(post_select(clean, PostSelectRule::kAllPresent).discard_fraction == 0.0);
}

TEST_CASE("post-selection on an empty result throws") {
    std::vector<MeasurementRecord> records(3);
    for (auto& r : records) r.outcomes = {MeasurementRecord::kLost};
    CHECK_THROWS_AS(post_select(records, PostSelectRule::kAllPresent), std::runtime_error);
}

TEST_CASE("norm preserved and global phase irrelevant") {
    QuantumRegister reg(3, 53);
    reg.apply_single_qubit({0, 1, 2}, kH);
    reg.apply_cz({{0, 1}});
    reg.apply_cz({{1, 2}});
    CHECK(std::abs(reg.norm() - 1.0) < 1e-9);

    double before = reg.expectation({"XZI"});
    for (auto& a : reg.amplitudes()) a *= std::exp(complex<double>(0, 0.7));
    CHECK(reg.expectation({"XZI"}) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("identical seeds give byte-identical records") {
    auto run = [] {
        NoiseModel noise = {
            {NoiseChannel::Kind::kDepolarizing2q, 0.03, NoiseChannel::Attach::kTwoQubitGate},
            {NoiseChannel::Kind::kReadoutFlip, 0.01, NoiseChannel::Attach::kMeasure}};
        auto records = run_shots(500, 59, [&](std::uint64_t shot, ShotRng&) {
            QuantumRegister reg(4, 59, shot);
            reg.set_noise(noise);
            reg.apply_single_qubit({0, 1, 2, 3}, kH);
            reg.apply_cz({{0, 1}, {2, 3}});
            return reg.measure({0, 1, 2, 3}, Basis::kZ);
        });
        return records_to_csv(records, 4);
    };
    CHECK(run() == run());
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    QuantumRegister serial(8, 61, 0, ExecPolicy::kSerial);
    QuantumRegister parallel(8, 61, 0, ExecPolicy::kParallel);
    for (auto* reg : {&serial, &parallel}) {
        reg->apply_single_qubit({0, 1, 2, 3, 4, 5, 6, 7}, kH);
        reg->apply_cz({{0, 1}, {2, 3}, {4, 5}, {6, 7}});
        reg->apply_single_qubit({2, 5}, kX);
        reg->apply_cz({{1, 2}, {3, 4}, {5, 6}});
    }
    for (std::size_t i = 0; i < serial.amplitudes().size(); ++i) {
        CHECK(serial.amplitudes()[i] == parallel.amplitudes()[i]);
    }
    CHECK(serial.expectation({"XZIIIIZX"}) ==
          doctest::Approx(parallel.expectation({"XZIIIIZX"})).epsilon(1e-14));
}

TEST_CASE("pauli string commutation checks") {
    PauliString a{"XZ"};
    PauliString b{"ZX"};
    CHECK(a.commutes_with(b));
    PauliString c{"XI"};
    PauliString d{"ZI"};
    CHECK(!c.commutes_with(d));
}

TEST_CASE("records CSV schema") {
    std::vector<MeasurementRecord> records(1);
    records[0].shot = 0;
    records[0].outcomes = {0, 1, MeasurementRecord::kLost};
    records[0].kept = true;
    std::string csv = records_to_csv(records, 3);
    CHECK(csv == "shot,atom0,atom1,atom2,kept\n0,0,1,lost,1\n");
}
