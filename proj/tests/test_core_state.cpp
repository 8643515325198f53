#include <doctest.h>

#include <cmath>

#include "fallball/errors.hpp"
#include "fallball/phase_state.hpp"
#include "fallball/rng.hpp"

using namespace fallball;

namespace {

PhaseState make_state(std::initializer_list<double> q, std::initializer_list<double> v,
                      double target = 1.0) {
    PhaseState s;
    s.q = Eigen::VectorXd(static_cast<Eigen::Index>(q.size()));
    s.v = Eigen::VectorXd(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double x : q) s.q(i++) = x;
    i = 0;
    for (double x : v) s.v(i++) = x;
    s.energy_target = target;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("core_state");

TEST_CASE("core_state: mass profile derived parameters match closed forms") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 4);
        std::vector<double> m(n);
        for (auto& x : m) x = 0.1 + 5.0 * rng.uniform01();
        MassProfile mp(m);
        for (int i = 1; i < n; ++i) {
            const double g = (m[i - 1] - m[i]) / (m[i - 1] + m[i]);
            const double c = 2.0 * m[i - 1] * m[i] / (m[i - 1] + m[i]);
            CHECK(std::abs(mp.gamma_at(i) - g) <= 1e-15);
            CHECK(std::abs(mp.c_at(i) - c) <= 1e-15 * c);
            CHECK(mp.gamma_at(i) > -1.0);
            CHECK(mp.gamma_at(i) < 1.0);
            CHECK((mp.gamma_at(i) >= 0.0) == (m[i - 1] >= m[i]));
            CHECK(mp.c_at(i) > 0.0);
        }
    }
}

TEST_CASE("core_state: ordering class is recomputed from the masses") {
    CHECK(MassProfile({3.0, 2.0, 1.0}).ordering_class() == MassOrdering::StrictTop);
    CHECK(MassProfile({3.0, 2.0, 2.0}).ordering_class() == MassOrdering::StrictTop);
    CHECK(MassProfile({2.0, 2.0, 1.0}).ordering_class() == MassOrdering::Nonincreasing);
    CHECK(MassProfile({1.0, 1.0}).ordering_class() == MassOrdering::Nonincreasing);
    CHECK(MassProfile({1.0, 2.0}).ordering_class() == MassOrdering::Unordered);
    CHECK(MassProfile({2.0, 1.0, 3.0}).ordering_class() == MassOrdering::Unordered);
}

TEST_CASE("core_state: mass profile rejects bad input") {
    CHECK_THROWS_AS(MassProfile(std::vector<double>{1.0}), InvalidConfigurationError);
    CHECK_THROWS_AS(MassProfile({1.0, 0.0}), InvalidConfigurationError);
    CHECK_THROWS_AS(MassProfile({1.0, -2.0}), InvalidConfigurationError);
}

TEST_CASE("core_state: total energy direct substitutions") {
    MassProfile ones({1.0, 1.0});
    CHECK(total_energy(ones, make_state({0, 0}, {0, 0})) == 0.0);
    CHECK(total_energy(ones, make_state({1, 2}, {0, 0})) == 3.0);
    MassProfile mp({3.0, 1.0});
    CHECK(total_energy(mp, make_state({0, 1}, {-1, 1})) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("core_state: total energy rejects mismatched lengths") {
    MassProfile mp({1.0, 1.0});
    Eigen::VectorXd q3 = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd v3 = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(total_energy(mp, q3, v3), DimensionError);
}

TEST_CASE("core_state: particle energies substitute and sum to H") {
    MassProfile mp({2.0, 1.0});
    const Eigen::VectorXd h = particle_energies(mp, make_state({0, 0}, {1, -1}).q,
                                                make_state({0, 0}, {1, -1}).v);
    CHECK(h(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h(1) == doctest::Approx(0.5).epsilon(1e-15));

    MassProfile ones({1.0, 1.0});
    const Eigen::VectorXd h2 = particle_energies(ones, make_state({1, 1}, {0, 0}).q,
                                                 make_state({1, 1}, {0, 0}).v);
    CHECK(h2(0) == 1.0);
    CHECK(h2(1) == 1.0);

    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        MassProfile rmp({0.5 + rng.uniform01(), 0.5 + rng.uniform01(), 0.5 + rng.uniform01()});
        Eigen::VectorXd q(3), v(3);
        for (int i = 0; i < 3; ++i) {
            q(i) = rng.uniform01();
            v(i) = rng.normal();
        }
        std::sort(q.data(), q.data() + 3);
        CHECK(std::abs(particle_energies(rmp, q, v).sum() - total_energy(rmp, q, v)) <= 1e-12);
    }
}

TEST_CASE("core_state: normalize_to_shell scales by homogeneity") {
    MassProfile mp({1.0, 1.0});
    // H = 4, purely potential
    PhaseState s = normalize_to_shell(mp, make_state({2, 2}, {0, 0}).q,
                                      make_state({2, 2}, {0, 0}).v, 1.0);
    CHECK(s.q(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.q(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(total_energy(mp, s) - 1.0) <= 1e-14);

    SUBCASE("already on the shell: identity") {
        PhaseState t = normalize_to_shell(mp, s.q, s.v, 1.0);
        CHECK((t.q - s.q).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((t.v - s.v).cwiseAbs().maxCoeff() <= 1e-15);
    }

    SUBCASE("random states land on the shell") {
        Rng rng(17);
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::VectorXd q(2), v(2);
            q << rng.uniform01(), 1.0 + rng.uniform01();
            v << rng.normal(), rng.normal();
            PhaseState out = normalize_to_shell(mp, q, v, 1.0);
            CHECK(std::abs(total_energy(mp, out) - 1.0) <= 1e-14);
            // idempotence
            PhaseState out2 = normalize_to_shell(mp, out.q, out.v, 1.0);
            CHECK((out2.q - out.q).cwiseAbs().maxCoeff() <= 1e-14);
        }
    }

    SUBCASE("zero energy is refused") {
        CHECK_THROWS_AS(normalize_to_shell(mp, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 1.0),
                        DegenerateInputError);
    }
}

TEST_CASE("core_state: rods_to_points shift and energy bookkeeping") {
    MassProfile mp({1.0, 1.0});

    SUBCASE("r = 0 is the identity") {
        Eigen::VectorXd q(2), v(2);
        q << 0.3, 1.7;
        v << 0.1, -0.2;
        const RodConversion rc = rods_to_points(0.0, mp, q, v, 5.0);
        CHECK((rc.state.q - q).cwiseAbs().maxCoeff() == 0.0);
        CHECK(rc.h0 == 5.0);
    }

    SUBCASE("direct substitution") {
        Eigen::VectorXd q(2), v(2);
        q << 0.5, 2.5;
        v << 0.0, 0.0;
        const RodConversion rc = rods_to_points(0.5, mp, q, v, 5.0);
        CHECK(rc.state.q(0) == doctest::Approx(0.0));
        CHECK(rc.state.q(1) == doctest::Approx(1.0));
        CHECK(rc.h0 == doctest::Approx(5.0 - 0.5 * (1.0 + 3.0)).epsilon(1e-15));
    }

    SUBCASE("round trip is the identity") {
        Eigen::VectorXd q(2), v(2);
        q << 0.6, 2.9;
        v << 0.4, -1.1;
        const RodConversion there = rods_to_points(0.5, mp, q, v, 4.0);
        const RodConversion back = points_to_rods(0.5, mp, there.state.q, there.state.v, there.h0);
        CHECK((back.state.q - q).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(std::abs(back.h0 - 4.0) <= 1e-15);
    }

    SUBCASE("overlapping rods are refused") {
        Eigen::VectorXd q(2), v = Eigen::VectorXd::Zero(2);
        q << 0.5, 1.2;  // gap 0.7 < 2r = 1
        CHECK_THROWS_AS(rods_to_points(0.5, mp, q, v, 5.0), InvalidConfigurationError);
        Eigen::VectorXd q2(2);
        q2 << 0.2, 3.0;  // rod 1 into the floor
        CHECK_THROWS_AS(rods_to_points(0.5, mp, q2, v, 5.0), InvalidConfigurationError);
    }
}

TEST_CASE("core_state: sampler is deterministic and avoids the singular set") {
    MassProfile mp({3.0, 2.0, 1.0});
    const PhaseState a = sample_state(mp, 1.0, 42);
    const PhaseState b = sample_state(mp, 1.0, 42);
    CHECK((a.q - b.q).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.v - b.v).cwiseAbs().maxCoeff() == 0.0);

    for (int seed = 0; seed < 10000; ++seed) {
        const PhaseState s = sample_state(mp, 1.0, static_cast<std::uint64_t>(seed));
        CHECK_NOTHROW(validate_state(mp, s));
        CHECK(s.q(0) > 0.0);
        CHECK(s.q(0) < s.q(1));
        CHECK(s.q(1) < s.q(2));
        CHECK_FALSE(is_degenerate(mp, s).degenerate);
        CHECK(std::abs(total_energy(mp, s) - 1.0) <= 1e-13);
    }
}

TEST_CASE("core_state: degeneracy detection with maximal k") {
    MassProfile mp2({1.0, 1.0});
    CHECK(is_degenerate(mp2, make_state({0, 1}, {0, 1})).degenerate);
    CHECK(is_degenerate(mp2, make_state({0, 1}, {0, 1})).frozen_count == 1);
    CHECK_FALSE(is_degenerate(mp2, make_state({0, 1}, {-0.1, 1})).degenerate);

    MassProfile mp3({1.0, 1.0, 1.0});
    const Degeneracy d = is_degenerate(mp3, make_state({0, 0, 1}, {0, 0, -1}));
    CHECK(d.degenerate);
    CHECK(d.frozen_count == 2);
}

TEST_CASE("core_state: state validation enforces ordering and the shell") {
    MassProfile mp({1.0, 1.0});
    CHECK_THROWS_AS(validate_state(mp, make_state({1.0, 0.5}, {0, 0}, 1.5)), ContractViolation);
    PhaseState off = make_state({0.25, 0.5}, {0.5, 0.5});
    off.energy_target = 2.0;  // actual H = 1
    CHECK_THROWS_AS(validate_state(mp, off), ContractViolation);
}

TEST_SUITE_END();
