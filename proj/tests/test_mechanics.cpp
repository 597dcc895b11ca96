#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "symcon/damage.hpp"
#include "symcon/energy.hpp"
#include "symcon/kinematics.hpp"
#include "symcon/materials.hpp"
#include "symcon/program.hpp"
#include "symcon/stress.hpp"

using namespace symcon;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// 0.63 I1 + 0.39 I2 (+ c), the case-1 generalized Mooney-Rivlin shape
EnergyModel case1_model(double extra_const = 0.0) {
    EnergyModel m;
    if (extra_const == 0.0) {
        m.program = make_program({ "add", "mul", "const", "x1", "mul", "const", "x2" },
                                 { 0.63, 0.39 });
    } else {
        m.program = make_program(
            { "add", "add", "mul", "const", "x1", "mul", "const", "x2", "const" },
            { 0.63, 0.39, extra_const });
    }
    return m;
}

// case-1 isochoric part + kappa/2 (J-1)^2 over (I1b, I2b, J)
EnergyModel case1_vol_model(double kappa) {
    EnergyModel m;
    m.program = make_program({ "add", "add", "mul", "const", "x1", "mul", "const", "x2",
                               "mul", "const", "n2", "sub", "x3", "const" },
                             { 0.63, 0.39, kappa / 2.0, 1.0 });
    m.layout = { EnergyInput::Iso1, EnergyInput::Iso2, EnergyInput::J };
    return m;
}

}  // namespace

TEST_CASE("deformation_state builds incompressible kinematics") {
    auto ut1 = deformation_state(LoadingCase::UT, 1.0);
    CHECK_THAT(ut1.I1, WithinAbs(3.0, 1e-14));
    CHECK_THAT(ut1.I2, WithinAbs(3.0, 1e-14));
    CHECK_THAT(ut1.I3, WithinAbs(1.0, 1e-14));

    // C = diag(4, 0.5, 0.5)
    auto ut2 = deformation_state(LoadingCase::UT, 2.0);
    CHECK_THAT(ut2.I1, WithinAbs(5.0, 1e-12));
    CHECK_THAT(ut2.I2, WithinAbs(4.25, 1e-12));
    CHECK_THAT(ut2.I3, WithinAbs(1.0, 1e-12));

    // C = diag(4, 1, 0.25); I and II coincide for pure shear
    auto ps2 = deformation_state(LoadingCase::PS, 2.0);
    CHECK_THAT(ps2.I1, WithinAbs(5.25, 1e-12));
    CHECK_THAT(ps2.I2, WithinAbs(5.25, 1e-12));
    CHECK_THAT(ps2.I3, WithinAbs(1.0, 1e-12));

    auto ebt = deformation_state(LoadingCase::EBT, 1.5);
    CHECK_THAT(ebt.J, WithinAbs(1.0, 1e-12));
    CHECK_THAT(ebt.I1_bar, WithinRel(ebt.I1, 1e-12));

    CHECK_THROWS(deformation_state(LoadingCase::UT, 0.0));
}

TEST_CASE("fd_energy_derivatives matches analytic derivatives") {
    auto linear = case1_model();
    auto s = deformation_state(LoadingCase::UT, 1.7);
    auto d = fd_energy_derivatives(linear, s);
    REQUIRE(d.valid);
    // central differences are exact for linear functions
    CHECK_THAT(d.d_iso1, WithinAbs(0.63, 1e-9));
    CHECK_THAT(d.d_iso2, WithinAbs(0.39, 1e-9));

    EnergyModel constant;
    constant.program = make_program({ "add", "const", "mul", "const", "const" }, { 2.0, 0.0, 1.0 },
                                    2);
    auto dc = fd_energy_derivatives(constant, s);
    REQUIRE(dc.valid);
    CHECK_THAT(dc.d_iso1, WithinAbs(0.0, 1e-10));
    CHECK_THAT(dc.d_iso2, WithinAbs(0.0, 1e-10));
}

TEST_CASE("fd derivative of I1^2 at I1=3 is 6 to truncation order") {
    EnergyModel quad;
    quad.program = make_program({ "n2", "x1" }, {}, 2);
    double inputs[2] = { 3.0, 3.0 };
    auto d = fd_energy_derivatives_at(quad, inputs);
    REQUIRE(d.valid);
    CHECK_THAT(d.d_iso1, WithinRel(6.0, 1e-8));

    // cubic polynomial: derivative of x^3 is 3 x^2, FD error O(h^2)
    EnergyModel cubic;
    cubic.program = make_program({ "mul", "x1", "n2", "x1" }, {}, 2);
    auto d3 = fd_energy_derivatives_at(cubic, inputs);
    REQUIRE(d3.valid);
    CHECK_THAT(d3.d_iso1, WithinRel(27.0, 1e-6));

    // invalid stencil: log(x - 3) straddles the domain edge at x = 3
    EnergyModel logm;
    logm.program = make_program({ "log", "sub", "x1", "const" }, { 3.0 }, 2);
    auto dl = fd_energy_derivatives_at(logm, inputs);
    CHECK_FALSE(dl.valid);
}

TEST_CASE("pk1_incompressible reproduces the closed-form Mooney-Rivlin oracle") {
    auto model = case1_model();
    auto gmr = gmr_case(1);

    auto ut = pk1_incompressible(model, deformation_state(LoadingCase::UT, 2.0));
    REQUIRE(ut.valid);
    CHECK_THAT(ut.P11, WithinRel(2.8875, 1e-9));

    auto ebt = pk1_incompressible(model, deformation_state(LoadingCase::EBT, 2.0));
    REQUIRE(ebt.valid);
    CHECK_THAT(ebt.P11, WithinRel(8.623125, 1e-9));

    auto ref = pk1_incompressible(model, deformation_state(LoadingCase::UT, 1.0));
    REQUIRE(ref.valid);
    CHECK_THAT(ref.P11, WithinAbs(0.0, 1e-8));

    // full sweep over all three constant sets, loadings and stretches
    for (int c = 1; c <= 3; ++c) {
        auto mat = gmr_case(c);
        EnergyModel m;
        // sum_i ci0 (I1-3)^i + c0i (I2-3)^i as add((T1+T2), ((T3+T4)+(T5+T6)))
        m.program = make_program(
            { "add",
              "add", "mul", "const", "sub", "x1", "const",                        // c10 (I1-3)
              "mul", "const", "n2", "sub", "x1", "const",                          // c20 (I1-3)^2
              "add",
              "add", "mul", "const", "sub", "x2", "const",                        // c01 (I2-3)
              "mul", "const", "n2", "sub", "x2", "const",                          // c02 (I2-3)^2
              "add", "mul", "const", "mul", "sub", "x1", "const", "n2", "sub", "x1", "const",
              "mul", "const", "mul", "sub", "x2", "const", "n2", "sub", "x2", "const" },
            { mat.ci0[0], 3.0, mat.ci0[1], 3.0, mat.c0i[0], 3.0, mat.c0i[1], 3.0,
              mat.ci0[2], 3.0, 3.0, mat.c0i[2], 3.0, 3.0 });
        REQUIRE(m.program.valid());
        for (LoadingCase lc : { LoadingCase::UT, LoadingCase::PS, LoadingCase::EBT }) {
            for (double lam : { 1.0, 1.25, 1.5, 2.0, 2.5 }) {
                auto s = deformation_state(lc, lam);
                auto p = pk1_incompressible(m, s);
                const double expect = gmr_p11(mat, lc, lam);
                REQUIRE(p.valid);
                if (lam == 1.0)
                    CHECK_THAT(p.P11, WithinAbs(0.0, 1e-8));
                else
                    CHECK_THAT(p.P11, WithinRel(expect, 1e-5));
            }
        }
    }
    (void)gmr;
}

TEST_CASE("nearly incompressible stress: stress-free state and volumetric limits") {
    auto model = case1_vol_model(50.0);

    auto p1 = pk1_nearly_incompressible(model, LoadingCase::UT, 1.0);
    REQUIRE(p1.valid);
    CHECK_THAT(p1.P11, WithinAbs(0.0, 1e-8));
    CHECK_THAT(p1.lateral, WithinAbs(1.0, 1e-10));

    // Miehe volumetric derivative vanishes at J = 1
    VolumetricEnergy miehe{ VolumetricKind::miehe, 65.0 };
    CHECK_THAT(miehe.dpsi_dJ(1.0), WithinAbs(0.0, 1e-14));

    // penalty limit: kappa -> inf recovers the incompressible response
    const double p_inc = 2.8875;
    double previous_gap = 1e300;
    for (double kappa : { 1e3, 1e4, 1e6 }) {
        auto m = case1_vol_model(kappa);
        auto p = pk1_nearly_incompressible(m, LoadingCase::UT, 2.0);
        REQUIRE(p.valid);
        const double gap = std::fabs(p.P11 - p_inc);
        CHECK(gap < previous_gap);
        previous_gap = gap;
        if (kappa == 1e6) CHECK_THAT(p.P11, WithinRel(p_inc, 1e-3));
    }
}

TEST_CASE("finite-difference route agrees with the analytic split material") {
    SplitMaterial analytic{ gmr_case(1), VolumetricEnergy{ VolumetricKind::quadratic, 50.0 } };
    auto model = case1_vol_model(50.0);
    for (LoadingCase lc : { LoadingCase::UT, LoadingCase::PS, LoadingCase::EBT }) {
        for (double lam : { 1.1, 1.5, 2.0, 2.5 }) {
            auto via_fd = pk1_nearly_incompressible(model, lc, lam);
            auto via_analytic = analytic.p11(lc, lam);
            REQUIRE(via_fd.valid);
            REQUIRE(via_analytic.valid);
            CHECK_THAT(via_fd.P11, WithinRel(via_analytic.P11, 1e-6));
            CHECK_THAT(via_fd.lateral, WithinRel(via_analytic.lateral, 1e-6));
        }
    }
}

TEST_CASE("shift_energy zeroes the reference state") {
    auto m = shift_energy(case1_model(0.83));
    CHECK_THAT(m.shift, WithinAbs(3.89, 1e-12));
    auto [v, ok] = energy_value(m, deformation_state(LoadingCase::UT, 1.0));
    REQUIRE(ok);
    CHECK_THAT(v, WithinAbs(0.0, 1e-8));

    EnergyModel normalized;
    normalized.program =
        make_program({ "add", "mul", "const", "sub", "x1", "const", "mul", "const", "sub", "x2",
                       "const" },
                     { 0.63, 3.0, 0.39, 3.0 });
    auto n = shift_energy(normalized);
    CHECK_THAT(n.shift, WithinAbs(0.0, 1e-12));

    // temperature-dependent shift re-evaluates per point (T~ = 0.4 at 20 C)
    EnergyModel temp;
    temp.program = make_program({ "mul", "x3", "add", "x1", "x2" }, {});
    temp.layout = { EnergyInput::Iso1, EnergyInput::Iso2, EnergyInput::T };
    auto shifted = shift_energy(temp, 0.4);
    CHECK(shifted.shift_per_temperature);
    DeformationState ref = deformation_state(LoadingCase::UT, 1.0);
    ref.temperature_scaled = 0.4;
    auto [tv, tok] = energy_value(shifted, ref);
    REQUIRE(tok);
    CHECK_THAT(tv, WithinAbs(0.0, 1e-12));
}

TEST_CASE("accumulate_psi_max tracks the loading history maximum") {
    auto model = shift_energy(case1_model());

    // monotone primary loading: psi_max equals psi everywhere
    std::vector<DeformationState> primary;
    for (double lam = 1.0; lam <= 1.5 + 1e-9; lam += 0.05)
        primary.push_back(deformation_state(LoadingCase::UT, lam));
    auto hist = accumulate_psi_max(model, primary);
    for (std::size_t i = 0; i < hist.size(); ++i) {
        REQUIRE(hist[i].valid);
        CHECK(hist[i].psi_max == hist[i].psi);
    }

    // load to 1.5, unload to 1.0: maximum frozen at the turning point
    std::vector<DeformationState> cycle = primary;
    for (double lam = 1.45; lam >= 1.0 - 1e-9; lam -= 0.05)
        cycle.push_back(deformation_state(LoadingCase::UT, lam));
    auto h2 = accumulate_psi_max(model, cycle);
    const double peak = h2[primary.size() - 1].psi;
    for (std::size_t i = primary.size(); i < h2.size(); ++i) {
        CHECK_THAT(h2[i].psi_max, WithinRel(peak, 1e-14));
        CHECK(h2[i].psi <= h2[i].psi_max + 1e-12);
    }

    // two-amplitude cycle: the running max steps through the hand trace
    std::vector<double> lams = { 1.0, 1.1, 1.2, 1.1, 1.0, 1.1, 1.2, 1.3, 1.4, 1.3 };
    std::vector<DeformationState> path;
    for (double l : lams) path.push_back(deformation_state(LoadingCase::UT, l));
    auto h3 = accumulate_psi_max(model, path);
    auto psi_at = [&](double l) {
        auto s = deformation_state(LoadingCase::UT, l);
        return energy_value(model, s).first;
    };
    CHECK_THAT(h3[3].psi_max, WithinRel(psi_at(1.2), 1e-14));  // frozen on unloading
    CHECK_THAT(h3[5].psi_max, WithinRel(psi_at(1.2), 1e-14));  // still below old peak
    CHECK_THAT(h3[8].psi_max, WithinRel(psi_at(1.4), 1e-14));  // new peak reached
    CHECK_THAT(h3[9].psi_max, WithinRel(psi_at(1.4), 1e-14));
}

TEST_CASE("apply_damage follows the Ogden-Roxburgh oracle") {
    OgdenRoxburghEta oracle{ 1.2, 0.5, 2.0 };

    // primary curve is undamaged: erf(0) = 0
    CHECK_THAT(oracle.eta(3.7, 3.7), WithinAbs(1.0, 1e-15));

    // derived oracle value at psi=0, psi_max=5
    const double expect = 1.0 - (1.0 / 1.2) * std::erf(5.0 / 4.5);
    CHECK_THAT(oracle.eta(0.0, 5.0), WithinAbs(0.26341811998379055, 1e-12));
    CHECK_THAT(oracle.eta(0.0, 5.0), WithinAbs(expect, 1e-15));

    // damage bound: eta in (1 - 1/r, 1] for psi <= psi_max
    for (double pm = 0.1; pm < 40.0; pm *= 1.7)
        for (double frac = 0.0; frac <= 1.0 + 1e-12; frac += 0.1) {
            const double eta = oracle.eta(frac * pm, pm);
            CHECK(eta > 1.0 - 1.0 / 1.2);
            CHECK(eta <= 1.0 + 1e-15);
        }

    // eta encoded as a program drives apply_damage
    DamageModel dmg;
    dmg.program = make_program({ "sub", "const", "mul", "const", "erf", "div", "sub", "x2", "x1",
                                 "add", "const", "mul", "const", "x2" },
                               { 1.0, 1.0 / 1.2, 2.0, 0.5 });
    auto [p, ok] = apply_damage(dmg, 0.0, 5.0, 10.0);
    REQUIRE(ok);
    CHECK_THAT(p, WithinRel(10.0 * expect, 1e-12));

    DamageModel unity;
    unity.program = make_program({ "add", "const", "mul", "const", "sub", "x1", "x2" },
                                 { 1.0, 0.0 });
    auto [pu, oku] = apply_damage(unity, 1.0, 2.0, 7.5);
    REQUIRE(oku);
    CHECK_THAT(pu, WithinRel(7.5, 1e-14));
}
