#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "symcon/energy.hpp"
#include "symcon/kinematics.hpp"
#include "symcon/stress.hpp"

namespace symcon {

/// Generalized Mooney-Rivlin strain energy
///   psi = sum_i [ ci0 (I1 - 3)^i + c0i (I2 - 3)^i ],  i = 1..3.
struct GeneralizedMooneyRivlin {
    std::array<double, 3> ci0 = { 0.0, 0.0, 0.0 };
    std::array<double, 3> c0i = { 0.0, 0.0, 0.0 };

    double psi(double i1, double i2) const {
        double a = i1 - 3.0, b = i2 - 3.0, out = 0.0, pa = 1.0, pb = 1.0;
        for (int i = 0; i < 3; ++i) {
            pa *= a;
            pb *= b;
            out += ci0[i] * pa + c0i[i] * pb;
        }
        return out;
    }
    double dpsi_d1(double i1) const {
        double a = i1 - 3.0;
        return ci0[0] + 2.0 * ci0[1] * a + 3.0 * ci0[2] * a * a;
    }
    double dpsi_d2(double i2) const {
        double b = i2 - 3.0;
        return c0i[0] + 2.0 * c0i[1] * b + 3.0 * c0i[2] * b * b;
    }
};

/// Material constant sets of the benchmark cases, in MPa.
inline GeneralizedMooneyRivlin gmr_case(int c) {
    switch (c) {
        case 1: return { { 0.63, 0.0, 0.0 }, { 0.39, 0.0, 0.0 } };
        case 2: return { { 0.95, 0.66, 0.0 }, { 0.51, 0.62, 0.0 } };
        case 3: return { { 0.73, 0.43, 0.10 }, { 0.99, 0.97, 0.32 } };
    }
    throw std::invalid_argument("gmr_case: case must be 1, 2 or 3");
}

/// Closed-form incompressible axial stress for an arbitrary psi(I1, I2),
/// the independent oracle the finite-difference route is checked against:
///   UT : 2 (l - l^-2) (psi_1 + psi_2 / l)
///   PS : 2 (l - l^-3) (psi_1 + psi_2)
///   EBT: 2 (l - l^-5) (psi_1 + l^2 psi_2)
inline double closed_form_p11(LoadingCase loading, double stretch, double psi1, double psi2) {
    const double l = stretch;
    switch (loading) {
        case LoadingCase::UT:
            return 2.0 * (l - 1.0 / (l * l)) * (psi1 + psi2 / l);
        case LoadingCase::PS:
            return 2.0 * (l - 1.0 / (l * l * l)) * (psi1 + psi2);
        case LoadingCase::EBT:
            return 2.0 * (l - 1.0 / std::pow(l, 5)) * (psi1 + l * l * psi2);
    }
    return 0.0;
}

inline double gmr_p11(const GeneralizedMooneyRivlin& m, LoadingCase loading, double stretch) {
    DeformationState s = deformation_state(loading, stretch);
    return closed_form_p11(loading, stretch, m.dpsi_d1(s.I1), m.dpsi_d2(s.I2));
}

/// Volumetric strain energies: a quadratic penalty and the Miehe form.
enum class VolumetricKind { quadratic, miehe };

struct VolumetricEnergy {
    VolumetricKind kind = VolumetricKind::quadratic;
    double kappa = 50.0;

    double psi(double J) const {
        return kind == VolumetricKind::quadratic ? 0.5 * kappa * (J - 1.0) * (J - 1.0)
                                                 : kappa * (J - std::log(J) - 1.0);
    }
    double dpsi_dJ(double J) const {
        return kind == VolumetricKind::quadratic ? kappa * (J - 1.0) : kappa * (1.0 - 1.0 / J);
    }
};

/// Analytic derivative provider for an isochoric gMR + volumetric split;
/// generates the nearly incompressible benchmark data.
struct SplitMaterial {
    GeneralizedMooneyRivlin iso;
    VolumetricEnergy vol;

    EnergyDerivatives operator()(const DeformationState& s) const {
        EnergyDerivatives d;
        d.d_iso1 = iso.dpsi_d1(s.I1_bar);
        d.d_iso2 = iso.dpsi_d2(s.I2_bar);
        d.d_J = vol.dpsi_dJ(s.J);
        d.valid = true;
        return d;
    }

    StressPrediction p11(LoadingCase loading, double stretch) const {
        return pk1_nearly_incompressible_with(*this, loading, stretch);
    }
};

/// Ogden-Roxburgh damage variable
///   eta = 1 - (1/r) erf( (psi_max - psi) / (m + beta psi_max) ).
struct OgdenRoxburghEta {
    double r = 1.2;
    double beta = 0.5;
    double m = 2.0;

    double eta(double psi, double psi_max) const {
        return 1.0 - (1.0 / r) * std::erf((psi_max - psi) / (m + beta * psi_max));
    }
};

/// Synthetic temperature-dependent material for the CI stand-in data set:
/// a Mooney-Rivlin pair whose moduli decay linearly in the scaled
/// temperature, plus an Ogden-Roxburgh softening law.
struct TemperatureStandinMaterial {
    // psi = (a0 + a1 Ts)(I1 - 3) + (b0 + b1 Ts)(I2 - 3)
    double a0 = 0.8, a1 = -0.5;
    double b0 = 0.4, b1 = -0.25;
    OgdenRoxburghEta damage{ 1.25, 0.4, 1.5 };

    double coeff1(double t_scaled) const { return a0 + a1 * t_scaled; }
    double coeff2(double t_scaled) const { return b0 + b1 * t_scaled; }
    double psi(double i1, double i2, double t_scaled) const {
        return coeff1(t_scaled) * (i1 - 3.0) + coeff2(t_scaled) * (i2 - 3.0);
    }
    double p11(LoadingCase loading, double stretch, double t_scaled) const {
        return closed_form_p11(loading, stretch, coeff1(t_scaled), coeff2(t_scaled));
    }
};

/// T~ = T/300 + 1/3, mapping [-100 C, 200 C] onto [0, 1].
inline double scaled_temperature(double celsius) {
    return celsius / 300.0 + 1.0 / 3.0;
}

}  // namespace symcon
