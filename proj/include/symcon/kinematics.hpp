#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace symcon {

enum class LoadingCase { UT, PS, EBT };

inline const char* to_string(LoadingCase c) {
    switch (c) {
        case LoadingCase::UT: return "UT";
        case LoadingCase::PS: return "PS";
        case LoadingCase::EBT: return "EBT";
    }
    return "?";
}

inline LoadingCase loading_case_from_string(const std::string& s) {
    if (s == "UT") return LoadingCase::UT;
    if (s == "PS") return LoadingCase::PS;
    if (s == "EBT") return LoadingCase::EBT;
    throw std::invalid_argument("unknown loading case: " + s);
}

/// Homogeneous deformation state with a diagonal deformation gradient.
/// Carries both the principal invariants of C and the isochoric set.
struct DeformationState {
    LoadingCase loading = LoadingCase::UT;
    double stretch = 1.0;                      // axial principal stretch
    std::array<double, 3> F = { 1.0, 1.0, 1.0 };  // diag of the deformation gradient
    double I1 = 3.0, I2 = 3.0, I3 = 1.0;       // invariants of C = F^T F
    double J = 1.0;
    double I1_bar = 3.0, I2_bar = 3.0;         // isochoric invariants
    std::optional<double> temperature_scaled;  // T~ = T/300 + 1/3 when present
};

/// Invariants from a diagonal deformation gradient.
inline void fill_invariants(DeformationState& s) {
    const double a = s.F[0] * s.F[0];
    const double b = s.F[1] * s.F[1];
    const double c = s.F[2] * s.F[2];
    s.I1 = a + b + c;
    s.I2 = a * b + a * c + b * c;
    s.I3 = a * b * c;
    s.J = s.F[0] * s.F[1] * s.F[2];
    const double j23 = std::pow(s.J, -2.0 / 3.0);
    s.I1_bar = j23 * s.I1;
    s.I2_bar = j23 * j23 * s.I2;
}

/// Incompressible kinematics for the three homogeneous loading cases:
/// UT diag(l, 1/sqrt(l), 1/sqrt(l)); PS diag(l, 1, 1/l); EBT diag(l, l, 1/l^2).
inline DeformationState deformation_state(LoadingCase loading, double stretch) {
    if (!(stretch > 0.0)) throw std::invalid_argument("deformation_state: stretch must be > 0");
    DeformationState s;
    s.loading = loading;
    s.stretch = stretch;
    switch (loading) {
        case LoadingCase::UT:
            s.F = { stretch, 1.0 / std::sqrt(stretch), 1.0 / std::sqrt(stretch) };
            break;
        case LoadingCase::PS:
            s.F = { stretch, 1.0, 1.0 / stretch };
            break;
        case LoadingCase::EBT:
            s.F = { stretch, stretch, 1.0 / (stretch * stretch) };
            break;
    }
    fill_invariants(s);
    return s;
}

/// State for the nearly incompressible regime: the lateral stretch comes from
/// a traction-free root solve rather than the incompressibility constraint.
inline DeformationState compressible_state(LoadingCase loading, double stretch,
                                           double lateral) {
    DeformationState s;
    s.loading = loading;
    s.stretch = stretch;
    switch (loading) {
        case LoadingCase::UT:  s.F = { stretch, lateral, lateral }; break;
        case LoadingCase::PS:  s.F = { stretch, 1.0, lateral }; break;
        case LoadingCase::EBT: s.F = { stretch, stretch, lateral }; break;
    }
    fill_invariants(s);
    return s;
}

/// Index of the traction-free lateral direction (zero-stress condition).
inline int lateral_axis(LoadingCase loading) {
    return loading == LoadingCase::UT ? 1 : 2;
}

}  // namespace symcon
