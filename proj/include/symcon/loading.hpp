#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcon/kinematics.hpp"

namespace symcon {

enum class Branch { primary, unloading, reloading };
enum class SplitTag { train, test_interp, test_extrap };

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::primary: return "primary";
        case Branch::unloading: return "unloading";
        case Branch::reloading: return "reloading";
    }
    return "?";
}

inline Branch branch_from_string(const std::string& s) {
    if (s == "primary") return Branch::primary;
    if (s == "unloading") return Branch::unloading;
    if (s == "reloading") return Branch::reloading;
    throw std::invalid_argument("unknown branch: " + s);
}

inline const char* to_string(SplitTag t) {
    switch (t) {
        case SplitTag::train: return "train";
        case SplitTag::test_interp: return "test-interp";
        case SplitTag::test_extrap: return "test-extrap";
    }
    return "?";
}

/// One stress-strain observation. Points belonging to one loading case are
/// kept in load-history order so the energy maximum can be accumulated.
struct LoadingPoint {
    LoadingCase loading = LoadingCase::UT;
    double stretch = 1.0;
    double stress = 0.0;  // P11, MPa
    int cycle = 0;        // 0 = primary (virgin) data
    Branch branch = Branch::primary;
    std::optional<double> temperature_c;
    SplitTag split = SplitTag::train;

    double strain() const { return stretch - 1.0; }
    std::optional<double> t_scaled() const {
        if (!temperature_c) return std::nullopt;
        return temperature_c.value() / 300.0 + 1.0 / 3.0;
    }
};

}  // namespace symcon
