#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "symcon/loading.hpp"
#include "symcon/materials.hpp"

namespace symcon {

constexpr std::array<LoadingCase, 3> kAllCases = { LoadingCase::UT, LoadingCase::PS,
                                                   LoadingCase::EBT };

/// Description of one synthetic benchmark data set.
struct BenchmarkSpec {
    std::string id;
    GeneralizedMooneyRivlin gmr;
    std::optional<VolumetricEnergy> volumetric;  // set => nearly incompressible
    std::optional<OgdenRoxburghEta> damage;      // set => cyclic data available
    int points_per_case = 50;
    double strain_max = 1.5;
    double train_band = 1.0;  // strains above this are extrapolation points
    std::vector<double> cycle_amplitudes = { 0.3, 0.5, 1.0, 1.25, 1.5 };
    int points_per_branch = 25;
    double split_fraction = 0.8;
};

inline BenchmarkSpec benchmark_spec(const std::string& id) {
    BenchmarkSpec s;
    s.id = id;
    if (id == "gmr-case1") {
        s.gmr = gmr_case(1);
    } else if (id == "gmr-case2") {
        s.gmr = gmr_case(2);
    } else if (id == "gmr-case3") {
        s.gmr = gmr_case(3);
    } else if (id == "gmr-case1-vol1") {
        s.gmr = gmr_case(1);
        s.volumetric = VolumetricEnergy{ VolumetricKind::quadratic, 50.0 };
    } else if (id == "gmr-case1-vol2") {
        s.gmr = gmr_case(1);
        s.volumetric = VolumetricEnergy{ VolumetricKind::miehe, 65.0 };
    } else if (id == "gmr-case1-or") {
        s.gmr = gmr_case(1);
        s.damage = OgdenRoxburghEta{ 1.2, 0.5, 2.0 };
    } else {
        throw std::invalid_argument("unknown benchmark id: " + id);
    }
    return s;
}

inline std::vector<std::string> known_benchmarks() {
    return { "gmr-case1", "gmr-case2", "gmr-case3", "gmr-case1-vol1", "gmr-case1-vol2",
             "gmr-case1-or", "temperature-standin" };
}

/// Virgin-curve axial stress of the generating material.
inline double benchmark_p11(const BenchmarkSpec& spec, LoadingCase loading, double stretch) {
    if (spec.volumetric) {
        SplitMaterial mat{ spec.gmr, *spec.volumetric };
        StressPrediction p = mat.p11(loading, stretch);
        if (!p.valid) throw std::runtime_error("benchmark oracle: lateral solve failed");
        return p.P11;
    }
    return gmr_p11(spec.gmr, loading, stretch);
}

/// Seeded 80/20 split within the training strain band, applied per loading
/// case. The undeformed anchor stays in the training set and the
/// extrapolation band is left untouched.
inline void split_train_test(std::vector<LoadingPoint>& points, double fraction,
                             std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split fraction must lie in (0, 1)");
    std::map<int, std::vector<std::size_t>> band;  // case index -> candidate rows
    std::map<int, std::size_t> band_size;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& p = points[i];
        if (p.split == SplitTag::test_extrap) continue;
        if (p.strain() > 1.0 + 1e-12) {
            p.split = SplitTag::test_extrap;
            continue;
        }
        p.split = SplitTag::train;
        ++band_size[static_cast<int>(p.loading)];
        const bool anchor = p.stretch == 1.0 && p.cycle == 0 && p.branch == Branch::primary;
        if (!anchor) band[static_cast<int>(p.loading)].push_back(i);
    }
    for (auto& [case_idx, rows] : band) {
        if (band_size[case_idx] < 2)
            throw std::runtime_error("split_train_test: too few points in the split band");
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (case_idx + 1)));
        std::shuffle(rows.begin(), rows.end(), rng);
        const std::size_t n = rows.size();
        const std::size_t n_train = static_cast<std::size_t>(std::floor(fraction * n));
        for (std::size_t k = n_train; k < n; ++k) points[rows[k]].split = SplitTag::test_interp;
    }
}

/// 50 stretches per loading case, equally spaced in engineering strain over
/// [0, 1.5], stress from the analytic material. The (stretch 1, stress 0)
/// point is the first grid point of every case.
inline std::vector<LoadingPoint> generate_primary(const BenchmarkSpec& spec,
                                                  std::uint64_t seed = 0) {
    std::vector<LoadingPoint> out;
    const int n = spec.points_per_case;
    for (LoadingCase c : kAllCases) {
        for (int i = 0; i < n; ++i) {
            LoadingPoint p;
            p.loading = c;
            p.stretch = 1.0 + spec.strain_max * i / (n - 1.0);
            p.stress = i == 0 ? 0.0 : benchmark_p11(spec, c, p.stretch);
            p.cycle = 0;
            p.branch = Branch::primary;
            out.push_back(p);
        }
    }
    split_train_test(out, spec.split_fraction, seed);
    return out;
}

/// Cyclic loading with step-wise increasing amplitude; stress softened by
/// the Ogden-Roxburgh oracle with the energy maximum tracked along the
/// path. Unloading branches of the cycles inside the training band carry
/// the train/test-interp split; the larger cycles are extrapolation data.
inline std::vector<LoadingPoint> generate_cyclic(const BenchmarkSpec& spec,
                                                 std::uint64_t seed = 0) {
    if (!spec.damage) throw std::invalid_argument("generate_cyclic: spec has no damage oracle");
    if (spec.volumetric)
        throw std::invalid_argument("generate_cyclic: cyclic benchmark is incompressible");
    const OgdenRoxburghEta& dmg = *spec.damage;
    std::vector<LoadingPoint> out;

    for (LoadingCase c : kAllCases) {
        double psi_max = 0.0;
        int cycle_id = 0;
        for (double amp : spec.cycle_amplitudes) {
            ++cycle_id;
            const bool extrap_cycle = amp > spec.train_band + 1e-12;
            const int nb = spec.points_per_branch;
            // loading branch: virgin beyond the previous amplitude, reloading below
            for (int i = 0; i < nb; ++i) {
                const double lam = 1.0 + amp * i / (nb - 1.0);
                DeformationState s = deformation_state(c, lam);
                const double psi = spec.gmr.psi(s.I1, s.I2);
                const bool virgin = psi >= psi_max - 1e-14;
                psi_max = std::max(psi_max, psi);
                LoadingPoint p;
                p.loading = c;
                p.stretch = lam;
                p.cycle = cycle_id;
                p.branch = virgin ? Branch::primary : Branch::reloading;
                p.stress = dmg.eta(psi, psi_max) * gmr_p11(spec.gmr, c, lam);
                p.split = extrap_cycle ? SplitTag::test_extrap : SplitTag::test_interp;
                out.push_back(p);
            }
            // unloading branch back to the undeformed state
            for (int i = 0; i < nb; ++i) {
                const double lam = 1.0 + amp * (nb - 1.0 - i) / (nb - 1.0);
                DeformationState s = deformation_state(c, lam);
                const double psi = spec.gmr.psi(s.I1, s.I2);
                LoadingPoint p;
                p.loading = c;
                p.stretch = lam;
                p.cycle = cycle_id;
                p.branch = Branch::unloading;
                p.stress = dmg.eta(psi, psi_max) * gmr_p11(spec.gmr, c, lam);
                p.split = extrap_cycle ? SplitTag::test_extrap : SplitTag::train;
                out.push_back(p);
            }
        }
    }

    // 80/20 split over the training-band unloading branches, per case
    std::map<int, std::vector<std::size_t>> candidates;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].split == SplitTag::train)
            candidates[static_cast<int>(out[i].loading)].push_back(i);
    for (auto& [case_idx, rows] : candidates) {
        std::mt19937_64 rng(seed ^ (0xbf58476d1ce4e5b9ull * (case_idx + 1)));
        std::shuffle(rows.begin(), rows.end(), rng);
        const std::size_t n_train =
            static_cast<std::size_t>(std::floor(spec.split_fraction * rows.size()));
        for (std::size_t k = n_train; k < rows.size(); ++k)
            out[rows[k]].split = SplitTag::test_interp;
    }
    return out;
}

/// Synthetic temperature-dependent stand-in with the shape of the cited
/// experimental protocol: 120 uniaxial points across six temperatures, one
/// loading-unloading cycle each. Never a claim of being the measurement.
inline std::vector<LoadingPoint> generate_temperature_standin(
    const TemperatureStandinMaterial& mat = {}) {
    const std::vector<double> temps = { -40.0, -20.0, 20.0, 60.0, 100.0, 150.0 };
    const std::vector<double> train_primary = { -40.0, 20.0, 100.0, 150.0 };
    constexpr int n_primary = 12;
    constexpr int n_unload = 8;
    constexpr double amp = 1.0;

    std::vector<LoadingPoint> out;
    for (double T : temps) {
        const double ts = scaled_temperature(T);
        const bool primary_train =
            std::find(train_primary.begin(), train_primary.end(), T) != train_primary.end();
        const double psi_peak = [&] {
            DeformationState s = deformation_state(LoadingCase::UT, 1.0 + amp);
            return mat.psi(s.I1, s.I2, ts);
        }();
        for (int i = 0; i < n_primary; ++i) {
            LoadingPoint p;
            p.loading = LoadingCase::UT;
            p.stretch = 1.0 + amp * i / (n_primary - 1.0);
            p.stress = i == 0 ? 0.0 : mat.p11(LoadingCase::UT, p.stretch, ts);
            p.cycle = 0;
            p.branch = Branch::primary;
            p.temperature_c = T;
            p.split = primary_train ? SplitTag::train : SplitTag::test_interp;
            out.push_back(p);
        }
        for (int i = 0; i < n_unload; ++i) {
            LoadingPoint p;
            p.loading = LoadingCase::UT;
            p.stretch = 1.0 + amp * (n_unload - 1.0 - i) / (n_unload - 1.0);
            DeformationState s = deformation_state(LoadingCase::UT, p.stretch);
            const double psi = mat.psi(s.I1, s.I2, ts);
            p.stress = mat.damage.eta(psi, psi_peak) *
                       mat.p11(LoadingCase::UT, p.stretch, ts);
            p.cycle = 1;
            p.branch = Branch::unloading;
            p.temperature_c = T;
            p.split = T == 20.0 ? SplitTag::train : SplitTag::test_extrap;
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace symcon
