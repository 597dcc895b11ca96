#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "symcon/pipeline.hpp"
#include "symcon/report.hpp"

using namespace symcon;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EnergyModel case1_energy(double c = 0.83) {
    EnergyModel m;
    m.program = make_program({ "add", "add", "mul", "const", "x1", "mul", "const", "x2", "const" },
                             { 0.63, 0.39, c });
    return shift_energy(m);
}

GradientFn gmr_gradients(int c) {
    auto mat = gmr_case(c);
    return [mat](const std::vector<double>& x) {
        return std::vector<double>{ mat.dpsi_d1(x[0]), mat.dpsi_d2(x[1]) };
    };
}

}  // namespace

TEST_CASE("r_squared agrees with a hand-rolled five-point oracle") {
    std::vector<double> pred = { 1.0, 2.0, 3.0, 4.0, 5.0 };
    std::vector<double> y = { 1.1, 1.9, 3.2, 3.9, 5.1 };
    // hand computation: mean 3.04, ss_tot and ss_res spelled out
    double mean = (1.1 + 1.9 + 3.2 + 3.9 + 5.1) / 5.0;
    double ss_tot = 0.0, ss_res = 0.0;
    for (int i = 0; i < 5; ++i) {
        ss_tot += (y[i] - mean) * (y[i] - mean);
        ss_res += (y[i] - pred[i]) * (y[i] - pred[i]);
    }
    CHECK_THAT(r_squared(pred, y), WithinRel(1.0 - ss_res / ss_tot, 1e-14));
    CHECK_THAT(r_squared(y, y), WithinAbs(1.0, 1e-14));
}

TEST_CASE("r2_by_group pools cases and splits") {
    auto spec = benchmark_spec("gmr-case1");
    auto pts = generate_primary(spec, 3);
    auto energy = case1_energy();
    std::vector<double> pred(pts.size());
    std::vector<char> valid(pts.size(), 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto p = pk1_incompressible(energy, deformation_state(pts[i].loading, pts[i].stretch));
        pred[i] = p.P11;
        valid[i] = p.valid;
    }
    auto r2 = r2_by_group(pts, pred, valid);
    // exact model: R2 = 1 pooled implies R2 = 1 on each case and split
    for (const char* key : { "pooled/all", "pooled/train", "pooled/test-interp",
                             "pooled/test-extrap", "UT/train", "PS/test-extrap",
                             "EBT/test-interp" }) {
        REQUIRE(r2.count(key) == 1);
        CHECK_THAT(r2.at(key), WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("check_recovery accepts the recovered case-1 model") {
    auto spec = benchmark_spec("gmr-case1");
    auto pts = generate_primary(spec, 3);
    auto train = select_split(primary_rows(pts), SplitTag::train);
    auto model = case1_energy(0.83);
    ProbeRegion region = training_probe_region(train, model);

    CHECK(check_recovery(model, gmr_gradients(1), region));
    // additive constants are irrelevant
    CHECK(check_recovery(case1_energy(-2.0), gmr_gradients(1), region));
    // a structurally different gradient field is rejected
    CHECK_FALSE(check_recovery(model, gmr_gradients(3), region));
    // candidate identical to the target
    CHECK(check_recovery(model, gmr_gradients(1), region));
}

TEST_CASE("check_recovery is symmetric on its TRUE examples") {
    auto spec = benchmark_spec("gmr-case1");
    auto pts = generate_primary(spec, 3);
    auto train = select_split(primary_rows(pts), SplitTag::train);
    auto a = case1_energy(0.83);
    auto b = case1_energy(0.0);
    ProbeRegion region = training_probe_region(train, a);

    auto fd_gradients = [](const EnergyModel& m) {
        return GradientFn([m](const std::vector<double>& x) {
            auto d = fd_energy_derivatives_at(m, x.data());
            return std::vector<double>{ d.d_iso1, d.d_iso2 };
        });
    };
    CHECK(check_recovery(a, fd_gradients(b), region));
    CHECK(check_recovery(b, fd_gradients(a), region));
}

TEST_CASE("damage recovery check needs erf, unit eta at the peak and fit quality") {
    DamageModel or_eta;
    or_eta.program = make_program({ "sub", "const", "mul", "const", "erf", "div", "sub", "x2",
                                    "x1", "add", "const", "mul", "const", "x2" },
                                  { 1.0, 1.0 / 1.2, 2.0, 0.5 });
    EnergyHistory h;
    for (int i = 0; i < 10; ++i) {
        h.psi.push_back(0.3 * i);
        h.psi_max.push_back(3.0);
        h.p0.push_back(1.0);
        h.valid.push_back(1);
    }
    std::map<std::string, double> good{ { "pooled/train", 0.9999 } };
    CHECK(damage_recovery_check(or_eta, h, good));

    std::map<std::string, double> poor{ { "pooled/train", 0.5 } };
    CHECK_FALSE(damage_recovery_check(or_eta, h, poor));

    DamageModel no_erf;
    no_erf.program = make_program({ "add", "const", "mul", "const", "sub", "x1", "x2" },
                                  { 1.0, 0.1 });
    CHECK_FALSE(damage_recovery_check(no_erf, h, good));

    DamageModel biased;  // eta(psi_max, psi_max) = 0.9, violates the peak condition
    biased.program = make_program({ "sub", "const", "mul", "const", "erf", "sub", "x2", "x1" },
                                  { 0.9, 0.5 });
    CHECK_FALSE(damage_recovery_check(biased, h, good));
}

TEST_CASE("assemble_data applies the default split protocol to csv input") {
    auto spec = benchmark_spec("gmr-case1-or");
    auto pts = generate_primary(spec, 3);
    auto cyc = generate_cyclic(spec, 3);
    pts.insert(pts.end(), cyc.begin(), cyc.end());
    const auto path = std::filesystem::temp_directory_path() / "pipe_data.csv";
    write_loading_csv(pts, path.string());

    RunConfig cfg;
    cfg.data_csv = path.string();
    cfg.base_seed = 5;
    auto data = assemble_data(cfg);
    REQUIRE(data.size() == pts.size());
    int train_primary = 0, train_cyclic = 0;
    for (const auto& p : data) {
        if (p.split != SplitTag::train) continue;
        if (p.cycle == 0) ++train_primary;
        else {
            CHECK(p.branch == Branch::unloading);
            CHECK(p.strain() <= 1.0 + 1e-12);
            ++train_cyclic;
        }
    }
    CHECK(train_primary == 3 * 26);
    CHECK(train_cyclic > 0);
    std::filesystem::remove(path);
}

TEST_CASE("discover + emit_report produce a reproducible run record") {
    RunConfig cfg;
    cfg.benchmark_id = "gmr-case1";
    cfg.n_runs = 2;
    cfg.base_seed = 11;
    cfg.step1.budget = 600;
    cfg.step1.batch_size = 200;
    cfg.step1.max_sequence_length = 24;
    cfg.n_threads = 2;

    auto out1 = std::filesystem::temp_directory_path() / "symcon_rep1";
    auto out2 = std::filesystem::temp_directory_path() / "symcon_rep2";
    auto res1 = discover(cfg);
    emit_report(res1, out1.string());
    auto res2 = discover(cfg);
    emit_report(res2, out2.string());

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    const std::string rec1 = slurp(out1 / "run_record.json");
    const std::string rec2 = slurp(out2 / "run_record.json");
    REQUIRE_FALSE(rec1.empty());
    CHECK(rec1 == rec2);

    auto j = nlohmann::json::parse(rec1);
    REQUIRE(j.at("runs").size() == 2);
    CHECK(j.at("runs")[0].at("energy").contains("expression"));
    CHECK(j.at("config").at("benchmark") == "gmr-case1");

    // plot tables exist per loading case and carry the header
    for (const char* name : { "plot_primary_UT.csv", "plot_primary_PS.csv",
                              "plot_primary_EBT.csv" }) {
        const std::string body = slurp(out1 / name);
        REQUIRE_FALSE(body.empty());
        CHECK(body.rfind("strain,p11_mean,band6sigma,p11_target,split", 0) == 0);
    }
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
}

TEST_CASE("single-run ensembles have a zero 6-sigma band") {
    RunConfig cfg;
    cfg.benchmark_id = "gmr-case1";
    cfg.n_runs = 1;
    cfg.base_seed = 3;
    cfg.step1.budget = 400;
    cfg.step1.batch_size = 200;
    cfg.step1.max_sequence_length = 24;
    auto res = discover(cfg);
    auto table = ensemble_table(res, primary_rows(res.data), false);
    for (double b : table.band) CHECK(b == 0.0);
}
