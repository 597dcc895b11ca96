// Command-line front end: data generation, model discovery, benchmark
// reproduction and report re-rendering.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "symcon/report.hpp"
#include "symcon/symcon.hpp"

namespace {

using namespace symcon;

int cmd_generate(const std::string& benchmark, const std::string& out_dir, std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    if (benchmark == "temperature-standin") {
        write_loading_csv(generate_temperature_standin(), out_dir + "/temperature.csv");
        std::cout << "wrote " << out_dir << "/temperature.csv\n";
        return 0;
    }
    BenchmarkSpec spec = benchmark_spec(benchmark);
    write_loading_csv(generate_primary(spec, seed), out_dir + "/primary.csv");
    std::cout << "wrote " << out_dir << "/primary.csv\n";
    if (spec.damage) {
        write_loading_csv(generate_cyclic(spec, seed), out_dir + "/cyclic.csv");
        std::cout << "wrote " << out_dir << "/cyclic.csv\n";
    }
    return 0;
}

void print_outcome(const DiscoveryResult& result) {
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const auto& run = result.runs[r];
        std::cout << "run " << (r + 1) << ": psi = " << run.step1.infix;
        auto it = run.step1.r2.find("pooled/all");
        if (it != run.step1.r2.end()) std::cout << "  [R2 " << it->second << "]";
        std::cout << (run.step1.recovered ? "  (recovered)" : "") << "\n";
        if (run.step2) {
            std::cout << "       eta = " << run.step2->infix;
            auto d = run.step2->r2.find("pooled/all");
            if (d != run.step2->r2.end()) std::cout << "  [R2 " << d->second << "]";
            std::cout << (run.step2->recovered ? "  (recovered)" : "") << "\n";
        }
    }
}

int cmd_discover(RunConfig config) {
    DiscoveryResult result = discover(config);
    emit_report(result, config.out_dir);
    print_outcome(result);
    std::cout << "report written to " << config.out_dir << "\n";
    return 0;
}

int cmd_benchmark(const std::string& out_dir, int runs, std::size_t budget,
                  std::uint64_t seed, int threads) {
    for (const std::string& id : known_benchmarks()) {
        RunConfig config;
        config.benchmark_id = id;
        config.n_runs = runs;
        config.base_seed = seed;
        config.step1.budget = budget;
        config.step2.budget = budget;
        config.n_threads = threads;
        config.out_dir = out_dir + "/" + id;
        if (id == "gmr-case1-vol1" || id == "gmr-case1-vol2")
            config.regime = Regime::nearly_incompressible;
        if (id == "temperature-standin") config.temperature = true;
        std::cout << "== " << id << " ==\n";
        cmd_discover(config);
    }
    return 0;
}

int cmd_report(const std::string& record_path, const std::string& out_dir) {
    std::ifstream f(record_path);
    if (!f) throw std::runtime_error("cannot open: " + record_path);
    nlohmann::json j;
    f >> j;
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/summary.txt", std::ios::binary);
    out << "re-rendered from " << record_path << "\n\n";
    int r = 0;
    for (const auto& run : j.at("runs")) {
        out << "run " << ++r << " (seed " << run.at("seed") << ")\n";
        out << "  psi = " << run.at("energy").at("expression").get<std::string>() << "\n";
        if (run.contains("damage"))
            out << "  eta = " << run.at("damage").at("expression").get<std::string>() << "\n";
        out << "\n";
    }
    std::cout << "summary written to " << out_dir << "/summary.txt\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{ "symbolic discovery of hyperelastic strain energies and damage functions" };
    app.require_subcommand(1);

    std::string benchmark, data_csv, out_dir = "out", regime_name = "incompressible";
    std::string record_path;
    int runs = 5, threads = 0;
    std::size_t budget = 75000;
    std::uint64_t seed = 42;
    bool temperature = false;

    auto* gen = app.add_subcommand("generate", "write a benchmark data set as csv");
    gen->add_option("--benchmark", benchmark, "benchmark id")->required();
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--seed", seed, "split seed");

    auto* dis = app.add_subcommand("discover", "run the two-step model discovery");
    dis->add_option("--benchmark", benchmark, "benchmark id");
    dis->add_option("--data", data_csv, "input csv (schema: " +
                                             std::string(kLoadingCsvHeader) + ")");
    dis->add_option("--runs", runs, "independent runs");
    dis->add_option("--budget", budget, "sample budget per search");
    dis->add_option("--seed", seed, "base seed");
    dis->add_option("--regime", regime_name, "incompressible | nearly-incompressible");
    dis->add_flag("--temperature-column", temperature, "data carries temperatures");
    dis->add_option("--out", out_dir, "output directory");
    dis->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* bench = app.add_subcommand("benchmark", "reproduce the full benchmark suite");
    bench->add_option("--out", out_dir, "output directory");
    bench->add_option("--runs", runs, "independent runs per benchmark");
    bench->add_option("--budget", budget, "sample budget per search");
    bench->add_option("--seed", seed, "base seed");
    bench->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* rep = app.add_subcommand("report", "re-render a summary from a run record");
    rep->add_option("--record", record_path, "run_record.json path")->required();
    rep->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(benchmark, out_dir, seed);
        if (dis->parsed()) {
            RunConfig config;
            config.benchmark_id = benchmark;
            config.data_csv = data_csv;
            config.n_runs = runs;
            config.base_seed = seed;
            config.step1.budget = budget;
            config.step2.budget = budget;
            config.out_dir = out_dir;
            config.n_threads = threads;
            config.temperature = temperature;
            if (regime_name == "nearly-incompressible")
                config.regime = Regime::nearly_incompressible;
            else if (regime_name != "incompressible")
                throw std::invalid_argument("unknown regime: " + regime_name);
            if (benchmark == "temperature-standin") config.temperature = true;
            if (benchmark == "gmr-case1-vol1" || benchmark == "gmr-case1-vol2")
                config.regime = Regime::nearly_incompressible;
            return cmd_discover(config);
        }
        if (bench->parsed()) return cmd_benchmark(out_dir, runs, budget, seed, threads);
        if (rep->parsed()) return cmd_report(record_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
