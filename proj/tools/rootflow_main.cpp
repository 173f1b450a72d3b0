#include "experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace rootflow::cli;

int main(int argc, char** argv) {
    CLI::App app{"Zeros of repeated derivatives of random polynomials"};
    std::string mode, config_path, out;
    std::optional<int> n, bins, realizations;
    std::optional<std::uint64_t> seed;
    std::vector<double> t, alpha;
    std::string pipeline;
    app.add_option("mode", mode, "simulate | theory | compare | real | pde-check | fractional");
    app.add_option("-c,--config", config_path, "JSON config or an emitted manifest.json");
    app.add_option("-n,--n", n, "degree (complex) or degree unit (real)");
    app.add_option("-t,--t", t, "derivative fractions; order is floor(t n)");
    app.add_option("-s,--seed", seed);
    app.add_option("-o,--out", out, "output directory");
    app.add_option("--bins", bins);
    app.add_option("--realizations", realizations);
    app.add_option("--pipeline", pipeline, "flow | coefficients");
    app.add_option("--alpha", alpha, "fractional derivative orders");
    CLI11_PARSE(app, argc, argv);

    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot open " + config_path);
            try {
                j = nlohmann::json::parse(f);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError(config_path + ": " + e.what());
            }
        }
        ExperimentConfig cfg = parse_config(j);
        if (!mode.empty()) cfg.mode = mode;
        if (n) cfg.n = *n;
        if (!t.empty()) cfg.t = t;
        if (seed) cfg.seed = *seed;
        if (!out.empty()) cfg.out = out;
        if (bins) cfg.bins = *bins;
        if (realizations) cfg.realizations = *realizations;
        if (!pipeline.empty()) cfg.pipeline = pipeline;
        if (!alpha.empty()) cfg.alpha = alpha;
        return run(cfg, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNonConvergence;
    }
}
