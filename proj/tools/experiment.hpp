#pragma once

#include "rootflow/ensembles.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rootflow::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNonConvergence = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LawSpec {
    // radial: i.i.d. zeros of a radial law. coefficients: a named coefficient
    // ensemble. profile: independent coefficients e^{-n v(k/n)} built from a
    // radial law. real: real-rooted polynomial from a RealLaw.
    enum class Domain { radial, coefficients, profile, real };
    Domain domain = Domain::radial;
    RadialLaw radial;
    CoefficientKind ensemble = CoefficientKind::kac;
    double alpha = 1.0;
    NoiseKind noise = NoiseKind::gaussian;
    RealLaw real;
    nlohmann::json raw = {{"kind", "circleMixture"}, {"radii", {1.0}}, {"weights", {1.0}}};

    bool complex_case() const { return domain != Domain::real; }
    double initial_mass() const;
    std::string name() const;
};

struct Tolerances {
    double ks = 0.07;
    double pde = 1e-6;
    double mass = 1e-8;
};

struct ExperimentConfig {
    std::string mode = "compare";
    LawSpec law;
    bool law_given = false;  // pde-check runs every family when no law is set
    int n = 0;  // 0 picks 2000 for complex laws and 10000 for real ones
    std::vector<double> t;  // empty: 0.5, or a 0.1..0.9 grid for pde-check
    std::vector<double> alpha;  // fractional orders
    std::uint64_t seed = 1;
    int realizations = 1;
    int bins = 50;
    std::string pipeline = "flow";  // i.i.d. zeros: "flow" or "coefficients"
    Tolerances tol;
    std::string out = "out";
    bool plots = true;

    int degree_unit() const { return n > 0 ? n : (law.complex_case() ? 2000 : 10000); }
};

LawSpec parse_law(const nlohmann::json& j);
// Accepts either a config object or an emitted manifest (its "config" member).
// Throws ConfigError on anything malformed or out of range.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

// Runs the pipeline for cfg.mode, writing artifacts and manifest.json into
// cfg.out. Returns an ExitCode value.
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace rootflow::cli
