#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganlab/experiment.hpp"

namespace ganlab {

/// Randomized checks of the closed-form constants and of the optimizer pair.
/// Each suite is deterministic given its seed and is shared by the CLI
/// `verify` subcommand and the acceptance binary.

struct EnvelopeSuiteResult {
    int specs = 0;
    long long draws = 0;
    long long violations_k1 = 0;
    long long violations_k2 = 0;
    long long violations_k3 = 0;
    long long violations_k4 = 0;
    double worst_ratio = 0.0;  // max observed |value| / bound over all checks
    long long total_violations() const {
        return violations_k1 + violations_k2 + violations_k3 + violations_k4;
    }
};

/// Draws (w, x) and (w, theta, z) inside the declared balls for random
/// architecture pairs and checks the four envelope constants at relative
/// tolerance 1e-9.
EnvelopeSuiteResult run_envelope_suite(int spec_count, int draws_per_spec, std::uint64_t seed);

struct LipschitzSuiteResult {
    int specs = 0;
    long long triples = 0;
    long long violations = 0;
    double worst_ratio = 0.0;  // max |f(x1)-f(x2)| / (U_w ||x1-x2||)
};

LipschitzSuiteResult run_lipschitz_suite(int spec_count, int triples_per_spec,
                                         std::uint64_t seed);

struct OracleInstance {
    double sup_grid = 0.0;
    double sup_pgd = 0.0;
    bool within_tolerance = false;  // |pgd - grid| <= 1e-3 (1 + |grid|)
    bool within_slack = false;      // pgd <= grid + U_w * cell diagonal
    long long f_params = 0;
};

struct OracleSuiteResult {
    std::vector<OracleInstance> instances;
    int within_tolerance = 0;
    int within_slack = 0;
};

/// Random tiny instances (at most 3 discriminator parameters); compares the
/// multi-restart subgradient ascent against the exhaustive grid oracle.
OracleSuiteResult run_oracle_equivalence_suite(int instance_count, std::uint64_t seed);

struct DecompositionSuiteResult {
    std::vector<DecompositionRecord> records;
    int nonnegative_slack = 0;
    double min_slack = 0.0;
};

/// Random tiny instances spanning n, m in {1, 10, 100, 10000}; every sup/inf
/// grid-computed with the population representation shared across all terms.
DecompositionSuiteResult run_decomposition_suite(int instance_count, std::uint64_t seed);

}  // namespace ganlab
