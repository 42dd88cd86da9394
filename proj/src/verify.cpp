#include "ganlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ganlab/bounds.hpp"

namespace ganlab {

namespace {

constexpr double kRelTol = 1e-9;

Activation random_activation(RngStream& rng) {
    const double u = rng.uniform01();
    if (u < 0.4) return Activation::relu();
    if (u < 0.7) return Activation::identity();
    return Activation::leaky(rng.uniform(0.05, 0.95));
}

NetworkSpec random_discriminator(RngStream& rng, int max_width, int max_depth) {
    const int depth = 1 + static_cast<int>(rng.uniform01() * max_depth) % max_depth;
    std::vector<int> dims;
    dims.push_back(1 + static_cast<int>(rng.uniform01() * max_width) % max_width);
    for (int l = 1; l < depth; ++l) {
        dims.push_back(1 + static_cast<int>(rng.uniform01() * max_width) % max_width);
    }
    dims.push_back(1);
    std::vector<double> bounds;
    std::vector<Activation> acts;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) bounds.push_back(rng.uniform(0.5, 2.0));
    for (std::size_t i = 0; i + 2 < dims.size(); ++i) acts.push_back(random_activation(rng));
    return NetworkSpec(std::move(dims), std::move(bounds), std::move(acts));
}

NetworkSpec random_generator(RngStream& rng, int output_dim, int max_width, int max_depth) {
    const int depth = 1 + static_cast<int>(rng.uniform01() * max_depth) % max_depth;
    std::vector<int> dims;
    dims.push_back(1 + static_cast<int>(rng.uniform01() * max_width) % max_width);
    for (int l = 1; l < depth; ++l) {
        dims.push_back(1 + static_cast<int>(rng.uniform01() * max_width) % max_width);
    }
    dims.push_back(output_dim);
    std::vector<double> bounds;
    std::vector<Activation> acts;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) bounds.push_back(rng.uniform(0.5, 2.0));
    for (std::size_t i = 0; i + 2 < dims.size(); ++i) acts.push_back(random_activation(rng));
    return NetworkSpec(std::move(dims), std::move(bounds), std::move(acts));
}

}  // namespace

EnvelopeSuiteResult run_envelope_suite(int spec_count, int draws_per_spec, std::uint64_t seed) {
    EnvelopeSuiteResult result;
    result.specs = spec_count;
    const MeasuringFunction phi = MeasuringFunction::identity();
    ForwardWorkspace ws;
    for (int s = 0; s < spec_count; ++s) {
        RngStream rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
        const NetworkSpec fspec = random_discriminator(rng, 3, 3);
        const NetworkSpec gspec = random_generator(rng, fspec.input_dim(), 3, 2);
        const double b_x = rng.uniform(0.5, 2.0);
        const double b_z = rng.uniform(0.5, 2.0);
        const BoundReport report = compute_bound_report(fspec, gspec, phi, b_x, b_z);
        const DistributionSpec x_law = DistributionSpec::uniform_ball(fspec.input_dim(), b_x);
        const DistributionSpec z_law = DistributionSpec::uniform_ball(gspec.input_dim(), b_z);

        Vector pushed;
        for (int d = 0; d < draws_per_spec; ++d) {
            const WeightAssignment w = sample_weights(fspec, rng);
            const WeightAssignment theta = sample_weights(gspec, rng);
            const Vector x = x_law.draw(rng);
            const Vector z = z_law.draw(rng);

            const double fx = forward_scalar_unchecked(fspec, w, x, ws);
            forward_unchecked(gspec, theta, z, pushed, ws);
            const double fgz = forward_scalar_unchecked(fspec, w, pushed, ws);
            const double f1 = apply_measuring(phi, MeasureRole::f1, fx);
            const double hu = apply_measuring(phi, MeasureRole::h_u, fgz);

            if (std::abs(fx) > report.k1 * (1.0 + kRelTol)) ++result.violations_k1;
            if (std::abs(fgz) > report.k2 * (1.0 + kRelTol)) ++result.violations_k2;
            if (std::abs(f1) > report.k3 * (1.0 + kRelTol)) ++result.violations_k3;
            if (std::abs(hu) > report.k4 * (1.0 + kRelTol)) ++result.violations_k4;
            result.worst_ratio = std::max({result.worst_ratio, std::abs(fx) / report.k1,
                                           std::abs(fgz) / report.k2, std::abs(f1) / report.k3,
                                           std::abs(hu) / report.k4});
            ++result.draws;
        }
    }
    return result;
}

LipschitzSuiteResult run_lipschitz_suite(int spec_count, int triples_per_spec,
                                         std::uint64_t seed) {
    LipschitzSuiteResult result;
    result.specs = spec_count;
    ForwardWorkspace ws;
    for (int s = 0; s < spec_count; ++s) {
        RngStream rng(derive_seed(seed, {0x11bULL, static_cast<std::uint64_t>(s)}));
        const NetworkSpec fspec = random_discriminator(rng, 3, 3);
        const double u_w = lipschitz_product(fspec);
        const double b_x = rng.uniform(0.5, 2.0);
        const DistributionSpec x_law = DistributionSpec::uniform_ball(fspec.input_dim(), b_x);
        for (int t = 0; t < triples_per_spec; ++t) {
            const WeightAssignment w = sample_weights(fspec, rng);
            const Vector x1 = x_law.draw(rng);
            const Vector x2 = x_law.draw(rng);
            const double lhs =
                std::abs(forward_scalar_unchecked(fspec, w, x1, ws) -
                         forward_scalar_unchecked(fspec, w, x2, ws));
            Vector diff(x1.size());
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = x1[i] - x2[i];
            const double rhs = u_w * norm2(diff);
            if (lhs > rhs * (1.0 + kRelTol)) ++result.violations;
            if (rhs > 0.0) result.worst_ratio = std::max(result.worst_ratio, lhs / rhs);
            ++result.triples;
        }
    }
    return result;
}

namespace {

NetworkSpec random_tiny_discriminator(RngStream& rng) {
    // Dimension layouts with at most 3 weight entries.
    const int pick = static_cast<int>(rng.uniform01() * 6.0) % 6;
    std::vector<int> dims;
    switch (pick) {
        case 0: dims = {1, 1}; break;
        case 1: dims = {2, 1}; break;
        case 2: dims = {3, 1}; break;
        case 3: dims = {1, 1, 1}; break;
        case 4: dims = {2, 1, 1}; break;
        default: dims = {1, 1, 1, 1}; break;
    }
    std::vector<double> bounds;
    std::vector<Activation> acts;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) bounds.push_back(rng.uniform(0.5, 1.5));
    for (std::size_t i = 0; i + 2 < dims.size(); ++i) acts.push_back(random_activation(rng));
    return NetworkSpec(std::move(dims), std::move(bounds), std::move(acts));
}

}  // namespace

OracleSuiteResult run_oracle_equivalence_suite(int instance_count, std::uint64_t seed) {
    OracleSuiteResult result;
    for (int i = 0; i < instance_count; ++i) {
        RngStream rng(derive_seed(seed, {0x0e1ULL, static_cast<std::uint64_t>(i)}));
        const NetworkSpec fspec = random_tiny_discriminator(rng);
        const int pz = 1 + static_cast<int>(rng.uniform01() * 2.0) % 2;
        NetworkSpec gspec({pz, fspec.input_dim()}, {rng.uniform(0.5, 1.5)}, {});
        const WeightAssignment theta = sample_weights(gspec, rng);

        const long n = 5 + static_cast<long>(rng.uniform01() * 26.0) % 26;
        const long m = 5 + static_cast<long>(rng.uniform01() * 26.0) % 26;
        const DistributionSpec target = DistributionSpec::uniform_ball(fspec.input_dim(), 1.0);
        const DistributionSpec base = DistributionSpec::uniform_ball(pz, 1.0);
        const SampleSet data = draw_samples(target, base, n, m, rng.next_u64());

        ObjectiveInstance inst{fspec, gspec, MeasuringFunction::identity(),
                               rng.uniform01() < 0.7};
        const ObjectiveEvaluator ev = ObjectiveEvaluator::from_samples(inst, data);

        OptimOptions grid_opt;
        grid_opt.method = Method::grid;
        grid_opt.grid.points_per_param = fspec.parameter_count() >= 3 ? 101 : 201;
        OptimOptions pgd_opt;
        pgd_opt.method = Method::pgd;
        pgd_opt.seed = rng.next_u64();

        OracleInstance rec;
        rec.f_params = fspec.parameter_count();
        rec.sup_grid = sup_over_w(ev, theta, grid_opt).value;
        rec.sup_pgd = sup_over_w(ev, theta, pgd_opt).value;
        rec.within_tolerance =
            std::abs(rec.sup_pgd - rec.sup_grid) <= 1e-3 * (1.0 + std::abs(rec.sup_grid));
        const double slack = lipschitz_product(fspec) * grid_cell_diagonal(fspec, grid_opt.grid);
        rec.within_slack = rec.sup_pgd <= rec.sup_grid + slack;
        if (rec.within_tolerance) ++result.within_tolerance;
        if (rec.within_slack) ++result.within_slack;
        result.instances.push_back(rec);
    }
    return result;
}

DecompositionSuiteResult run_decomposition_suite(int instance_count, std::uint64_t seed) {
    DecompositionSuiteResult result;
    result.min_slack = std::numeric_limits<double>::infinity();
    const long sizes[4] = {1, 10, 100, 10000};

    for (int i = 0; i < instance_count; ++i) {
        RngStream rng(derive_seed(seed, {0xdecULL, static_cast<std::uint64_t>(i)}));
        const long n = sizes[static_cast<int>(rng.uniform01() * 4.0) % 4];
        const long m = sizes[static_cast<int>(rng.uniform01() * 4.0) % 4];
        const int family = i % 4;

        NetworkSpec fspec({1, 1}, {rng.uniform(0.5, 1.5)}, {});
        NetworkSpec gspec({1, 1}, {rng.uniform(0.5, 1.5)}, {});
        DistributionSpec target = DistributionSpec::uniform_ball(1, 1.0);
        DistributionSpec base = DistributionSpec::uniform_ball(1, 1.0);
        long n_eff = n, m_eff = m;
        PopulationMethod pop_method = PopulationMethod::automatic;
        long pool = 10000;

        // Realizable targets keep the population infimum interior, so the
        // bound holds with strictly positive slack on generic draws.
        if (family == 0) {
            // linear scalar toy, symmetric uniform laws, exact mean-point population
            target = DistributionSpec::pushforward(gspec, sample_weights(gspec, rng),
                                                   DistributionSpec::uniform_ball(1, 1.0));
        } else if (family == 1) {
            // linear toy against a plug-in pool population
            pop_method = PopulationMethod::plugin;
            base = DistributionSpec::uniform_cube(1, rng.uniform(0.5, 1.5));
            target = DistributionSpec::pushforward(gspec, sample_weights(gspec, rng), base);
        } else {
            // one nonlinear network over finite-support laws
            if (family == 2) {
                n_eff = std::min<long>(n, 100);
                m_eff = std::min<long>(m, 100);
                fspec = NetworkSpec({1, 1, 1}, {rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)},
                                    {random_activation(rng)});
            } else {
                gspec = NetworkSpec({1, 1, 1}, {rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)},
                                    {random_activation(rng)});
            }
            // Exactly three distinct atoms: no sample whose size avoids
            // multiples of 3 can reproduce the law, so the empirical and
            // population sides never coincide and the slack stays away
            // from a floating-point tie at zero.
            std::vector<Vector> zs;
            zs.push_back({rng.uniform(0.1, 1.0)});
            zs.push_back({rng.uniform(-1.0, -0.1)});
            zs.push_back({rng.uniform(-1.0, 1.0)});
            base = DistributionSpec::empirical(std::move(zs));
            target = DistributionSpec::pushforward(gspec, sample_weights(gspec, rng), base);
        }

        ObjectiveInstance inst{fspec, gspec, MeasuringFunction::identity(), true};
        auto sides = make_population_sides(inst, target, base, pool, rng.next_u64(), pop_method);
        const SampleSet data = draw_samples(target, base, n_eff, m_eff, rng.next_u64());

        GridOptions grid;
        grid.points_per_param = family >= 2 ? 61 : 201;
        grid.param_cap = 3;
        const DecompositionRecord rec =
            verify_decomposition(inst, data, sides.first, sides.second, grid);
        if (rec.slack >= 0.0) ++result.nonnegative_slack;
        result.min_slack = std::min(result.min_slack, rec.slack);
        result.records.push_back(rec);
    }
    return result;
}

}  // namespace ganlab
