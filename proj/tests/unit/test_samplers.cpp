#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "aemcmc/samplers.hpp"
#include "support/oracles.hpp"

using namespace aemcmc;

namespace {

struct UniformSequenceTarget : TargetDensity<BinarySequence> {
    double log_density(const BinarySequence&) const override { return 0.0; }
};

// One-sweep transition matrix of the systematic-scan Gibbs sampler,
// composed from the sampler's own per-site conditionals.
std::vector<double> gibbs_sweep_kernel(const TargetDensity<BinarySequence>& target,
                                       InverseTemperature beta, std::size_t t_len) {
    const std::size_t n = std::size_t{1} << t_len;
    std::vector<double> kernel(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) kernel[s * n + s] = 1.0;
    std::vector<double> next(n * n);
    for (std::size_t site = 0; site < t_len; ++site) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t from = 0; from < n; ++from) {
            for (std::size_t mid = 0; mid < n; ++mid) {
                const double p = kernel[from * n + mid];
                if (p == 0.0) continue;
                const BinarySequence x = oracles::sequence_from_index(mid, t_len);
                const double p1 = single_site_conditional_p1(x, site, target, beta);
                const std::size_t to1 = mid | (std::size_t{1} << site);
                const std::size_t to0 = mid & ~(std::size_t{1} << site);
                next[from * n + to1] += p * p1;
                next[from * n + to0] += p * (1.0 - p1);
            }
        }
        kernel.swap(next);
    }
    return kernel;
}

}  // namespace

TEST_CASE("uniform target gives Bernoulli(1/2) conditionals") {
    const UniformSequenceTarget target;
    const BinarySequence x{0, 1, 0, 1};
    for (std::size_t t = 0; t < 4; ++t)
        CHECK(single_site_conditional_p1(x, t, target, InverseTemperature(1.0)) == 0.5);
}

TEST_CASE("toy conditional flip probability at a mode is alpha/(1+alpha)") {
    const ToyBlockTarget target = ToyBlockTarget::equal_blocks(6, 1, {0.01});
    const BinarySequence ones(6, 1);
    const double p1 = single_site_conditional_p1(ones, 0, target, InverseTemperature(1.0));
    CHECK(1.0 - p1 == Catch::Approx(0.0099009900990099).epsilon(1e-10));
}

TEST_CASE("sweep draws match the exact conditional empirically") {
    const ToyBlockTarget target = ToyBlockTarget::equal_blocks(8, 2, {0.02, 0.04});
    const InverseTemperature beta(0.5);
    RngStream rng(71);
    BinarySequence x(8);
    for (std::size_t i = 0; i < 8; ++i) x.set(i, rng.bernoulli(0.5));

    const double p1 = single_site_conditional_p1(x, 0, target, beta);
    const std::size_t n_draws = 40000;
    std::size_t ones = 0;
    for (std::size_t d = 0; d < n_draws; ++d) {
        BinarySequence y = x;
        single_site_gibbs_sweep(y, target, beta, rng);
        ones += y[0];  // site 0 is drawn first, conditional on the original state
    }
    const double se = std::sqrt(p1 * (1 - p1) / n_draws);
    CHECK(std::abs(static_cast<double>(ones) / n_draws - p1) <= 4 * se);
}

TEST_CASE("gibbs sweep kernel leaves the tempered toy target invariant") {
    const ToyBlockTarget target = ToyBlockTarget::equal_blocks(6, 2, {0.01, 0.05});
    for (double beta_v : {1.0, 0.2}) {
        const InverseTemperature beta(beta_v);
        const std::size_t n = 64;
        const std::vector<double> pi = oracles::normalized_distribution(n, [&](std::size_t s) {
            return target.tempered_log_density(oracles::sequence_from_index(s, 6), beta);
        });
        const std::vector<double> kernel = gibbs_sweep_kernel(target, beta, 6);
        for (std::size_t to = 0; to < n; ++to) {
            double mass = 0.0;
            for (std::size_t from = 0; from < n; ++from)
                mass += pi[from] * kernel[from * n + to];
            CHECK(mass == Catch::Approx(pi[to]).margin(1e-8));
        }
    }
}

TEST_CASE("gibbs sweep updates the cached log-density exactly") {
    const ToyBlockTarget target = ToyBlockTarget::equal_blocks(10, 2, {0.01, 0.03});
    const InverseTemperature beta(0.2);
    ChainState<BinarySequence> chain{BinarySequence(10, 1), 0.0, RngStream(5)};
    chain.cached_log_target = target.tempered_log_density(chain.state, beta);
    for (int sweep = 0; sweep < 200; ++sweep) {
        chain_sweep(chain, {SamplerKind::SingleSiteGibbs, 1}, target, beta);
        CHECK(chain.cached_log_target ==
              Catch::Approx(target.tempered_log_density(chain.state, beta)).margin(1e-8));
    }
}

TEST_CASE("ffbs row draw follows the exact row conditional") {
    const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.7),
                          AdditiveGaussianEmission({0.4, 0.6}, 5.0, 1.5), {2.0, 4.6, 0.3});
    const InverseTemperature beta(1.0);
    BinaryMatrix base(2, 3, 0);
    base.set(1, 1, 1);

    const std::vector<double> exact = oracles::row_conditional_enumeration(base, 0, model, beta);
    const std::size_t n_draws = 30000;
    std::vector<std::size_t> counts(8, 0);
    RngStream rng(72);
    for (std::size_t d = 0; d < n_draws; ++d) {
        BinaryMatrix x = base;
        ffbs_row_conditional(x, 0, model, beta, rng);
        std::size_t key = 0;
        for (std::size_t t = 0; t < 3; ++t) key |= std::size_t{x(0, t)} << t;
        counts[key]++;
        // untouched rows stay untouched
        for (std::size_t t = 0; t < 3; ++t) CHECK(x(1, t) == base(1, t));
    }
    CHECK(oracles::compare_counts(counts, exact, n_draws).within(4.0));
}

TEST_CASE("ffbs at vanishing beta reproduces the prior transitions") {
    const FhmmModel model(MarkovChainPrior::homogeneous(1, 0.8),
                          AdditiveGaussianEmission({1.0}, 5.0, 1.0),
                          std::vector<double>(4000, 2.5));
    BinaryMatrix x(1, 4000, 0);
    RngStream rng(73);
    ffbs_row_conditional(x, 0, model, InverseTemperature(1e-300), rng);
    std::size_t stay = 0, transitions = 0;
    for (std::size_t t = 1; t < 4000; ++t) {
        transitions++;
        stay += (x(0, t) == x(0, t - 1));
    }
    const double stay_rate = static_cast<double>(stay) / transitions;
    CHECK(stay_rate == Catch::Approx(0.8).margin(0.03));
}

TEST_CASE("ffbs with a sharp likelihood recovers the generating row") {
    const std::size_t t_len = 12;
    RngStream gen(74);
    BinarySequence truth(t_len);
    for (std::size_t t = 0; t < t_len; ++t) truth.set(t, gen.bernoulli(0.5));
    std::vector<double> y(t_len);
    for (std::size_t t = 0; t < t_len; ++t) y[t] = truth[t] ? 1.0 : 0.0;
    const FhmmModel model(MarkovChainPrior::homogeneous(1, 0.5),
                          AdditiveGaussianEmission({1.0}, 1.0, 1e-8), y);
    BinaryMatrix x(1, t_len, 0);
    ffbs_row_conditional(x, 0, model, InverseTemperature(1.0), gen);
    CHECK(x.row(0) == truth);
}

TEST_CASE("ffbs validates its row argument") {
    const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.9),
                          AdditiveGaussianEmission({0.5, 0.5}, 1.0, 1.0), {1.0, 2.0}, {0});
    BinaryMatrix x(2, 2, 0);
    RngStream rng(1);
    CHECK_THROWS_AS(ffbs_row_conditional(x, 2, model, InverseTemperature(1.0), rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(ffbs_row_conditional(x, 0, model, InverseTemperature(1.0), rng),
                    std::invalid_argument);
}

TEST_CASE("hamming ball restricted space has the binomial-sum size") {
    const std::vector<double> w(6, 1.0 / 6.0);
    const FhmmModel model(MarkovChainPrior::homogeneous(6, 0.9),
                          AdditiveGaussianEmission(w, 1.0, 1.0), {1.0});
    CHECK(hamming_ball_size(model, 3) == 42);
    CHECK(hamming_ball_size(model, 6) == 64);
    CHECK_THROWS_AS(hamming_ball_size(model, 0), std::invalid_argument);
    CHECK_THROWS_AS(hamming_ball_size(model, 7), std::invalid_argument);
}

TEST_CASE("hamming ball with full radius performs an exact joint draw") {
    const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.75),
                          AdditiveGaussianEmission({0.45, 0.55}, 4.0, 1.0), {1.8, 0.2, 4.1});
    const InverseTemperature beta(1.0);
    const std::size_t n_states = 64;  // 2^(2*3)
    const FhmmTarget target(model);
    const std::vector<double> pi = oracles::normalized_distribution(n_states, [&](std::size_t s) {
        return target.tempered_log_density(oracles::matrix_from_index(s, 2, 3), beta);
    });

    const std::size_t n_draws = 30000;
    std::vector<std::size_t> counts(n_states, 0);
    RngStream rng(75);
    BinaryMatrix x(2, 3, 0);
    for (std::size_t d = 0; d < n_draws; ++d) {
        hamming_ball_step(x, 2, model, beta, rng);
        counts[oracles::matrix_index(x)]++;
    }
    // r=K: every step is an independent exact draw from the full posterior
    CHECK(oracles::compare_counts(counts, pi, n_draws).within(4.0));
}

TEST_CASE("hamming ball kernel at reduced radius preserves the posterior") {
    // Theoretical one-step kernel: average over the per-column uniform
    // auxiliary draws of the ball-restricted (and renormalized) posterior.
    const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.8),
                          AdditiveGaussianEmission({0.4, 0.6}, 3.0, 1.0), {1.4, 2.2});
    const InverseTemperature beta(1.0);
    const FhmmTarget target(model);
    const std::size_t t_len = 2, n = 16, radius = 1;
    const std::vector<double> pi = oracles::normalized_distribution(n, [&](std::size_t s) {
        return target.tempered_log_density(oracles::matrix_from_index(s, 2, t_len), beta);
    });

    const auto column_code = [&](std::size_t state, std::size_t t) {
        // matrix_from_index bit order: row k, column t at bit k*t_len + t
        return ((state >> t) & 1u) | (((state >> (t_len + t)) & 1u) << 1);
    };
    const auto in_ball = [&](std::size_t a, std::size_t b) {
        return std::popcount(static_cast<unsigned>(a ^ b)) <= static_cast<int>(radius);
    };

    std::vector<double> kernel(n * n, 0.0);
    const std::size_t ball_size = 3;  // popcount <= 1 over 2 rows
    for (std::size_t from = 0; from < n; ++from) {
        // enumerate auxiliary columns u_t within the ball of each column
        for (std::size_t u0 = 0; u0 < 4; ++u0) {
            if (!in_ball(u0, column_code(from, 0))) continue;
            for (std::size_t u1 = 0; u1 < 4; ++u1) {
                if (!in_ball(u1, column_code(from, 1))) continue;
                const double p_aux = 1.0 / (ball_size * ball_size);
                double z = 0.0;
                for (std::size_t to = 0; to < n; ++to)
                    if (in_ball(column_code(to, 0), u0) && in_ball(column_code(to, 1), u1))
                        z += pi[to];
                for (std::size_t to = 0; to < n; ++to)
                    if (in_ball(column_code(to, 0), u0) && in_ball(column_code(to, 1), u1))
                        kernel[from * n + to] += p_aux * pi[to] / z;
            }
        }
    }
    for (std::size_t to = 0; to < n; ++to) {
        double mass = 0.0;
        for (std::size_t from = 0; from < n; ++from) mass += pi[from] * kernel[from * n + to];
        CHECK(mass == Catch::Approx(pi[to]).margin(1e-8));
    }

    // and the implementation follows that kernel row empirically
    const std::size_t start = 5;
    const BinaryMatrix x0 = oracles::matrix_from_index(start, 2, t_len);
    const std::size_t n_draws = 30000;
    std::vector<std::size_t> counts(n, 0);
    RngStream rng(77);
    for (std::size_t d = 0; d < n_draws; ++d) {
        BinaryMatrix x = x0;
        hamming_ball_step(x, radius, model, beta, rng);
        counts[oracles::matrix_index(x)]++;
    }
    const std::vector<double> row(kernel.begin() + start * n, kernel.begin() + (start + 1) * n);
    CHECK(oracles::compare_counts(counts, row, n_draws).within(4.0));
}

TEST_CASE("hamming ball columns move at most 2r per step") {
    const FhmmModel model(MarkovChainPrior::homogeneous(4, 0.9),
                          AdditiveGaussianEmission({0.25, 0.25, 0.25, 0.25}, 6.0, 1.0),
                          {1.0, 3.0, 5.0, 2.0, 0.5});
    RngStream rng(76);
    BinaryMatrix x(4, 5, 0);
    for (int step = 0; step < 200; ++step) {
        const BinaryMatrix before = x;
        hamming_ball_step(x, 1, model, InverseTemperature(0.5), rng);
        for (std::size_t t = 0; t < 5; ++t) {
            std::size_t moved = 0;
            for (std::size_t k = 0; k < 4; ++k) moved += (x(k, t) != before(k, t));
            CHECK(moved <= 2);
        }
    }
}

TEST_CASE("row-sweep kernel built from exact conditionals preserves the posterior") {
    const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.8),
                          AdditiveGaussianEmission({0.3, 0.7}, 3.0, 1.2), {1.1, 2.9, 0.7, 2.0});
    const InverseTemperature beta(0.2);
    const std::size_t t_len = 4, n = 256;
    const FhmmTarget target(model);
    const std::vector<double> pi = oracles::normalized_distribution(n, [&](std::size_t s) {
        return target.tempered_log_density(oracles::matrix_from_index(s, 2, t_len), beta);
    });

    // kernel of one systematic row sweep, rows 0 then 1
    std::vector<double> kernel(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) kernel[s * n + s] = 1.0;
    std::vector<double> next(n * n);
    for (std::size_t k = 0; k < 2; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t from = 0; from < n; ++from)
            for (std::size_t mid = 0; mid < n; ++mid) {
                const double p = kernel[from * n + mid];
                if (p == 0.0) continue;
                const BinaryMatrix x = oracles::matrix_from_index(mid, 2, t_len);
                const std::vector<double> cond =
                    oracles::row_conditional_enumeration(x, k, model, beta);
                for (std::size_t row_bits = 0; row_bits < cond.size(); ++row_bits) {
                    BinaryMatrix to = x;
                    for (std::size_t t = 0; t < t_len; ++t)
                        to.set(k, t, (row_bits >> t) & 1u);
                    next[from * n + oracles::matrix_index(to)] += p * cond[row_bits];
                }
            }
        kernel.swap(next);
    }
    for (std::size_t to = 0; to < n; ++to) {
        double mass = 0.0;
        for (std::size_t from = 0; from < n; ++from) mass += pi[from] * kernel[from * n + to];
        CHECK(mass == Catch::Approx(pi[to]).margin(1e-8));
    }
}

TEST_CASE("chain sweeps skip fixed rows and keep the cache coherent") {
    const FhmmModel model(MarkovChainPrior::homogeneous(3, 0.85),
                          AdditiveGaussianEmission({0.3, 0.3, 0.4}, 5.0, 1.0),
                          {2.1, 4.0, 1.2, 0.4, 3.3}, {1});
    const FhmmTarget target(model);
    const InverseTemperature beta(0.6);
    BinaryMatrix init(3, 5, 0);
    for (std::size_t t = 0; t < 5; ++t) init.set(1, t, 1);

    ChainState<BinaryMatrix> chain{init, target.tempered_log_density(init, beta),
                                   RngStream(derive_seed(3, stream::kChain, 0))};
    for (int sweep = 0; sweep < 50; ++sweep) {
        chain_sweep(chain, {SamplerKind::RowGibbsFFBS, 1}, target, beta);
        for (std::size_t t = 0; t < 5; ++t) CHECK(chain.state(1, t) == 1);
        CHECK(chain.cached_log_target ==
              Catch::Approx(target.tempered_log_density(chain.state, beta)).margin(1e-8));
    }

    // the sweep is ffbs on rows 0 and 2, in that order, on the same stream
    ChainState<BinaryMatrix> manual{init, target.tempered_log_density(init, beta),
                                    RngStream(derive_seed(4, stream::kChain, 0))};
    ChainState<BinaryMatrix> swept = manual;
    swept.rng = RngStream(derive_seed(4, stream::kChain, 0));
    chain_sweep(swept, {SamplerKind::RowGibbsFFBS, 1}, target, beta);
    ffbs_row_conditional(manual.state, 0, model, beta, manual.rng);
    ffbs_row_conditional(manual.state, 2, model, beta, manual.rng);
    CHECK(swept.state == manual.state);

    ChainState<BinaryMatrix> hb{init, target.tempered_log_density(init, beta), RngStream(9)};
    for (int sweep = 0; sweep < 50; ++sweep) {
        chain_sweep(hb, {SamplerKind::HammingBall, 2}, target, beta);
        for (std::size_t t = 0; t < 5; ++t) CHECK(hb.state(1, t) == 1);
        CHECK(hb.cached_log_target ==
              Catch::Approx(target.tempered_log_density(hb.state, beta)).margin(1e-8));
    }
}

TEST_CASE("a sweep with no free rows is the identity") {
    const FhmmModel model(MarkovChainPrior::homogeneous(1, 0.9),
                          AdditiveGaussianEmission({1.0}, 2.0, 1.0), {1.0, 2.0}, {0});
    const FhmmTarget target(model);
    BinaryMatrix init(1, 2, 1);
    ChainState<BinaryMatrix> chain{init, target.tempered_log_density(init, InverseTemperature(1.0)),
                                   RngStream(10)};
    chain_sweep(chain, {SamplerKind::RowGibbsFFBS, 1}, target, InverseTemperature(1.0));
    CHECK(chain.state == init);
}

TEST_CASE("incompatible sampler kinds are rejected") {
    const ToyBlockTarget toy = ToyBlockTarget::equal_blocks(4, 1, {0.01});
    ChainState<BinarySequence> seq{BinarySequence(4, 0), 0.0, RngStream(1)};
    CHECK_THROWS_AS(chain_sweep(seq, {SamplerKind::RowGibbsFFBS, 1}, toy,
                                InverseTemperature(1.0)),
                    std::invalid_argument);

    const FhmmModel model(MarkovChainPrior::homogeneous(1, 0.9),
                          AdditiveGaussianEmission({1.0}, 2.0, 1.0), {1.0});
    const FhmmTarget target(model);
    ChainState<BinaryMatrix> mat{BinaryMatrix(1, 1), 0.0, RngStream(2)};
    CHECK_THROWS_AS(chain_sweep(mat, {SamplerKind::SingleSiteGibbs, 1}, target,
                                InverseTemperature(1.0)),
                    std::invalid_argument);
}
