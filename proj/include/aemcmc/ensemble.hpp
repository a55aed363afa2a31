#pragma once

// Parallel-tempering engine and the three exchange moves. The augmented
// crossover is a two-step Gibbs update: draw a uniform one-point
// crossover (u, v) of the pair (flipping a coin for the direction), then
// select among all 2T crossovers of (u, v) with probability proportional
// to pi_i(z_i) * pi_j(z_j). The candidate set always contains the current
// pair, and the move is accepted by construction.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aemcmc/binary.hpp"
#include "aemcmc/fhmm.hpp"
#include "aemcmc/logspace.hpp"
#include "aemcmc/rng.hpp"
#include "aemcmc/samplers.hpp"
#include "aemcmc/target.hpp"
#include "aemcmc/trace.hpp"

namespace aemcmc {

template <class State>
struct TemperedEnsemble {
    const TargetDensity<State>* target = nullptr;
    std::vector<InverseTemperature> betas;
    std::vector<ChainState<State>> chains;

    std::size_t size() const { return chains.size(); }

    void check_pair(std::size_t i, std::size_t j) const {
        if (i == j || i >= chains.size() || j >= chains.size())
            throw std::invalid_argument("exchange move: invalid chain pair");
    }

    double log_target(std::size_t chain, const State& s) const {
        return target->tempered_log_density(s, betas[chain]);
    }
};

// Scores of all 2T crossover candidates of (U, V): index t-1 holds the
// "normal" direction (z_i gets V's prefix), index T+t-1 the flipped one.
struct CrossoverScores {
    std::vector<double> log_weight;    // log pi_i(z_i) + log pi_j(z_j)
    std::vector<double> log_target_i;  // log pi_i(z_i)
    std::vector<double> log_target_j;  // log pi_j(z_j)
};

// Direct per-candidate density evaluation; O(T) evaluations. This is the
// reference path for any target and the oracle for the FHMM recursion.
template <class State>
CrossoverScores crossover_scores_generic(const State& u, const State& v,
                                         const TargetDensity<State>& target,
                                         InverseTemperature beta_i, InverseTemperature beta_j) {
    if (state_length(u) != state_length(v) || state_dim(u) != state_dim(v))
        throw std::invalid_argument("crossover scores: shape mismatch");
    const std::size_t t_len = state_length(u);
    CrossoverScores sc;
    sc.log_weight.resize(2 * t_len);
    sc.log_target_i.resize(2 * t_len);
    sc.log_target_j.resize(2 * t_len);
    for (std::size_t t = 1; t <= t_len; ++t) {
        const auto [w1, w2] = cross_at(u, v, t);
        const double li_1 = target.tempered_log_density(w1, beta_i);
        const double lj_2 = target.tempered_log_density(w2, beta_j);
        const double li_2 = target.tempered_log_density(w2, beta_i);
        const double lj_1 = target.tempered_log_density(w1, beta_j);
        sc.log_target_i[t - 1] = li_1;
        sc.log_target_j[t - 1] = lj_2;
        sc.log_weight[t - 1] = li_1 + lj_2;
        sc.log_target_i[t_len + t - 1] = li_2;
        sc.log_target_j[t_len + t - 1] = lj_1;
        sc.log_weight[t_len + t - 1] = li_2 + lj_1;
    }
    return sc;
}

// O(KT) recursive scores for FHMM targets. Consecutive candidates differ
// in a single column, so the prior and likelihood parts are carried
// incrementally: moving the cut from t-1 to t swaps column t between the
// two candidate matrices, changing two transition factors per row plus
// one emission factor. Boundary conventions: at t=1 the "transition into
// column 1" factor is the initial distribution; at t=T there is no
// outgoing transition factor.
inline CrossoverScores crossover_scores_fhmm(const BinaryMatrix& u, const BinaryMatrix& v,
                                             const FhmmModel& model, InverseTemperature beta_i,
                                             InverseTemperature beta_j) {
    model.check_shape(u);
    model.check_shape(v);
    const std::size_t t_len = model.num_cols();
    const std::size_t k_len = model.num_rows();
    const MarkovChainPrior& prior = model.prior;

    const std::vector<double> s_u = model.column_sums(u);
    const std::vector<double> s_v = model.column_sums(v);
    std::vector<double> ll_u(t_len), ll_v(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        ll_u[t] = emission_log_lik_s(model.emission, model.y[t], s_u[t]);
        ll_v[t] = emission_log_lik_s(model.emission, model.y[t], s_v[t]);
    }

    // Anchors: candidate "cut 0" states are u itself and v itself.
    double p1 = fhmm_log_prior(u, prior);  // prior of (v_1..v_t, u_{t+1}..), t = 0
    double l1 = 0.0;                       // likelihood of same
    double p2 = fhmm_log_prior(v, prior);  // prior of (u_1..u_t, v_{t+1}..), t = 0
    double l2 = 0.0;
    for (std::size_t t = 0; t < t_len; ++t) {
        l1 += ll_u[t];
        l2 += ll_v[t];
    }

    CrossoverScores sc;
    sc.log_weight.resize(2 * t_len);
    sc.log_target_i.resize(2 * t_len);
    sc.log_target_j.resize(2 * t_len);

    for (std::size_t t = 1; t <= t_len; ++t) {
        const std::size_t c = t - 1;  // 0-based column being swapped
        l1 += ll_v[c] - ll_u[c];
        l2 += ll_u[c] - ll_v[c];
        for (std::size_t k = 0; k < k_len; ++k) {
            const Bit uc = u(k, c);
            const Bit vc = v(k, c);
            if (uc != vc) {
                if (c == 0) {
                    p1 += prior.log_init(k, vc) - prior.log_init(k, uc);
                    p2 += prior.log_init(k, uc) - prior.log_init(k, vc);
                } else {
                    p1 += prior.log_trans(k, v(k, c - 1), vc) - prior.log_trans(k, v(k, c - 1), uc);
                    p2 += prior.log_trans(k, u(k, c - 1), uc) - prior.log_trans(k, u(k, c - 1), vc);
                }
                if (t < t_len) {
                    p1 += prior.log_trans(k, vc, u(k, c + 1)) - prior.log_trans(k, uc, u(k, c + 1));
                    p2 += prior.log_trans(k, uc, v(k, c + 1)) - prior.log_trans(k, vc, v(k, c + 1));
                }
            }
        }
        const double li_1 = p1 + beta_i.value() * l1;  // chain i holding (v-prefix, u-suffix)
        const double lj_2 = p2 + beta_j.value() * l2;
        const double li_2 = p2 + beta_i.value() * l2;  // flipped direction
        const double lj_1 = p1 + beta_j.value() * l1;
        sc.log_target_i[c] = li_1;
        sc.log_target_j[c] = lj_2;
        sc.log_weight[c] = li_1 + lj_2;
        sc.log_target_i[t_len + c] = li_2;
        sc.log_target_j[t_len + c] = lj_1;
        sc.log_weight[t_len + c] = li_2 + lj_1;
    }
    return sc;
}

namespace detail {

inline CrossoverScores crossover_scores(const BinarySequence& u, const BinarySequence& v,
                                        const TargetDensity<BinarySequence>& target,
                                        InverseTemperature bi, InverseTemperature bj) {
    return crossover_scores_generic(u, v, target, bi, bj);
}

inline CrossoverScores crossover_scores(const BinaryMatrix& u, const BinaryMatrix& v,
                                        const TargetDensity<BinaryMatrix>& target,
                                        InverseTemperature bi, InverseTemperature bj) {
    if (const auto* fhmm = dynamic_cast<const FhmmTarget*>(&target))
        return crossover_scores_fhmm(u, v, fhmm->model(), bi, bj);
    return crossover_scores_generic(u, v, target, bi, bj);
}

}  // namespace detail

// Normalized log-weights over the 2T crossover candidates, direct path.
template <class State>
LogWeightVector crossover_log_weights_generic(const State& u, const State& v,
                                              const TargetDensity<State>& target,
                                              InverseTemperature beta_i,
                                              InverseTemperature beta_j) {
    return LogWeightVector(crossover_scores_generic(u, v, target, beta_i, beta_j).log_weight)
        .normalize();
}

// Normalized log-weights via the O(KT) FHMM recursion.
inline LogWeightVector crossover_log_weights_fhmm(const BinaryMatrix& u, const BinaryMatrix& v,
                                                  const FhmmModel& model,
                                                  InverseTemperature beta_i,
                                                  InverseTemperature beta_j) {
    return LogWeightVector(crossover_scores_fhmm(u, v, model, beta_i, beta_j).log_weight)
        .normalize();
}

// Swap move: exchange full states with MH probability
// min(1, exp(l_i(x_j) + l_j(x_i) - l_i(x_i) - l_j(x_j))).
template <class State>
ExchangeRecord swap_move(TemperedEnsemble<State>& ens, std::size_t i, std::size_t j,
                         RngStream& rng, std::size_t iteration = 0) {
    ens.check_pair(i, j);
    ChainState<State>& ci = ens.chains[i];
    ChainState<State>& cj = ens.chains[j];
    const double li_xj = ens.log_target(i, cj.state);
    const double lj_xi = ens.log_target(j, ci.state);
    const double log_ratio = li_xj + lj_xi - ci.cached_log_target - cj.cached_log_target;
    const double u = rng.u01();
    const bool accept = u < std::exp(std::min(0.0, log_ratio));
    if (accept) {
        std::swap(ci.state, cj.state);
        ci.cached_log_target = li_xj;
        cj.cached_log_target = lj_xi;
    }
    return {iteration, i, j, ExchangeKind::Swap, accept, 0};
}

// One-point crossover proposal at a uniform cut, MH accepted. The
// proposal is symmetric, so no Hastings correction appears.
template <class State>
ExchangeRecord random_crossover_move(TemperedEnsemble<State>& ens, std::size_t i, std::size_t j,
                                     RngStream& rng, std::size_t iteration = 0) {
    ens.check_pair(i, j);
    ChainState<State>& ci = ens.chains[i];
    ChainState<State>& cj = ens.chains[j];
    const std::size_t t_len = state_length(ci.state);
    const std::size_t cut = 1 + rng.uniform_index(t_len);
    auto [zi, zj] = cross_at(ci.state, cj.state, cut);
    const double li_z = ens.log_target(i, zi);
    const double lj_z = ens.log_target(j, zj);
    const double log_ratio = li_z + lj_z - ci.cached_log_target - cj.cached_log_target;
    const double u = rng.u01();
    const bool accept = u < std::exp(std::min(0.0, log_ratio));
    if (accept) {
        ci.state = std::move(zi);
        cj.state = std::move(zj);
        ci.cached_log_target = li_z;
        cj.cached_log_target = lj_z;
    }
    return {iteration, i, j, ExchangeKind::RandomCrossover, accept, 0};
}

// Augmented auxiliary-variable crossover; a Gibbs move, always accepted.
// Records the chosen candidate index t0 in 1..2T.
template <class State>
ExchangeRecord augmented_crossover_move(TemperedEnsemble<State>& ens, std::size_t i,
                                        std::size_t j, RngStream& rng,
                                        std::size_t iteration = 0) {
    ens.check_pair(i, j);
    ChainState<State>& ci = ens.chains[i];
    ChainState<State>& cj = ens.chains[j];
    const std::size_t t_len = state_length(ci.state);

    // Step 1: auxiliary (u, v) uniform over CR(x_i, x_j) u CR(x_j, x_i);
    // the coin picks the direction of the crossover.
    const std::size_t cut = 1 + rng.uniform_index(t_len);
    const bool flipped_aux = rng.u01() < 0.5;
    auto [first, second] = cross_at(ci.state, cj.state, cut);
    State& aux_u = flipped_aux ? second : first;
    State& aux_v = flipped_aux ? first : second;

    // Step 2: Gibbs draw over the 2T crossovers of (u, v).
    CrossoverScores sc = detail::crossover_scores(aux_u, aux_v, *ens.target, ens.betas[i],
                                                  ens.betas[j]);
    LogWeightVector lw{sc.log_weight};
    lw.normalize();
    const std::size_t idx = lw.sample_index(rng.u01());

    const std::size_t chosen_cut = (idx < t_len ? idx : idx - t_len) + 1;
    auto [c1, c2] = cross_at(aux_u, aux_v, chosen_cut);
    if (idx < t_len) {
        ci.state = std::move(c1);
        cj.state = std::move(c2);
    } else {
        ci.state = std::move(c2);
        cj.state = std::move(c1);
    }
    ci.cached_log_target = sc.log_target_i[idx];
    cj.cached_log_target = sc.log_target_j[idx];
    return {iteration, i, j, ExchangeKind::AugmentedCrossover, true, idx + 1};
}

template <class State>
ExchangeRecord apply_exchange_move(TemperedEnsemble<State>& ens, ExchangeKind kind,
                                   std::size_t i, std::size_t j, RngStream& rng,
                                   std::size_t iteration) {
    switch (kind) {
        case ExchangeKind::Swap: return swap_move(ens, i, j, rng, iteration);
        case ExchangeKind::RandomCrossover:
            return random_crossover_move(ens, i, j, rng, iteration);
        case ExchangeKind::AugmentedCrossover:
            return augmented_crossover_move(ens, i, j, rng, iteration);
        case ExchangeKind::None: break;
    }
    throw std::invalid_argument("apply_exchange_move: no move for ExchangeKind::None");
}

template <class State>
struct PtOptions {
    std::vector<double> betas{1.0};
    SamplerConfig sampler;
    ExchangeKind exchange = ExchangeKind::None;
    std::size_t exchange_period = 10;
    std::size_t n_iterations = 0;
    std::size_t thin = 1;
    std::uint64_t run_seed = 0;
    std::vector<State> init;  // one state per chain
};

namespace detail {

inline BinaryMatrix as_stored(const BinarySequence& s) { return BinaryMatrix::from_row(s); }
inline BinaryMatrix as_stored(const BinaryMatrix& m) { return m; }

template <class State>
void pt_sweep_chain(ChainState<State>& chain, const SamplerConfig& cfg,
                    const TargetDensity<State>& target, InverseTemperature beta) {
    if constexpr (std::is_same_v<State, BinaryMatrix>) {
        const auto* fhmm = dynamic_cast<const FhmmTarget*>(&target);
        if (fhmm == nullptr)
            throw std::invalid_argument("pt_run: matrix chains require an FHMM target");
        chain_sweep(chain, cfg, *fhmm, beta);
    } else {
        chain_sweep(chain, cfg, target, beta);
    }
}

}  // namespace detail

// Run the tempered ensemble: every chain performs one within-chain sweep
// per iteration; every exchange_period-th iteration an exchange move is
// applied to an adjacent-temperature pair (round-robin when there are
// more than two chains). Iteration 0 records the initial state.
template <class State>
TraceStore pt_run(const TargetDensity<State>& target, const PtOptions<State>& opt) {
    const std::vector<InverseTemperature> betas = make_beta_ladder(opt.betas);
    const std::size_t n_chains = betas.size();
    if (opt.init.size() != n_chains)
        throw std::invalid_argument("pt_run: need one initial state per chain");
    if (opt.thin == 0) throw std::invalid_argument("pt_run: thin must be >= 1");
    if (opt.exchange != ExchangeKind::None && opt.exchange_period == 0)
        throw std::invalid_argument("pt_run: exchange_period must be >= 1");

    TemperedEnsemble<State> ens;
    ens.target = &target;
    ens.betas = betas;
    ens.chains.reserve(n_chains);
    for (std::size_t c = 0; c < n_chains; ++c) {
        RngStream rng(derive_seed(opt.run_seed, stream::kChain, c));
        ens.chains.push_back(ChainState<State>{
            opt.init[c], target.tempered_log_density(opt.init[c], betas[c]), std::move(rng)});
    }
    RngStream exchange_rng(derive_seed(opt.run_seed, stream::kExchange));

    TraceStore trace;
    trace.n_chains = n_chains;
    trace.n_iterations = opt.n_iterations;
    trace.thin = opt.thin;
    trace.seed = opt.run_seed;
    for (const InverseTemperature& b : betas) trace.betas.push_back(b.value());
    trace.log_posterior.assign(n_chains, {});
    for (std::size_t c = 0; c < n_chains; ++c) {
        trace.log_posterior[c].reserve(opt.n_iterations + 1);
        trace.log_posterior[c].push_back(ens.chains[c].cached_log_target);
    }
    trace.states.push_back({0, detail::as_stored(ens.chains[0].state)});

    std::size_t pair_cursor = 0;
    for (std::size_t n = 1; n <= opt.n_iterations; ++n) {
        for (std::size_t c = 0; c < n_chains; ++c)
            detail::pt_sweep_chain(ens.chains[c], opt.sampler, target, betas[c]);

        if (opt.exchange != ExchangeKind::None && n_chains >= 2 &&
            n % opt.exchange_period == 0) {
            const std::size_t i = pair_cursor % (n_chains - 1);
            pair_cursor++;
            trace.exchanges.push_back(
                apply_exchange_move(ens, opt.exchange, i, i + 1, exchange_rng, n));
        }

        for (std::size_t c = 0; c < n_chains; ++c)
            trace.log_posterior[c].push_back(ens.chains[c].cached_log_target);
        if (n % opt.thin == 0)
            trace.states.push_back({n, detail::as_stored(ens.chains[0].state)});
    }
    return trace;
}

}  // namespace aemcmc
