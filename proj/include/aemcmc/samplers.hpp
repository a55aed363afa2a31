#pragma once

// Within-chain MCMC kernels: systematic-scan single-site Gibbs for
// sequence targets, per-row conditional FF-BS for FHMM matrices, and the
// Hamming Ball auxiliary scheme. Each kernel returns the change in the
// chain's tempered log-density so callers can maintain a cached value.

#include <array>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aemcmc/binary.hpp"
#include "aemcmc/fhmm.hpp"
#include "aemcmc/logspace.hpp"
#include "aemcmc/rng.hpp"
#include "aemcmc/target.hpp"
#include "aemcmc/toy.hpp"

namespace aemcmc {

enum class SamplerKind { SingleSiteGibbs, RowGibbsFFBS, HammingBall };

struct SamplerConfig {
    SamplerKind kind = SamplerKind::SingleSiteGibbs;
    std::size_t hb_radius = 1;
};

template <class State>
struct ChainState {
    State state;
    double cached_log_target;  // tempered log-density at the chain's own beta
    RngStream rng;
};

namespace detail {

inline double sigmoid(double log_odds) {
    if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
    const double e = std::exp(log_odds);
    return e / (1.0 + e);
}

}  // namespace detail

// Exact full conditional p(x_t = 1 | x_{-t}) under the tempered target.
inline double single_site_conditional_p1(const BinarySequence& x, std::size_t t,
                                         const TargetDensity<BinarySequence>& target,
                                         InverseTemperature beta) {
    const double flip_delta = target.tempered_flip_delta(x, t, beta);
    return detail::sigmoid(x[t] ? -flip_delta : flip_delta);
}

// One systematic sweep over positions 1..T, each bit drawn from its exact
// tempered full conditional. Returns the total tempered log-density change.
inline double single_site_gibbs_sweep(BinarySequence& x,
                                      const TargetDensity<BinarySequence>& target,
                                      InverseTemperature beta, RngStream& rng) {
    double delta_total = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double flip_delta = target.tempered_flip_delta(x, t, beta);
        const double p1 = detail::sigmoid(x[t] ? -flip_delta : flip_delta);
        const Bit b = rng.bernoulli(p1) ? Bit{1} : Bit{0};
        if (b != x[t]) {
            x.set(t, b);
            delta_total += flip_delta;
        }
    }
    return delta_total;
}

namespace detail {

inline double beta_emission(const FhmmModel& model, InverseTemperature beta, std::size_t t,
                            double s) {
    return beta.value() * emission_log_lik_s(model.emission, model.y[t], s);
}

}  // namespace detail

// Exact draw of row k from p(x_{k,1:T} | X_{-k}, y, beta) by forward
// filtering / backward sampling over the 2-state row chain. Filtering is
// done in log-space with per-step max normalization. Returns the tempered
// log-posterior change.
inline double ffbs_row_conditional(BinaryMatrix& x, std::size_t k, const FhmmModel& model,
                                   InverseTemperature beta, RngStream& rng) {
    model.check_shape(x);
    if (k >= model.num_rows())
        throw std::invalid_argument("ffbs_row_conditional: row index out of range");
    if (model.is_fixed(k))
        throw std::invalid_argument("ffbs_row_conditional: row is fixed");

    const std::size_t t_len = model.num_cols();
    const double wk = model.weights()[k];
    const MarkovChainPrior& prior = model.prior;

    // Column sums with row k removed.
    std::vector<double> s_minus = model.column_sums(x);
    for (std::size_t t = 0; t < t_len; ++t)
        if (x(k, t)) s_minus[t] -= wk;

    // Tempered emission factors for both candidate bits.
    std::vector<std::array<double, 2>> g(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        g[t][0] = detail::beta_emission(model, beta, t, s_minus[t]);
        g[t][1] = detail::beta_emission(model, beta, t, s_minus[t] + wk);
    }

    std::vector<std::array<double, 2>> la(t_len);
    la[0][0] = prior.log_init(k, 0) + g[0][0];
    la[0][1] = prior.log_init(k, 1) + g[0][1];
    for (std::size_t t = 1; t < t_len; ++t) {
        const double m = std::max(la[t - 1][0], la[t - 1][1]);
        la[t - 1][0] -= m;
        la[t - 1][1] -= m;
        for (int b = 0; b < 2; ++b) {
            const double from0 = la[t - 1][0] + prior.log_trans(k, 0, static_cast<Bit>(b));
            const double from1 = la[t - 1][1] + prior.log_trans(k, 1, static_cast<Bit>(b));
            const double hi = std::max(from0, from1);
            la[t][b] = g[t][b] +
                       (std::isfinite(hi)
                            ? hi + std::log(std::exp(from0 - hi) + std::exp(from1 - hi))
                            : hi);
        }
    }

    const auto draw_bit = [&rng](double l0, double l1) -> Bit {
        const double m = std::max(l0, l1);
        const double p1 = std::exp(l1 - m) / (std::exp(l0 - m) + std::exp(l1 - m));
        return rng.bernoulli(p1) ? Bit{1} : Bit{0};
    };

    std::vector<Bit> new_row(t_len);
    new_row[t_len - 1] = draw_bit(la[t_len - 1][0], la[t_len - 1][1]);
    for (std::size_t t = t_len - 1; t-- > 0;) {
        const Bit nxt = new_row[t + 1];
        new_row[t] = draw_bit(la[t][0] + prior.log_trans(k, 0, nxt),
                              la[t][1] + prior.log_trans(k, 1, nxt));
    }

    // Tempered log-posterior delta: row-k prior change plus tempered
    // emission change (other rows' terms cancel).
    double delta = 0.0;
    delta += prior.log_init(k, new_row[0]) - prior.log_init(k, x(k, 0));
    for (std::size_t t = 1; t < t_len; ++t)
        delta += prior.log_trans(k, new_row[t - 1], new_row[t]) -
                 prior.log_trans(k, x(k, t - 1), x(k, t));
    for (std::size_t t = 0; t < t_len; ++t) delta += g[t][new_row[t]] - g[t][x(k, t)];

    for (std::size_t t = 0; t < t_len; ++t) x.set_unchecked(k, t, new_row[t]);
    return delta;
}

namespace detail {

// Bitmasks over the free (non-fixed) rows with popcount <= r, i.e. the
// Hamming ball offsets. Enumerated per call; K is small in practice.
struct HbSpace {
    std::vector<std::size_t> free_rows;
    std::vector<std::uint32_t> masks;
};

inline HbSpace hb_space(const FhmmModel& model, std::size_t radius) {
    if (radius < 1 || radius > model.num_rows())
        throw std::invalid_argument("hamming_ball_step: radius must satisfy 1 <= r <= K");
    HbSpace sp;
    for (std::size_t k = 0; k < model.num_rows(); ++k)
        if (!model.is_fixed(k)) sp.free_rows.push_back(k);
    const std::size_t kf = sp.free_rows.size();
    if (kf > 20) throw std::length_error("hamming_ball_step: more than 20 free rows");
    for (std::uint32_t c = 0; c < (std::uint32_t{1} << kf); ++c)
        if (static_cast<std::size_t>(std::popcount(c)) <= radius) sp.masks.push_back(c);
    return sp;
}

inline std::uint32_t hb_column_code(const BinaryMatrix& x, std::size_t t,
                                    const std::vector<std::size_t>& free_rows) {
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < free_rows.size(); ++i)
        if (x(free_rows[i], t)) c |= (std::uint32_t{1} << i);
    return c;
}

}  // namespace detail

// Count of column states inside a radius-r Hamming ball over the free rows.
inline std::size_t hamming_ball_size(const FhmmModel& model, std::size_t radius) {
    return detail::hb_space(model, radius).masks.size();
}

// Auxiliary-variable Hamming Ball step: draw u_t uniformly from the ball
// around each column, then run exact FF-BS over the per-column restricted
// spaces {z : d(z, u_t) <= r}. Fixed rows stay pinned to 1 throughout.
// Returns the tempered log-posterior change.
inline double hamming_ball_step(BinaryMatrix& x, std::size_t radius, const FhmmModel& model,
                                InverseTemperature beta, RngStream& rng) {
    model.check_shape(x);
    const detail::HbSpace sp = detail::hb_space(model, radius);
    const std::size_t t_len = model.num_cols();
    const std::size_t kf = sp.free_rows.size();
    const std::size_t m_count = sp.masks.size();
    const MarkovChainPrior& prior = model.prior;
    const std::vector<double>& w = model.weights();

    double s_fixed = 0.0;
    for (std::size_t k : model.fixed_rows) s_fixed += w[k];

    const auto s_of_code = [&](std::uint32_t c) {
        double s = s_fixed;
        for (std::size_t i = 0; i < kf; ++i)
            if (c & (std::uint32_t{1} << i)) s += w[sp.free_rows[i]];
        return s;
    };
    const auto log_init_code = [&](std::uint32_t c) {
        double lp = 0.0;
        for (std::size_t i = 0; i < kf; ++i)
            lp += prior.log_init(sp.free_rows[i], (c >> i) & 1u);
        return lp;
    };
    const auto log_trans_code_slow = [&](std::uint32_t a, std::uint32_t b) {
        double lp = 0.0;
        for (std::size_t i = 0; i < kf; ++i)
            lp += prior.log_trans(sp.free_rows[i], (a >> i) & 1u, (b >> i) & 1u);
        return lp;
    };
    // pairwise column-transition table; the pair loop below is the hot path
    std::vector<double> trans_table;
    const bool use_table = kf <= 8;
    if (use_table) {
        const std::size_t n_codes = std::size_t{1} << kf;
        trans_table.resize(n_codes * n_codes);
        for (std::uint32_t a = 0; a < n_codes; ++a)
            for (std::uint32_t b = 0; b < n_codes; ++b)
                trans_table[(std::size_t{a} << kf) | b] = log_trans_code_slow(a, b);
    }
    const auto log_trans_code = [&](std::uint32_t a, std::uint32_t b) {
        return use_table ? trans_table[(std::size_t{a} << kf) | b] : log_trans_code_slow(a, b);
    };

    const double old_lp = fhmm_log_posterior(x, model, beta);

    // Step 1: auxiliary column u_t uniform on the ball around x_t.
    std::vector<std::uint32_t> u_code(t_len);
    for (std::size_t t = 0; t < t_len; ++t)
        u_code[t] = detail::hb_column_code(x, t, sp.free_rows) ^
                    sp.masks[rng.uniform_index(m_count)];

    // Step 2: forward filter over the restricted column spaces.
    std::vector<std::vector<double>> la(t_len, std::vector<double>(m_count));
    for (std::size_t m = 0; m < m_count; ++m) {
        const std::uint32_t z = u_code[0] ^ sp.masks[m];
        la[0][m] = log_init_code(z) + detail::beta_emission(model, beta, 0, s_of_code(z));
    }
    std::vector<double> scratch(m_count);
    for (std::size_t t = 1; t < t_len; ++t) {
        double mx = la[t - 1][0];
        for (std::size_t m = 1; m < m_count; ++m) mx = std::max(mx, la[t - 1][m]);
        for (std::size_t m = 0; m < m_count; ++m) la[t - 1][m] -= mx;
        for (std::size_t m = 0; m < m_count; ++m) {
            const std::uint32_t z = u_code[t] ^ sp.masks[m];
            for (std::size_t mp = 0; mp < m_count; ++mp)
                scratch[mp] = la[t - 1][mp] + log_trans_code(u_code[t - 1] ^ sp.masks[mp], z);
            la[t][m] = detail::beta_emission(model, beta, t, s_of_code(z)) +
                       log_sum_exp(scratch);
        }
    }

    // Backward sampling.
    std::vector<std::uint32_t> chosen(t_len);
    {
        LogWeightVector lw(la[t_len - 1]);
        chosen[t_len - 1] = u_code[t_len - 1] ^ sp.masks[lw.normalize().sample_index(rng.u01())];
    }
    for (std::size_t t = t_len - 1; t-- > 0;) {
        for (std::size_t m = 0; m < m_count; ++m)
            scratch[m] = la[t][m] + log_trans_code(u_code[t] ^ sp.masks[m], chosen[t + 1]);
        LogWeightVector lw(scratch);
        chosen[t] = u_code[t] ^ sp.masks[lw.normalize().sample_index(rng.u01())];
    }
    for (std::size_t t = 0; t < t_len; ++t)
        assert(static_cast<std::size_t>(std::popcount(chosen[t] ^ u_code[t])) <= radius);

    for (std::size_t t = 0; t < t_len; ++t)
        for (std::size_t i = 0; i < kf; ++i)
            x.set_unchecked(sp.free_rows[i], t, (chosen[t] >> i) & 1u);

    return fhmm_log_posterior(x, model, beta) - old_lp;
}

// One full sweep for a sequence chain.
inline void chain_sweep(ChainState<BinarySequence>& chain, const SamplerConfig& cfg,
                        const TargetDensity<BinarySequence>& target, InverseTemperature beta) {
    if (cfg.kind != SamplerKind::SingleSiteGibbs)
        throw std::invalid_argument("chain_sweep: sampler kind incompatible with sequence state");
    chain.cached_log_target += single_site_gibbs_sweep(chain.state, target, beta, chain.rng);
}

// One full sweep for an FHMM matrix chain: all non-fixed rows in ascending
// order (FF-BS) or a single Hamming Ball step.
inline void chain_sweep(ChainState<BinaryMatrix>& chain, const SamplerConfig& cfg,
                        const FhmmTarget& target, InverseTemperature beta) {
    const FhmmModel& model = target.model();
    switch (cfg.kind) {
        case SamplerKind::RowGibbsFFBS: {
            double delta = 0.0;
            for (std::size_t k = 0; k < model.num_rows(); ++k)
                if (!model.is_fixed(k))
                    delta += ffbs_row_conditional(chain.state, k, model, beta, chain.rng);
            chain.cached_log_target += delta;
            break;
        }
        case SamplerKind::HammingBall:
            chain.cached_log_target +=
                hamming_ball_step(chain.state, cfg.hb_radius, model, beta, chain.rng);
            break;
        case SamplerKind::SingleSiteGibbs:
            throw std::invalid_argument("chain_sweep: sampler kind incompatible with matrix state");
    }
}

}  // namespace aemcmc
