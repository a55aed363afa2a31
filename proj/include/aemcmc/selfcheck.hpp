#pragma once

// Compact oracle/invariant suite behind the `check` CLI subcommand:
// exact-kernel invariance of the exchange moves on enumerable instances,
// recursion-vs-direct weight equivalence, and sampler spot checks against
// enumeration. Everything here runs in a few seconds.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "aemcmc/binary.hpp"
#include "aemcmc/diagnostics.hpp"
#include "aemcmc/ensemble.hpp"
#include "aemcmc/fhmm.hpp"
#include "aemcmc/samplers.hpp"
#include "aemcmc/toy.hpp"

namespace aemcmc::selfcheck {

inline BinarySequence sequence_from_index(std::size_t idx, std::size_t t_len) {
    BinarySequence x(t_len, 0);
    for (std::size_t i = 0; i < t_len; ++i) x.set(i, (idx >> i) & 1u);
    return x;
}

inline BinaryMatrix matrix_from_index(std::size_t idx, std::size_t k_len, std::size_t t_len) {
    BinaryMatrix x(k_len, t_len, 0);
    for (std::size_t b = 0; b < k_len * t_len; ++b)
        x.set_unchecked(b / t_len, b % t_len, (idx >> b) & 1u);
    return x;
}

// Normalized probabilities of every state under the tempered target.
template <class State, class Enumerate>
std::vector<double> exact_distribution(const TargetDensity<State>& target,
                                       InverseTemperature beta, std::size_t n_states,
                                       Enumerate state_of) {
    std::vector<double> logs(n_states);
    for (std::size_t s = 0; s < n_states; ++s)
        logs[s] = target.tempered_log_density(state_of(s), beta);
    const double lse = log_sum_exp(logs);
    std::vector<double> probs(n_states);
    for (std::size_t s = 0; s < n_states; ++s) probs[s] = std::exp(logs[s] - lse);
    return probs;
}

// Exact transition kernel of the augmented crossover move over the
// product space, built by enumerating every auxiliary path (cut x coin)
// and every candidate, using the move's own weight computation. Returns
// max |pi Q - pi| against the exact product target.
template <class State, class Enumerate>
double augmented_kernel_invariance_gap(const TargetDensity<State>& target,
                                       InverseTemperature beta_i, InverseTemperature beta_j,
                                       std::size_t n_states, std::size_t t_len,
                                       Enumerate state_of) {
    const std::vector<double> pi_i = exact_distribution(target, beta_i, n_states, state_of);
    const std::vector<double> pi_j = exact_distribution(target, beta_j, n_states, state_of);

    const auto bits_key = [&](const State& s) {
        std::size_t key = 0, b = 0;
        if constexpr (std::is_same_v<State, BinarySequence>) {
            for (std::size_t i = 0; i < s.size(); ++i) key |= std::size_t{s[i]} << b++;
        } else {
            for (std::size_t k = 0; k < s.rows(); ++k)
                for (std::size_t t = 0; t < s.cols(); ++t) key |= std::size_t{s(k, t)} << b++;
        }
        return key;
    };

    std::vector<double> pi_pair(n_states * n_states);
    for (std::size_t a = 0; a < n_states; ++a)
        for (std::size_t b = 0; b < n_states; ++b) pi_pair[a * n_states + b] = pi_i[a] * pi_j[b];

    std::vector<double> pi_q(n_states * n_states, 0.0);
    for (std::size_t a = 0; a < n_states; ++a) {
        const State xa = state_of(a);
        for (std::size_t b = 0; b < n_states; ++b) {
            const State xb = state_of(b);
            const double mass = pi_pair[a * n_states + b];
            for (std::size_t cut = 1; cut <= t_len; ++cut) {
                for (int coin = 0; coin < 2; ++coin) {
                    auto [first, second] = cross_at(xa, xb, cut);
                    const State& u = coin ? second : first;
                    const State& v = coin ? first : second;
                    CrossoverScores sc =
                        detail::crossover_scores(u, v, target, beta_i, beta_j);
                    LogWeightVector lw{sc.log_weight};
                    lw.normalize();
                    for (std::size_t idx = 0; idx < 2 * t_len; ++idx) {
                        const std::size_t c = (idx < t_len ? idx : idx - t_len) + 1;
                        auto [z1, z2] = cross_at(u, v, c);
                        const State& zi = idx < t_len ? z1 : z2;
                        const State& zj = idx < t_len ? z2 : z1;
                        const double p = std::exp(lw.values()[idx]) / (2.0 * t_len);
                        pi_q[bits_key(zi) * n_states + bits_key(zj)] += mass * p;
                    }
                }
            }
        }
    }

    double gap = 0.0;
    for (std::size_t p = 0; p < pi_pair.size(); ++p)
        gap = std::max(gap, std::abs(pi_q[p] - pi_pair[p]));
    return gap;
}

// Detailed-balance gap of the swap / random-crossover MH kernels on the
// product target: max |pi(x)Q(x,z) - pi(z)Q(z,x)| over proposed moves.
template <class State, class Enumerate, class BitsKey>
double mh_exchange_balance_gap(const TargetDensity<State>& target, InverseTemperature beta_i,
                               InverseTemperature beta_j, std::size_t n_states,
                               std::size_t t_len, Enumerate state_of, BitsKey bits_key,
                               bool swap_only) {
    const std::vector<double> pi_i = exact_distribution(target, beta_i, n_states, state_of);
    const std::vector<double> pi_j = exact_distribution(target, beta_j, n_states, state_of);
    const auto l_i = [&](const State& s) { return target.tempered_log_density(s, beta_i); };
    const auto l_j = [&](const State& s) { return target.tempered_log_density(s, beta_j); };

    double gap = 0.0;
    for (std::size_t a = 0; a < n_states; ++a) {
        const State xa = state_of(a);
        for (std::size_t b = 0; b < n_states; ++b) {
            const State xb = state_of(b);
            const std::size_t n_cuts = swap_only ? 1 : t_len;
            for (std::size_t cut = 1; cut <= n_cuts; ++cut) {
                const auto [zi, zj] =
                    swap_only ? std::pair<State, State>{xb, xa} : cross_at(xa, xb, cut);
                const double fwd = std::exp(
                    std::min(0.0, l_i(zi) + l_j(zj) - l_i(xa) - l_j(xb)));
                const double bwd = std::exp(
                    std::min(0.0, l_i(xa) + l_j(xb) - l_i(zi) - l_j(zj)));
                const double flow_fwd =
                    pi_i[a] * pi_j[b] * fwd / static_cast<double>(n_cuts);
                const double flow_bwd = pi_i[bits_key(zi)] * pi_j[bits_key(zj)] * bwd /
                                        static_cast<double>(n_cuts);
                gap = std::max(gap, std::abs(flow_fwd - flow_bwd));
            }
        }
    }
    return gap;
}

struct CheckReport {
    int passed = 0;
    int failed = 0;

    void record(std::ostream& os, const std::string& name, bool ok,
                const std::string& detail = "") {
        os << (ok ? "[ ok ] " : "[FAIL] ") << name;
        if (!detail.empty()) os << " (" << detail << ")";
        os << "\n";
        (ok ? passed : failed)++;
    }
    bool all_passed() const { return failed == 0; }
};

// Run the compact oracle/invariant suite; returns true when everything
// passes.
inline bool run_selfcheck(std::ostream& os) {
    CheckReport report;
    RngStream rng(20240901);

    {
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const std::size_t t_len = 2 + rng.uniform_index(12);
            BinarySequence x(t_len), y(t_len);
            for (std::size_t i = 0; i < t_len; ++i) {
                x.set(i, rng.bernoulli(0.5));
                y.set(i, rng.bernoulli(0.5));
            }
            for (std::size_t cut = 1; cut <= t_len; ++cut) {
                const auto [u, v] = crossover_point(x, y, cut);
                const auto [x2, y2] = crossover_point(u, v, cut);
                ok = ok && x2 == x && y2 == y;
            }
        }
        report.record(os, "one-point crossover is an involution at fixed cut", ok);
    }

    {
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            std::vector<double> logs(1 + rng.uniform_index(40));
            for (double& v : logs) v = -500.0 + 1000.0 * rng.u01();
            LogWeightVector lw(logs);
            lw.normalize();
            double sum = 0.0;
            for (double v : lw.values()) sum += std::exp(v);
            ok = std::abs(sum - 1.0) <= 1e-12;
        }
        report.record(os, "log-weight normalization sums to 1 within 1e-12", ok);
    }

    {
        const ToyBlockTarget toy = ToyBlockTarget::equal_blocks(4, 2, {0.01, 0.03});
        const double gap = augmented_kernel_invariance_gap<BinarySequence>(
            toy, InverseTemperature(1.0), InverseTemperature(0.2), 16, 4,
            [](std::size_t s) { return sequence_from_index(s, 4); });
        report.record(os, "augmented crossover kernel preserves toy product target",
                      gap < 1e-12, "max gap " + std::to_string(gap));
    }

    {
        RngStream drng(7);
        std::vector<double> y(6);
        for (double& v : y) v = drng.normal(5.0, 3.0);
        const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.9),
                              AdditiveGaussianEmission({0.4, 0.6}, 10.0, 1.5), y);
        const FhmmTarget target(model);
        double max_gap = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            BinaryMatrix u(2, 6), v(2, 6);
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t t = 0; t < 6; ++t) {
                    u.set_unchecked(k, t, drng.bernoulli(0.5));
                    v.set_unchecked(k, t, drng.bernoulli(0.5));
                }
            const InverseTemperature bi(1.0), bj(0.3);
            const LogWeightVector fast = crossover_log_weights_fhmm(u, v, model, bi, bj);
            const LogWeightVector slow = crossover_log_weights_generic(u, v, target, bi, bj);
            for (std::size_t i = 0; i < fast.size(); ++i)
                max_gap = std::max(max_gap,
                                   std::abs(fast.values()[i] - slow.values()[i]));
        }
        report.record(os, "FHMM crossover-weight recursion matches direct evaluation",
                      max_gap < 1e-8, "max log gap " + std::to_string(max_gap));
    }

    {
        const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.8),
                              AdditiveGaussianEmission({0.45, 0.55}, 4.0, 1.0),
                              {1.9, 0.3, 4.1});
        const FhmmTarget target(model);
        const double gap = augmented_kernel_invariance_gap<BinaryMatrix>(
            target, InverseTemperature(1.0), InverseTemperature(0.2), 64, 3,
            [](std::size_t s) { return matrix_from_index(s, 2, 3); });
        report.record(os, "augmented crossover kernel preserves FHMM product target",
                      gap < 1e-12, "max gap " + std::to_string(gap));
    }

    {
        const ToyBlockTarget toy = ToyBlockTarget::equal_blocks(4, 2, {0.02, 0.05});
        const auto state_of = [](std::size_t s) { return sequence_from_index(s, 4); };
        const auto key = [](const BinarySequence& s) {
            std::size_t k = 0;
            for (std::size_t i = 0; i < s.size(); ++i) k |= std::size_t{s[i]} << i;
            return k;
        };
        const double gap_swap = mh_exchange_balance_gap<BinarySequence>(
            toy, InverseTemperature(1.0), InverseTemperature(0.2), 16, 4, state_of, key, true);
        const double gap_rcr = mh_exchange_balance_gap<BinarySequence>(
            toy, InverseTemperature(1.0), InverseTemperature(0.2), 16, 4, state_of, key, false);
        report.record(os, "swap and random-crossover kernels satisfy detailed balance",
                      gap_swap < 1e-10 && gap_rcr < 1e-10);
    }

    {
        // FFBS row draw vs exact conditional by enumeration (K=2, T=3).
        const FhmmModel model(MarkovChainPrior::homogeneous(2, 0.7),
                              AdditiveGaussianEmission({0.35, 0.65}, 5.0, 2.0),
                              {2.0, 4.8, 0.4});
        const InverseTemperature beta(1.0);
        BinaryMatrix base(2, 3, 0);
        base.set(1, 0, 1);
        base.set(1, 2, 1);
        std::vector<double> exact(8);
        {
            std::vector<double> logs(8);
            for (std::size_t r = 0; r < 8; ++r) {
                BinaryMatrix x = base;
                for (std::size_t t = 0; t < 3; ++t) x.set(0, t, (r >> t) & 1u);
                logs[r] = fhmm_log_posterior(x, model, beta);
            }
            const double lse = log_sum_exp(logs);
            for (std::size_t r = 0; r < 8; ++r) exact[r] = std::exp(logs[r] - lse);
        }
        const std::size_t n_draws = 20000;
        std::vector<std::size_t> counts(8, 0);
        RngStream srng(99);
        for (std::size_t d = 0; d < n_draws; ++d) {
            BinaryMatrix x = base;
            ffbs_row_conditional(x, 0, model, beta, srng);
            std::size_t r = 0;
            for (std::size_t t = 0; t < 3; ++t) r |= std::size_t{x(0, t)} << t;
            counts[r]++;
        }
        bool ok = true;
        for (std::size_t r = 0; r < 8; ++r) {
            const double p = exact[r];
            const double se = std::sqrt(p * (1 - p) / n_draws);
            const double phat = static_cast<double>(counts[r]) / n_draws;
            ok = ok && std::abs(phat - p) <= 4 * se + 1e-9;
        }
        report.record(os, "FF-BS row draw matches exact conditional (4 SE, 2e4 draws)", ok);
    }

    return report.all_passed();
}

}  // namespace aemcmc::selfcheck
