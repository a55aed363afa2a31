#pragma once

// Trace post-processing: per-block nearest-mode labeling and jump counts
// for the toy target, lagged Hamming statistics, and log-posterior
// summaries. All functions are pure views over a completed TraceStore.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "aemcmc/binary.hpp"
#include "aemcmc/toy.hpp"
#include "aemcmc/trace.hpp"

namespace aemcmc {

// Per-block labels: 1 = nearer the all-ones mode, 0 = nearer all-zeros.
struct ModeLabel {
    std::vector<Bit> labels;

    friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

// Nearest-mode label per block; exact ties keep the previous label (or
// fall to mode2 = all-zeros when there is none).
inline ModeLabel mode_label(const BinarySequence& x, const ToyBlockTarget& target,
                            const ModeLabel* previous = nullptr) {
    if (x.size() != target.length())
        throw std::invalid_argument("mode_label: state length mismatch");
    if (previous != nullptr && previous->labels.size() != target.num_blocks())
        throw std::invalid_argument("mode_label: previous label has wrong block count");
    ModeLabel out;
    out.labels.resize(target.num_blocks());
    for (std::size_t j = 0; j < target.num_blocks(); ++j) {
        const Block& b = target.blocks()[j];
        std::size_t zeros = 0;
        for (std::size_t i = b.begin; i < b.end; ++i) zeros += (x[i] == 0);
        const std::size_t ones = b.length() - zeros;
        // d(block, all-ones) = zeros, d(block, all-zeros) = ones
        if (zeros < ones)
            out.labels[j] = 1;
        else if (zeros > ones)
            out.labels[j] = 0;
        else
            out.labels[j] = previous ? previous->labels[j] : Bit{0};
    }
    return out;
}

struct ModeJumpStats {
    std::vector<std::size_t> iterations;  // recorded iterations, ascending
    std::vector<std::size_t> cumulative;  // cumulative jump count per record
    std::size_t total_jumps = 0;
    std::size_t distinct_labels = 0;      // distinct nearest-mode label vectors
    std::size_t distinct_exact_modes = 0; // distinct modes hit exactly
};

// A jump is a change of the nearest-mode label vector between consecutive
// recorded states of chain 0.
inline ModeJumpStats count_mode_jumps(const TraceStore& trace, const ToyBlockTarget& target) {
    ModeJumpStats stats;
    std::set<std::vector<Bit>> seen_labels;
    std::set<std::vector<Bit>> seen_exact;
    std::optional<ModeLabel> prev;
    for (const StoredState& rec : trace.states) {
        if (rec.state.rows() != 1)
            throw std::invalid_argument("count_mode_jumps: expected sequence states");
        const BinarySequence x = rec.state.row(0);
        const ModeLabel label = mode_label(x, target, prev ? &*prev : nullptr);
        if (prev && !(label == *prev)) stats.total_jumps++;
        stats.iterations.push_back(rec.iteration);
        stats.cumulative.push_back(stats.total_jumps);
        seen_labels.insert(label.labels);
        // exact hit: every block constant and equal to its label
        bool exact = true;
        for (std::size_t j = 0; exact && j < target.num_blocks(); ++j) {
            const Block& b = target.blocks()[j];
            for (std::size_t i = b.begin; i < b.end; ++i)
                if (x[i] != label.labels[j]) {
                    exact = false;
                    break;
                }
        }
        if (exact) seen_exact.insert(label.labels);
        prev = label;
    }
    stats.distinct_labels = seen_labels.size();
    stats.distinct_exact_modes = seen_exact.size();
    return stats;
}

struct ExchangeModeVisits {
    std::size_t accepted_exchanges = 0;
    std::size_t distinct_labels = 0;  // distinct modes delivered to chain 0
};

// Distinct nearest-mode labels of the chain-0 state right after accepted
// exchange moves, i.e. the modes the exchange mechanism itself visited.
// Requires every iteration to be recorded (thin = 1).
inline ExchangeModeVisits count_exchange_mode_visits(const TraceStore& trace,
                                                     const ToyBlockTarget& target) {
    std::map<std::size_t, std::size_t> index_of;
    for (std::size_t i = 0; i < trace.states.size(); ++i)
        index_of[trace.states[i].iteration] = i;
    ExchangeModeVisits out;
    std::set<std::vector<Bit>> seen;
    for (const ExchangeRecord& rec : trace.exchanges) {
        if (!rec.accepted || (rec.chain_i != 0 && rec.chain_j != 0)) continue;
        const auto it = index_of.find(rec.iteration);
        if (it == index_of.end())
            throw std::invalid_argument(
                "count_exchange_mode_visits: exchange iteration not recorded");
        out.accepted_exchanges++;
        const BinarySequence x = trace.states[it->second].state.row(0);
        seen.insert(mode_label(x, target).labels);
    }
    out.distinct_labels = seen.size();
    return out;
}

struct LagStat {
    std::size_t lag;
    std::vector<double> values;  // d(X^(n), X^(n+lag)) / dim(X), per available n
};

inline std::vector<LagStat> hamming_lag_stats(const TraceStore& trace,
                                              const std::vector<std::size_t>& lags) {
    std::map<std::size_t, std::size_t> index_of;  // iteration -> states index
    for (std::size_t i = 0; i < trace.states.size(); ++i)
        index_of[trace.states[i].iteration] = i;
    std::vector<LagStat> out;
    out.reserve(lags.size());
    for (std::size_t lag : lags) {
        LagStat stat{lag, {}};
        for (const StoredState& rec : trace.states) {
            const auto it = index_of.find(rec.iteration + lag);
            if (it == index_of.end()) continue;
            const BinaryMatrix& a = rec.state;
            const BinaryMatrix& b = trace.states[it->second].state;
            stat.values.push_back(static_cast<double>(hamming_distance(a, b)) /
                                  static_cast<double>(state_dim(a)));
        }
        out.push_back(std::move(stat));
    }
    return out;
}

struct LogPosteriorSummary {
    std::vector<std::vector<double>> series;       // per chain, raw
    std::vector<std::vector<double>> running_max;  // per chain, non-decreasing
};

inline LogPosteriorSummary log_posterior_summary(const TraceStore& trace) {
    LogPosteriorSummary out;
    out.series = trace.log_posterior;
    out.running_max.reserve(trace.log_posterior.size());
    for (const std::vector<double>& s : trace.log_posterior) {
        std::vector<double> rm;
        rm.reserve(s.size());
        double best = -std::numeric_limits<double>::infinity();
        for (double v : s) {
            best = std::max(best, v);
            rm.push_back(best);
        }
        out.running_max.push_back(std::move(rm));
    }
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace aemcmc
