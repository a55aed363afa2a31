#pragma once

// Target density interface and inverse temperatures. Targets are
// immutable after construction and shareable read-only across chains.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aemcmc/binary.hpp"

namespace aemcmc {

// beta = 1/T_k, 0 < beta <= 1. beta = 1 is the untempered target.
class InverseTemperature {
  public:
    explicit InverseTemperature(double beta) : beta_(beta) {
        if (!(beta > 0.0) || beta > 1.0)
            throw std::invalid_argument("InverseTemperature: beta must be in (0, 1]");
    }
    double value() const { return beta_; }

    friend bool operator==(InverseTemperature a, InverseTemperature b) = default;

  private:
    double beta_;
};

// A ladder must start at exactly 1.0 and be strictly decreasing.
inline std::vector<InverseTemperature> make_beta_ladder(const std::vector<double>& betas) {
    if (betas.empty()) throw std::invalid_argument("beta ladder: empty");
    if (betas.front() != 1.0) throw std::invalid_argument("beta ladder: first beta must be 1.0");
    std::vector<InverseTemperature> out;
    out.reserve(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (i > 0 && !(betas[i] < betas[i - 1]))
            throw std::invalid_argument("beta ladder: must be strictly decreasing");
        out.emplace_back(betas[i]);
    }
    return out;
}

// Unnormalized log-density over a binary state space. log_density is
// pure. The default tempering raises the whole density to beta; targets
// with a prior/likelihood split (FHMM) override tempered_log_density to
// temper the likelihood only.
template <class State>
class TargetDensity {
  public:
    virtual ~TargetDensity() = default;

    virtual double log_density(const State& state) const = 0;

    virtual double tempered_log_density(const State& state, InverseTemperature beta) const {
        if (beta.value() == 1.0) return log_density(state);
        return beta.value() * log_density(state);
    }

    // Tempered log-density change from flipping one entry, used by
    // single-site samplers. Position is (index) for sequences. Targets
    // with local structure override this with an O(block) computation.
    virtual double tempered_flip_delta(const State& state, std::size_t position,
                                       InverseTemperature beta) const {
        State flipped = state;
        flip_position(flipped, position);
        return tempered_log_density(flipped, beta) - tempered_log_density(state, beta);
    }

  private:
    static void flip_position(BinarySequence& s, std::size_t i) { s.flip(i); }
    static void flip_position(BinaryMatrix& m, std::size_t i) {
        m.set(i / m.cols(), i % m.cols(), static_cast<Bit>(1 - m(i / m.cols(), i % m.cols())));
    }
};

template <class State>
double tempered_log_density(const TargetDensity<State>& target, InverseTemperature beta,
                            const State& state) {
    return target.tempered_log_density(state, beta);
}

}  // namespace aemcmc
