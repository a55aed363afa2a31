#pragma once

// Log-space weight handling: max-shift log-sum-exp and categorical
// sampling from normalized log-weights.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace aemcmc {

inline double log_sum_exp(const std::vector<double>& logs) {
    if (logs.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    const double m = *std::max_element(logs.begin(), logs.end());
    if (!std::isfinite(m)) {
        // all -inf (or a NaN/inf slipped in); let the caller's guards handle it
        return m;
    }
    double sum = 0.0;
    for (double v : logs) sum += std::exp(v - m);
    return m + std::log(sum);
}

// Vector of log-weights over crossover candidates (length 2T in the
// augmented move). Normalization is max-shift; exp of the normalized
// values sums to 1 within 1e-12.
class LogWeightVector {
  public:
    explicit LogWeightVector(std::vector<double> log_weights) : values_(std::move(log_weights)) {
        if (values_.empty()) throw std::invalid_argument("LogWeightVector: empty");
        for (double v : values_)
            if (std::isnan(v)) throw std::invalid_argument("LogWeightVector: NaN log-weight");
    }

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }

    LogWeightVector& normalize() {
        const double lse = log_sum_exp(values_);
        if (!std::isfinite(lse))
            throw std::invalid_argument("LogWeightVector: cannot normalize, all weights are zero");
        for (double& v : values_) v -= lse;
        return *this;
    }

    // Inverse-CDF draw given u in [0,1). Assumes normalized values; ties
    // and fp slack resolve to the lowest admissible index.
    std::size_t sample_index(double u) const {
        double cum = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            cum += std::exp(values_[i]);
            if (u < cum) return i;
        }
        return values_.size() - 1;
    }

  private:
    std::vector<double> values_;
};

}  // namespace aemcmc
