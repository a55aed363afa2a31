#pragma once

// Binary state containers (sequences and K x T matrices) plus the
// one-point crossover primitives every exchange move is built from.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aemcmc {

using Bit = std::uint8_t;

namespace detail {

inline void check_bit(Bit b) {
    if (b > 1) throw std::invalid_argument("binary state entries must be 0 or 1");
}

}  // namespace detail

// Fixed-length vector of {0,1}. Length is set at construction; only the
// bit values may change afterwards.
class BinarySequence {
  public:
    explicit BinarySequence(std::size_t length, Bit fill = 0) : bits_(length, fill) {
        if (length == 0) throw std::invalid_argument("BinarySequence: length must be >= 1");
        detail::check_bit(fill);
    }
    explicit BinarySequence(std::vector<Bit> bits) : bits_(std::move(bits)) {
        if (bits_.empty()) throw std::invalid_argument("BinarySequence: length must be >= 1");
        for (Bit b : bits_) detail::check_bit(b);
    }
    BinarySequence(std::initializer_list<int> bits) {
        if (bits.size() == 0) throw std::invalid_argument("BinarySequence: length must be >= 1");
        bits_.reserve(bits.size());
        for (int b : bits) {
            if (b != 0 && b != 1) throw std::invalid_argument("binary state entries must be 0 or 1");
            bits_.push_back(static_cast<Bit>(b));
        }
    }

    std::size_t size() const { return bits_.size(); }
    Bit operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, Bit b) {
        detail::check_bit(b);
        bits_.at(i) = b;
    }
    void flip(std::size_t i) { bits_.at(i) ^= 1; }

    const std::vector<Bit>& bits() const { return bits_; }

    std::string to_string() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    friend bool operator==(const BinarySequence& a, const BinarySequence& b) = default;

  private:
    std::vector<Bit> bits_;
};

// K x T binary matrix, row-major, one byte per entry. Rows are latent
// chains, columns are time. Dimensions are fixed after construction.
class BinaryMatrix {
  public:
    BinaryMatrix(std::size_t rows, std::size_t cols, Bit fill = 0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("BinaryMatrix: dimensions must be >= 1");
        detail::check_bit(fill);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    Bit operator()(std::size_t k, std::size_t t) const { return data_[k * cols_ + t]; }
    void set(std::size_t k, std::size_t t, Bit b) {
        detail::check_bit(b);
        if (k >= rows_ || t >= cols_) throw std::out_of_range("BinaryMatrix: index out of range");
        data_[k * cols_ + t] = b;
    }
    void set_unchecked(std::size_t k, std::size_t t, Bit b) { data_[k * cols_ + t] = b; }

    // Column t as a K-bit vector.
    std::vector<Bit> column(std::size_t t) const {
        if (t >= cols_) throw std::out_of_range("BinaryMatrix: column out of range");
        std::vector<Bit> col(rows_);
        for (std::size_t k = 0; k < rows_; ++k) col[k] = data_[k * cols_ + t];
        return col;
    }

    BinarySequence row(std::size_t k) const {
        if (k >= rows_) throw std::out_of_range("BinaryMatrix: row out of range");
        return BinarySequence(
            std::vector<Bit>(data_.begin() + static_cast<std::ptrdiff_t>(k * cols_),
                             data_.begin() + static_cast<std::ptrdiff_t>((k + 1) * cols_)));
    }
    void set_row(std::size_t k, const BinarySequence& r) {
        if (k >= rows_) throw std::out_of_range("BinaryMatrix: row out of range");
        if (r.size() != cols_) throw std::invalid_argument("BinaryMatrix: row length mismatch");
        for (std::size_t t = 0; t < cols_; ++t) data_[k * cols_ + t] = r[t];
    }

    const std::vector<Bit>& data() const { return data_; }

    static BinaryMatrix from_row(const BinarySequence& r) {
        BinaryMatrix m(1, r.size());
        m.data_ = r.bits();
        return m;
    }

    // Overwrite the leading t columns of every row from src.
    void copy_column_prefix(const BinaryMatrix& src, std::size_t t) {
        for (std::size_t k = 0; k < rows_; ++k)
            std::copy_n(src.data_.begin() + static_cast<std::ptrdiff_t>(k * cols_),
                        static_cast<std::ptrdiff_t>(t),
                        data_.begin() + static_cast<std::ptrdiff_t>(k * cols_));
    }

    friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) = default;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Bit> data_;
};

inline std::size_t hamming_distance(const BinarySequence& a, const BinarySequence& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
    return d;
}

inline std::size_t hamming_distance(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("hamming_distance: shape mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) d += (a.data()[i] != b.data()[i]);
    return d;
}

// One-point crossover at cut t (1-based, 1 <= t <= T):
//   u = (y_1..y_t, x_{t+1}..x_T),  v = (x_1..x_t, y_{t+1}..y_T).
// Re-applying at the same t recovers the original pair.
inline std::pair<BinarySequence, BinarySequence> crossover_point(const BinarySequence& x,
                                                                 const BinarySequence& y,
                                                                 std::size_t t) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("crossover_point: length mismatch");
    if (t < 1 || t > n) throw std::invalid_argument("crossover_point: cut out of range");
    const auto cut = static_cast<std::ptrdiff_t>(t);
    std::vector<Bit> u, v;
    u.reserve(n);
    v.reserve(n);
    u.insert(u.end(), y.bits().begin(), y.bits().begin() + cut);
    u.insert(u.end(), x.bits().begin() + cut, x.bits().end());
    v.insert(v.end(), x.bits().begin(), x.bits().begin() + cut);
    v.insert(v.end(), y.bits().begin() + cut, y.bits().end());
    return {BinarySequence(std::move(u)), BinarySequence(std::move(v))};
}

// Row-wise one-point crossover of matrices: every row is crossed at the
// same cut, i.e. the leading t columns are exchanged as a block.
inline std::pair<BinaryMatrix, BinaryMatrix> crossover_matrix(const BinaryMatrix& xa,
                                                              const BinaryMatrix& xb,
                                                              std::size_t t) {
    if (xa.rows() != xb.rows() || xa.cols() != xb.cols())
        throw std::invalid_argument("crossover_matrix: shape mismatch");
    const std::size_t cols = xa.cols();
    if (t < 1 || t > cols) throw std::invalid_argument("crossover_matrix: cut out of range");
    BinaryMatrix ua = xa, vb = xb;
    ua.copy_column_prefix(xb, t);
    vb.copy_column_prefix(xa, t);
    return {std::move(ua), std::move(vb)};
}

// Uniform crossover interface used by state-generic ensemble code.
inline std::pair<BinarySequence, BinarySequence> cross_at(const BinarySequence& a,
                                                          const BinarySequence& b,
                                                          std::size_t t) {
    return crossover_point(a, b, t);
}
inline std::pair<BinaryMatrix, BinaryMatrix> cross_at(const BinaryMatrix& a,
                                                      const BinaryMatrix& b, std::size_t t) {
    return crossover_matrix(a, b, t);
}

inline std::size_t state_length(const BinarySequence& s) { return s.size(); }
inline std::size_t state_length(const BinaryMatrix& m) { return m.cols(); }
inline std::size_t state_dim(const BinarySequence& s) { return s.size(); }
inline std::size_t state_dim(const BinaryMatrix& m) { return m.size(); }

}  // namespace aemcmc
