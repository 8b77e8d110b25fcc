#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ncma {

// Default primitive polynomial for GF(2^s).  Index by s, 2 <= s <= 8.
// 0x11D is x^8 + x^4 + x^3 + x^2 + 1.
unsigned default_primitive_poly(unsigned s);

// Arithmetic over GF(2^s) with log/antilog tables.  The generator g = x
// (value 2) must be primitive for the chosen polynomial, which holds for
// every polynomial returned by default_primitive_poly().
class GaloisField {
public:
    explicit GaloisField(unsigned s = 8);
    GaloisField(unsigned s, unsigned primitive_poly);

    unsigned bits() const { return s_; }
    unsigned order() const { return 1u << s_; }
    // Number of nonzero elements, N = 2^s - 1.  Also the number of usable
    // generator row indices.
    unsigned nonzero_count() const { return order() - 1; }
    unsigned primitive_poly() const { return poly_; }

    static std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }
    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const;
    std::uint8_t inv(std::uint8_t a) const;  // throws std::invalid_argument on 0
    std::uint8_t pow(std::uint8_t a, unsigned e) const;
    // i-th nonzero element g^i, defined for 1 <= i <= N.  Distinct for
    // distinct i in that range (g^N wraps to 1).
    std::uint8_t alpha(unsigned i) const;

private:
    unsigned s_ = 0;
    unsigned poly_ = 0;
    std::vector<std::uint8_t> exp_;  // exp_[k] = g^k for k in [0, 2N)
    std::vector<int> log_;           // log_[v] for v in [1, 2^s)
};

// Dense matrix of field elements, row-major.
class GfMatrix {
public:
    GfMatrix() = default;
    GfMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint8_t& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::uint8_t at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    bool operator==(const GfMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> data_;
};

GfMatrix gf_identity(std::size_t n);
GfMatrix gf_product(const GaloisField& gf, const GfMatrix& a, const GfMatrix& b);

// Row i of the systematic-free generator: [1, a_i, a_i^2, ..., a_i^{len-1}]
// with a_i the i-th nonzero element.  1 <= index <= N.
std::vector<std::uint8_t> generator_row(const GaloisField& gf, unsigned index,
                                        std::size_t len);

// Gauss-Jordan inverse.  Throws std::runtime_error on a singular input.
GfMatrix gf_invert(const GaloisField& gf, const GfMatrix& m);

// Rank via row elimination; used by tests and sanity checks.
std::size_t gf_rank(const GaloisField& gf, GfMatrix m);

}  // namespace ncma
