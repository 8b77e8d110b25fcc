#include "ncma/gf.hpp"

#include <stdexcept>
#include <string>

namespace ncma {

unsigned default_primitive_poly(unsigned s) {
    switch (s) {
        case 2: return 0x7;    // x^2 + x + 1
        case 3: return 0xB;    // x^3 + x + 1
        case 4: return 0x13;   // x^4 + x + 1
        case 5: return 0x25;   // x^5 + x^2 + 1
        case 6: return 0x43;   // x^6 + x + 1
        case 7: return 0x89;   // x^7 + x^3 + 1
        case 8: return 0x11D;  // x^8 + x^4 + x^3 + x^2 + 1
        default:
            throw std::invalid_argument("default_primitive_poly: s must be in [2,8]");
    }
}

GaloisField::GaloisField(unsigned s) : GaloisField(s, default_primitive_poly(s)) {}

GaloisField::GaloisField(unsigned s, unsigned primitive_poly)
    : s_(s), poly_(primitive_poly) {
    if (s < 2 || s > 8)
        throw std::invalid_argument("GaloisField: s must be in [2,8]");
    if ((poly_ >> s_) != 1u)
        throw std::invalid_argument("GaloisField: polynomial degree must equal s");

    const unsigned n = nonzero_count();
    exp_.assign(2 * n, 0);
    log_.assign(order(), -1);

    unsigned v = 1;
    for (unsigned k = 0; k < n; ++k) {
        exp_[k] = static_cast<std::uint8_t>(v);
        if (log_[v] >= 0)  // cycle shorter than N: x is not primitive here
            throw std::invalid_argument("GaloisField: x is not primitive for this polynomial");
        log_[v] = static_cast<int>(k);
        v <<= 1;  // multiply by x
        if (v & order()) v ^= poly_;
    }
    for (unsigned k = 0; k < n; ++k) exp_[n + k] = exp_[k];
}

std::uint8_t GaloisField::mul(std::uint8_t a, std::uint8_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[static_cast<unsigned>(log_[a]) + static_cast<unsigned>(log_[b])];
}

std::uint8_t GaloisField::inv(std::uint8_t a) const {
    if (a == 0) throw std::invalid_argument("GaloisField::inv: zero has no inverse");
    const unsigned n = nonzero_count();
    return exp_[(n - static_cast<unsigned>(log_[a])) % n];
}

std::uint8_t GaloisField::pow(std::uint8_t a, unsigned e) const {
    if (a == 0) return e == 0 ? 1 : 0;
    const unsigned n = nonzero_count();
    return exp_[(static_cast<unsigned>(log_[a]) * (e % n)) % n];
}

std::uint8_t GaloisField::alpha(unsigned i) const {
    if (i < 1 || i > nonzero_count())
        throw std::invalid_argument("GaloisField::alpha: index out of range [1, N]");
    return exp_[i % nonzero_count()];
}

GfMatrix gf_identity(std::size_t n) {
    GfMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

GfMatrix gf_product(const GaloisField& gf, const GfMatrix& a, const GfMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("gf_product: inner dimensions differ");
    GfMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const std::uint8_t aik = a.at(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c.at(i, j) ^= gf.mul(aik, b.at(k, j));
        }
    return c;
}

std::vector<std::uint8_t> generator_row(const GaloisField& gf, unsigned index,
                                        std::size_t len) {
    if (index < 1 || index > gf.nonzero_count())
        throw std::invalid_argument("generator_row: index out of range [1, N]");
    std::vector<std::uint8_t> row(len);
    const std::uint8_t a = gf.alpha(index);
    std::uint8_t v = 1;
    for (std::size_t j = 0; j < len; ++j) {
        row[j] = v;
        v = gf.mul(v, a);
    }
    return row;
}

GfMatrix gf_invert(const GaloisField& gf, const GfMatrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("gf_invert: matrix is not square");
    const std::size_t n = m.rows();
    GfMatrix a = m;
    GfMatrix inv = gf_identity(n);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a.at(pivot, col) == 0) ++pivot;
        if (pivot == n)
            throw std::runtime_error("gf_invert: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a.at(pivot, j), a.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        }
        const std::uint8_t scale = gf.inv(a.at(col, col));
        for (std::size_t j = 0; j < n; ++j) {
            a.at(col, j) = gf.mul(a.at(col, j), scale);
            inv.at(col, j) = gf.mul(inv.at(col, j), scale);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const std::uint8_t f = a.at(r, col);
            if (f == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a.at(r, j) ^= gf.mul(f, a.at(col, j));
                inv.at(r, j) ^= gf.mul(f, inv.at(col, j));
            }
        }
    }
    return inv;
}

std::size_t gf_rank(const GaloisField& gf, GfMatrix m) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        std::size_t pivot = rank;
        while (pivot < m.rows() && m.at(pivot, col) == 0) ++pivot;
        if (pivot == m.rows()) continue;
        if (pivot != rank)
            for (std::size_t j = 0; j < m.cols(); ++j)
                std::swap(m.at(pivot, j), m.at(rank, j));
        const std::uint8_t scale = gf.inv(m.at(rank, col));
        for (std::size_t j = 0; j < m.cols(); ++j)
            m.at(rank, j) = gf.mul(m.at(rank, j), scale);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == rank) continue;
            const std::uint8_t f = m.at(r, col);
            if (f == 0) continue;
            for (std::size_t j = 0; j < m.cols(); ++j)
                m.at(r, j) ^= gf.mul(f, m.at(rank, j));
        }
        ++rank;
    }
    return rank;
}

}  // namespace ncma
