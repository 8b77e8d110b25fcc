#include "ncma/demod.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ncma {

namespace {

inline double dot(cplx a, cplx b) {  // Re(conj(a) * b)
    return a.real() * b.real() + a.imag() * b.imag();
}

}  // namespace

double single_user_soft(cplx y, cplx h) { return dot(h, y); }

double pnc_soft(cplx y, cplx hA, cplx hB) {
    // Nearest XOR-0 point: hA+hB vs -hA-hB differ only in the sign of the
    // sum, so the comparison is a projection sign.
    const bool zero_plus = dot(hA + hB, y) >= 0.0;  // hA+hB nearer than -hA-hB
    const bool one_plus = dot(hB - hA, y) >= 0.0;   // -hA+hB nearer than hA-hB
    if (zero_plus)
        return one_plus ? dot(hA, y - hB)    // {hA+hB} vs {-hA+hB}
                        : dot(hB, y - hA);   // {hA+hB} vs {hA-hB}
    return one_plus ? -dot(hB, y + hA)       // {-hA-hB} vs {-hA+hB}
                    : -dot(hA, y + hB);      // {-hA-hB} vs {hA-hB}
}

MudSoft rmud_soft(cplx y, cplx hA, cplx hB) {
    // Class selectors: for user A the +1 class is {hA+hB, hA-hB} and the
    // two in-class comparisons reduce to projections on hB.
    const bool a_plus_b = dot(hB, y - hA) >= 0.0;   // hA+hB nearer than hA-hB
    const bool a_minus_b = dot(hB, y + hA) >= 0.0;  // -hA+hB nearer than -hA-hB
    const bool b_plus_a = dot(hA, y - hB) >= 0.0;   // hA+hB nearer than -hA+hB
    const bool b_minus_a = dot(hA, y + hB) >= 0.0;  // hA-hB nearer than -hA-hB

    MudSoft s;
    if (a_plus_b)
        s.a = a_minus_b ? dot(hA, y - hB)       // {hA+hB} vs {-hA+hB}
                        : dot(hA + hB, y);      // {hA+hB} vs {-hA-hB}
    else
        s.a = a_minus_b ? dot(hA - hB, y)       // {hA-hB} vs {-hA+hB}
                        : dot(hA, y + hB);      // {hA-hB} vs {-hA-hB}
    if (b_plus_a)
        s.b = b_minus_a ? dot(hB, y - hA)       // {hA+hB} vs {hA-hB}
                        : dot(hA + hB, y);      // {hA+hB} vs {-hA-hB}
    else
        s.b = b_minus_a ? dot(hB - hA, y)       // {-hA+hB} vs {hA-hB}
                        : dot(hB, y + hA);      // {-hA+hB} vs {-hA-hB}
    return s;
}

std::uint8_t quantize_soft(double v, const QuantizerParams& q) {
    if (q.hmax2 <= 0.0)
        throw std::invalid_argument("quantize_soft: hmax2 must be positive");
    const double u = std::clamp(v / q.hmax2 * q.alpha + 0.5, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(u * 255.0 + 0.5));
}

std::vector<std::uint8_t> quantize_frame(const std::vector<double>& soft,
                                         const QuantizerParams& q) {
    std::vector<std::uint8_t> out(soft.size());
    for (std::size_t i = 0; i < soft.size(); ++i) out[i] = quantize_soft(soft[i], q);
    return out;
}

double hmax2_pnc(const ChannelUse& ch) {
    if (!ch.two_user())
        throw std::invalid_argument("hmax2_pnc: channel is single-user");
    double m = 0.0;
    for (std::size_t k = 0; k < ch.gain_a.size(); ++k)
        m = std::max(m, std::min(std::norm(ch.gain_a[k]), std::norm(ch.gain_b[k])));
    return m;
}

double hmax2_user(const ChannelUse& ch, int user) {
    const auto& h = user == 0 ? ch.gain_a : ch.gain_b;
    if (h.empty()) throw std::invalid_argument("hmax2_user: no gains for user");
    double m = 0.0;
    for (const auto& v : h) m = std::max(m, std::norm(v));
    return m;
}

}  // namespace ncma
