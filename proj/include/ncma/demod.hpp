#pragma once

#include <cstdint>
#include <vector>

#include "ncma/channel.hpp"

namespace ncma {

// All soft outputs share one convention: positive means bit 0 (BPSK +1).

// Matched filter for a single-user (or interference-as-noise) observation.
double single_user_soft(cplx y, cplx h);

// Reduced-constellation XOR demodulation.  The four superposed points
// split into the XOR-0 class {hA+hB, -hA-hB} and the XOR-1 class
// {hA-hB, -hA+hB}; only the nearest point of each class is kept, which
// collapses to one of four dot-product cases.
double pnc_soft(cplx y, cplx hA, cplx hB);

// Reduced-constellation per-user demodulation; same nearest-point rule
// applied per user bit.
struct MudSoft {
    double a = 0.0;
    double b = 0.0;
};
MudSoft rmud_soft(cplx y, cplx hA, cplx hB);

// Affine quantizer to 8 bits: clamp(v / hmax2 * alpha + 0.5, 0, 1) * 255,
// rounded half-up.  hmax2 is the frame-level normalizer below.
struct QuantizerParams {
    double alpha = 0.228;
    double hmax2 = 1.0;
};
std::uint8_t quantize_soft(double v, const QuantizerParams& q);
std::vector<std::uint8_t> quantize_frame(const std::vector<double>& soft,
                                         const QuantizerParams& q);

// Normalizers: XOR path uses max_k min(|hA|^2, |hB|^2); a native path uses
// max_k |h_u|^2.
double hmax2_pnc(const ChannelUse& ch);
double hmax2_user(const ChannelUse& ch, int user);  // 0 = A, 1 = B

}  // namespace ncma
