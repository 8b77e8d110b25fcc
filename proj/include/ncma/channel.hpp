#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ncma/convcode.hpp"

namespace ncma {

using cplx = std::complex<double>;

enum class ChannelModel { FixedPhase, RayleighBlock };

ChannelModel parse_channel_model(const std::string& name);  // throws on unknown
const char* channel_model_name(ChannelModel m);

// Per-frame channel state: one complex gain per coded bit and user.
// gain_b is empty for a single-user frame.  sigma2 is the noise variance
// per complex dimension; per-user SNR is |h_u|^2 / (2 * sigma2).
struct ChannelUse {
    std::vector<cplx> gain_a;
    std::vector<cplx> gain_b;
    double sigma2 = 0.5;
    bool noiseless = false;

    bool two_user() const { return !gain_b.empty(); }
};

struct ChannelConfig {
    double snr_a_db = 10.0;
    double snr_b_db = 10.0;
    ChannelModel model = ChannelModel::FixedPhase;
    unsigned block_len = 16;  // gains per draw for the Rayleigh block model
    bool noiseless = false;
    double sigma2 = 0.5;
};

// BPSK: bit 0 -> +1, bit 1 -> -1.
std::vector<double> bpsk_map(const BitVec& bits);

// Draws per-frame gains.  FixedPhase: |h_u| = sqrt(2 * sigma2 * snr_lin),
// constant over the frame, phase uniform per user per frame.
// RayleighBlock: independent CN(0, 2 * sigma2 * snr_lin) gain per block of
// block_len coded bits, so the average SNR matches the configured value.
ChannelUse draw_channel(const ChannelConfig& cfg, std::size_t frame_len,
                        bool two_user, std::mt19937_64& rng);

// y[k] = hA[k] xA[k] + hB[k] xB[k] + n[k], n circular complex Gaussian
// with variance sigma2 per dimension.  xb must be empty exactly when the
// channel is single-user.  Throws std::invalid_argument on length
// mismatches.
std::vector<cplx> transmit(const std::vector<double>& xa,
                           const std::vector<double>& xb,
                           const ChannelUse& ch, std::mt19937_64& rng);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace ncma
