#include "ncma/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ncma {

ChannelModel parse_channel_model(const std::string& name) {
    if (name == "fixed-phase") return ChannelModel::FixedPhase;
    if (name == "rayleigh-block") return ChannelModel::RayleighBlock;
    throw std::invalid_argument("unknown channel model: " + name);
}

const char* channel_model_name(ChannelModel m) {
    return m == ChannelModel::FixedPhase ? "fixed-phase" : "rayleigh-block";
}

std::vector<double> bpsk_map(const BitVec& bits) {
    std::vector<double> x(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) x[i] = bits[i] ? -1.0 : 1.0;
    return x;
}

namespace {

void fill_gains(std::vector<cplx>& h, const ChannelConfig& cfg, double snr_db,
                std::size_t frame_len, std::mt19937_64& rng) {
    h.resize(frame_len);
    const double p = 2.0 * cfg.sigma2 * db_to_linear(snr_db);  // E|h|^2
    if (cfg.model == ChannelModel::FixedPhase) {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        const cplx g = std::polar(std::sqrt(p), phase(rng));
        for (auto& v : h) v = g;
    } else {
        std::normal_distribution<double> gauss(0.0, std::sqrt(p / 2.0));
        const unsigned blk = cfg.block_len ? cfg.block_len : 1;
        cplx g(1.0, 0.0);
        for (std::size_t k = 0; k < frame_len; ++k) {
            if (k % blk == 0) g = cplx(gauss(rng), gauss(rng));
            h[k] = g;
        }
    }
}

}  // namespace

ChannelUse draw_channel(const ChannelConfig& cfg, std::size_t frame_len,
                        bool two_user, std::mt19937_64& rng) {
    if (cfg.sigma2 <= 0.0)
        throw std::invalid_argument("draw_channel: sigma2 must be positive");
    ChannelUse ch;
    ch.sigma2 = cfg.sigma2;
    ch.noiseless = cfg.noiseless;
    fill_gains(ch.gain_a, cfg, cfg.snr_a_db, frame_len, rng);
    if (two_user) fill_gains(ch.gain_b, cfg, cfg.snr_b_db, frame_len, rng);
    return ch;
}

std::vector<cplx> transmit(const std::vector<double>& xa,
                           const std::vector<double>& xb,
                           const ChannelUse& ch, std::mt19937_64& rng) {
    if (xa.size() != ch.gain_a.size())
        throw std::invalid_argument("transmit: user A frame/gain length mismatch");
    if (xb.size() != ch.gain_b.size())
        throw std::invalid_argument("transmit: user B frame/gain length mismatch");

    std::vector<cplx> y(xa.size());
    std::normal_distribution<double> gauss(0.0, std::sqrt(ch.sigma2));
    for (std::size_t k = 0; k < y.size(); ++k) {
        cplx v = ch.gain_a[k] * xa[k];
        if (!xb.empty()) v += ch.gain_b[k] * xb[k];
        if (!ch.noiseless) v += cplx(gauss(rng), gauss(rng));
        y[k] = v;
    }
    return y;
}

}  // namespace ncma
