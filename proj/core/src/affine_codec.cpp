#include "remest/affine_codec.hpp"

#include <cmath>
#include <stdexcept>

namespace remest {

CodecParams CodecParams::from_band(const IntervalMoments& positive_band,
                                   const ChannelParams& channel) {
    if (!(positive_band.variance > 0.0)) {
        throw std::invalid_argument("codec band must have positive conditional variance");
    }
    if (!(channel.power > 0.0) || !(channel.snr > 0.0)) {
        throw std::invalid_argument("channel power and snr must be positive");
    }
    return {std::sqrt(channel.power / positive_band.variance), positive_band.mean,
            channel.snr};
}

double encode(double x, Sign s, const CodecParams& codec) {
    const double sr = to_real(s);
    return sr * codec.gain * (x - sr * codec.offset);
}

double decode(double y_tilde, Sign s, const CodecParams& codec) {
    const double sr = to_real(s);
    const double shrink = codec.snr / (codec.snr + 1.0);
    return sr * (shrink / codec.gain) * y_tilde + sr * codec.offset;
}

double noisy_channel_mse(double conditional_variance, double snr) {
    return conditional_variance / (1.0 + snr);
}

double expected_sq_error(double x, const CodecParams& codec, double noise_variance) {
    const double centered = std::abs(x) - codec.offset;
    const double denom = (codec.snr + 1.0) * (codec.snr + 1.0);
    return centered * centered / denom +
           codec.snr * codec.snr * noise_variance / (codec.gain * codec.gain * denom);
}

} // namespace remest
