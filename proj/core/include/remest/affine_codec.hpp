#pragma once

#include "remest/densities.hpp"

namespace remest {

/// Transmit power budget and signal-to-noise ratio of the noisy channel.
struct ChannelParams {
    double power = 1.0; // E[Y^2] budget
    double snr = 1.0;   // power / noise variance

    double noise_variance() const { return power / snr; }
};

enum class Sign : int { negative = -1, positive = +1 };

inline Sign sign_of(double x) { return x < 0.0 ? Sign::negative : Sign::positive; }
inline double to_real(Sign s) { return static_cast<double>(static_cast<int>(s)); }

/// Piecewise-affine encoder/decoder pair for one transmission region.
/// With the sign side channel active the codec mirrors across zero:
///   encode(x, s) = s * gain * (x - s * offset)
///   decode(y, s) = s * (1/gain) * (snr/(snr+1)) * y + s * offset
/// offset = 0 recovers the plain affine codec without a side channel.
struct CodecParams {
    double gain = 1.0;   // normalizes the conditional input law to full power
    double offset = 0.0; // conditional mean of the positive transmission band
    double snr = 1.0;

    /// Codec matched to a positive-side transmission band, running at full
    /// power: gain = sqrt(power / band variance).
    static CodecParams from_band(const IntervalMoments& positive_band,
                                 const ChannelParams& channel);
};

double encode(double x, Sign s, const CodecParams& codec);
double decode(double y_tilde, Sign s, const CodecParams& codec);

/// Minimum mean squared error of the affine scheme over a region with the
/// given conditional variance: variance / (1 + snr).
double noisy_channel_mse(double conditional_variance, double snr);

/// Exact expected squared error at a fixed input x, averaged over the noise:
/// (|x| - offset)^2/(snr+1)^2 + snr^2 * noise_variance/(gain^2 (snr+1)^2).
double expected_sq_error(double x, const CodecParams& codec, double noise_variance);

} // namespace remest
