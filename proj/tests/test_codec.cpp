#include <doctest.h>

#include <cmath>

#include "remest/affine_codec.hpp"
#include "remest/rng.hpp"

#include "oracles.hpp"

using namespace remest;

TEST_CASE("encode cancels the conditional-mean offset") {
    const CodecParams codec{2.0, 1.5, 1.0};
    CHECK(encode(1.5, Sign::positive, codec) == 0.0);
    CHECK(encode(-1.5, Sign::negative, codec) == 0.0);
    const CodecParams identity{1.0, 0.0, 1.0};
    CHECK(encode(2.0, Sign::positive, identity) == 2.0);
}

TEST_CASE("decode applies the snr shrinkage") {
    const CodecParams codec{1.0, 0.0, 1.0};
    CHECK(decode(0.0, Sign::positive, codec) == 0.0);
    CHECK(decode(2.0, Sign::positive, codec) == doctest::Approx(1.0));

    const CodecParams near_noiseless{1.0, 0.7, 1e9};
    for (double x : {0.9, 2.4, 7.0}) {
        const double y = encode(x, Sign::positive, near_noiseless);
        CHECK(decode(y, Sign::positive, near_noiseless) == doctest::Approx(x).epsilon(1e-6));
    }
}

TEST_CASE("mse formula") {
    CHECK(noisy_channel_mse(2.0, 1.0) == doctest::Approx(1.0));
    CHECK(noisy_channel_mse(0.0, 3.0) == 0.0);
    CHECK(noisy_channel_mse(1.0, 1.0) == doctest::Approx(0.5));
}

namespace {

/// Draws X | X in (a, b) for a Laplace source through the inverse cdf.
double conditional_laplace_draw(double rate, double a, double b, RngStream& rng) {
    const double fa = oracle::laplace_cdf(rate, a);
    const double fb = oracle::laplace_cdf(rate, b);
    return oracle::laplace_quantile(rate, fa + (fb - fa) * rng.next_uniform());
}

} // namespace

TEST_CASE("monte carlo mse over a truncated band equals Var/(1+snr) for every noise shape") {
    constexpr int kDraws = 100'000;
    const double rate = 1.0;
    const double a = 0.9;
    const double b = 3.4;
    const ChannelParams channel{1.0, 1.0};

    auto pdf = [rate](double x) { return oracle::laplace_pdf(rate, x); };
    const auto band = oracle::moments(pdf, a, b);
    const CodecParams codec{std::sqrt(channel.power / band.variance), band.mean,
                            channel.snr};
    const double expected = band.variance / (1.0 + channel.snr);

    for (const auto shape : {NoiseShape::gaussian, NoiseShape::uniform,
                             NoiseShape::laplace}) {
        const NoiseModel noise{channel.noise_variance(), shape};
        RngStream rng(2024 + static_cast<int>(shape));
        double sum = 0.0;
        double sum_sq = 0.0;
        double power_sum = 0.0;
        for (int i = 0; i < kDraws; ++i) {
            const double x = conditional_laplace_draw(rate, a, b, rng);
            const Sign s = sign_of(x);
            const double y = encode(x, s, codec);
            power_sum += y * y;
            const double estimate = decode(y + noise.sample(rng), s, codec);
            const double err = (x - estimate) * (x - estimate);
            sum += err;
            sum_sq += err * err;
        }
        const double mean = sum / kDraws;
        const double se =
            std::sqrt((sum_sq / kDraws - mean * mean) / (kDraws - 1.0));
        CHECK(std::abs(mean - expected) < 3.0 * se);
        // the codec normalizes the band to full transmit power
        const double power_mean = power_sum / kDraws;
        CHECK(std::abs(power_mean - channel.power) < 3.0 * 2.0 * channel.power /
                                                          std::sqrt(double(kDraws)));
    }
}

TEST_CASE("per-input expected squared error identity") {
    const CodecParams codec{1.7, 1.2, 2.0};
    const double noise_variance = 0.5;
    for (double x : {-3.0, -1.2, 0.0, 0.4, 2.5}) {
        const double closed = expected_sq_error(x, codec, noise_variance);
        // average the realized error over many noise draws
        RngStream rng(55);
        const NoiseModel noise{noise_variance, NoiseShape::gaussian};
        const Sign s = sign_of(x);
        double sum = 0.0;
        constexpr int kDraws = 200'000;
        for (int i = 0; i < kDraws; ++i) {
            const double estimate = decode(encode(x, s, codec) + noise.sample(rng), s, codec);
            sum += (x - estimate) * (x - estimate);
        }
        CHECK(sum / kDraws == doctest::Approx(closed).epsilon(0.02));
    }
}
