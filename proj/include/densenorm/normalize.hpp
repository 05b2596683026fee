#pragma once

#include <string>
#include <vector>

#include "densenorm/image.hpp"
#include "densenorm/interp.hpp"
#include "densenorm/moments.hpp"

namespace densenorm {

// Per-channel scale/shift applied after normalization. Empty vectors mean
// identity; a single element broadcasts to every channel.
struct AffineParams {
    std::vector<double> gamma;
    std::vector<double> beta;
};

double affine_gamma(const AffineParams& affine, int channel);
double affine_beta(const AffineParams& affine, int channel);

enum class StrategyKind { patch_in, tin, kin, dn };

const char* strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::dn;
    double epsilon = kDefaultEpsilon;
    int kin_kernel = 5;    // odd window width, KIN only
    int granularity = 1;   // field block size, DN only; must divide patch size
    AffineParams affine;
};

// Raises BadConfig/BadGranularity when the combination cannot run on a grid
// with the given patch size.
void validate_config(const StrategyConfig& config, int patch_size);

// y = gamma * (x - mean) / stddev + beta, per channel.
Image instance_normalize(const Image& patch, const ChannelMoments& moments,
                         const AffineParams& affine = {});

// y = gamma * ((x - mu[p]) * inv_sigma[p]) + beta, per pixel p. The field's
// reciprocal standard deviations are multiplied, never divided.
Image dense_normalize(const Image& patch, const PixelMomentField& field,
                      const AffineParams& affine = {});

// Whole-image (thumbnail-equivalent) statistics shared by every patch.
ChannelMoments tin_global_stats(const Image& image, double epsilon = kDefaultEpsilon);

// Streaming accumulator so global statistics can be taken over a tile stream
// without materialising the image. Accumulation order must be fixed by the
// caller; the executors use linear patch order.
class GlobalStatsAccumulator {
public:
    void add(const Image& tile);
    ChannelMoments finalize(double epsilon = kDefaultEpsilon) const;

private:
    int channels_ = 0;
    std::vector<double> sum_, sum_sq_;
    std::size_t count_ = 0;  // pixels per channel
};

// Uniform box filter over the k x k window of patch statistics centred at
// coord, clamp-to-edge at the borders (out-of-bounds window positions
// replicate the nearest entry, so edge entries gain multiplicity). Means and
// standard deviations are averaged as stored, before any inversion.
ChannelMoments kin_filtered_stats(const MomentTable& table, PatchCoord coord, int kernel,
                                  long long step = kNoStep);

}  // namespace densenorm
