#include "densenorm/normalize.hpp"

#include <cmath>
#include <cstddef>

namespace densenorm {

namespace {

double broadcast(const std::vector<double>& values, int channel, double fallback) {
    if (values.empty()) return fallback;
    if (values.size() == 1) return values[0];
    return values[static_cast<std::size_t>(channel)];
}

void check_affine(const AffineParams& affine, int channels, const char* what) {
    for (const auto* v : {&affine.gamma, &affine.beta}) {
        if (!v->empty() && v->size() != 1 && v->size() != static_cast<std::size_t>(channels))
            throw Error(Errc::shape_mismatch,
                        std::string(what) + ": affine parameter count does not match channels");
    }
}

}  // namespace

double affine_gamma(const AffineParams& affine, int channel) {
    return broadcast(affine.gamma, channel, 1.0);
}

double affine_beta(const AffineParams& affine, int channel) {
    return broadcast(affine.beta, channel, 0.0);
}

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::patch_in: return "in";
        case StrategyKind::tin: return "tin";
        case StrategyKind::kin: return "kin";
        case StrategyKind::dn: return "dn";
    }
    return "?";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "in") return StrategyKind::patch_in;
    if (name == "tin") return StrategyKind::tin;
    if (name == "kin") return StrategyKind::kin;
    if (name == "dn") return StrategyKind::dn;
    throw Error(Errc::bad_config, "unknown normalization strategy '" + name + "'");
}

void validate_config(const StrategyConfig& config, int patch_size) {
    if (!(config.epsilon > 0.0)) throw Error(Errc::bad_config, "epsilon must be > 0");
    if (config.kind == StrategyKind::kin && (config.kin_kernel < 1 || config.kin_kernel % 2 == 0))
        throw Error(Errc::bad_config, "kin kernel must be odd and >= 1");
    if (config.kind == StrategyKind::dn &&
        (config.granularity < 1 || patch_size % config.granularity != 0))
        throw Error(Errc::bad_granularity, "granularity must be >= 1 and divide the patch size");
}

Image instance_normalize(const Image& patch, const ChannelMoments& moments,
                         const AffineParams& affine) {
    require_nonempty(patch, "instance_normalize");
    if (moments.channels() != patch.channels)
        throw Error(Errc::shape_mismatch, "instance_normalize: moment channel count mismatch");
    check_affine(affine, patch.channels, "instance_normalize");

    Image out(patch.height, patch.width, patch.channels);
    const std::size_t n = patch.plane_size();
    for (int c = 0; c < patch.channels; ++c) {
        const float* src = patch.plane(c);
        float* dst = out.plane(c);
        const double mean = moments.mean[c];
        const double inv_std = 1.0 / moments.stddev[c];
        const double gamma = affine_gamma(affine, c);
        const double beta = affine_beta(affine, c);
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = static_cast<float>(gamma * ((src[i] - mean) * inv_std) + beta);
    }
    return out;
}

Image dense_normalize(const Image& patch, const PixelMomentField& field,
                      const AffineParams& affine) {
    require_nonempty(patch, "dense_normalize");
    if (field.channels != patch.channels || field.n != patch.height || field.n != patch.width)
        throw Error(Errc::shape_mismatch, "dense_normalize: field shape does not match patch");
    check_affine(affine, patch.channels, "dense_normalize");

    Image out(patch.height, patch.width, patch.channels);
    const std::size_t n = patch.plane_size();
    for (int c = 0; c < patch.channels; ++c) {
        const float* src = patch.plane(c);
        float* dst = out.plane(c);
        const double* mu = field.mu.data() + c * field.plane_size();
        const double* inv_sigma = field.inv_sigma.data() + c * field.plane_size();
        const double gamma = affine_gamma(affine, c);
        const double beta = affine_beta(affine, c);
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = static_cast<float>(gamma * ((src[i] - mu[i]) * inv_sigma[i]) + beta);
    }
    return out;
}

ChannelMoments tin_global_stats(const Image& image, double epsilon) {
    require_nonempty(image, "tin_global_stats");
    GlobalStatsAccumulator acc;
    acc.add(image);
    return acc.finalize(epsilon);
}

void GlobalStatsAccumulator::add(const Image& tile) {
    require_nonempty(tile, "GlobalStatsAccumulator::add");
    if (channels_ == 0) {
        channels_ = tile.channels;
        sum_.assign(channels_, 0.0);
        sum_sq_.assign(channels_, 0.0);
    } else if (tile.channels != channels_) {
        throw Error(Errc::shape_mismatch, "global stats: tile channel count changed mid-stream");
    }
    const std::size_t n = tile.plane_size();
    for (int c = 0; c < channels_; ++c) {
        const float* p = tile.plane(c);
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = p[i];
            s += x;
            s2 += x * x;
        }
        sum_[c] += s;
        sum_sq_[c] += s2;
    }
    count_ += n;
}

ChannelMoments GlobalStatsAccumulator::finalize(double epsilon) const {
    if (count_ == 0 || channels_ == 0)
        throw Error(Errc::empty_image, "global stats: no pixels accumulated");
    if (!(epsilon > 0.0)) throw Error(Errc::bad_config, "epsilon must be > 0");
    ChannelMoments m;
    m.mean.resize(channels_);
    m.stddev.resize(channels_);
    for (int c = 0; c < channels_; ++c) {
        const double mean = sum_[c] / static_cast<double>(count_);
        double var = sum_sq_[c] / static_cast<double>(count_) - mean * mean;
        if (var < 0.0) var = 0.0;  // guard the subtraction against rounding
        m.mean[c] = mean;
        m.stddev[c] = std::sqrt(var + epsilon);
    }
    return m;
}

ChannelMoments kin_filtered_stats(const MomentTable& table, PatchCoord coord, int kernel,
                                  long long step) {
    if (kernel < 1 || kernel % 2 == 0)
        throw Error(Errc::bad_config, "kin kernel must be odd and >= 1");
    const GridSpec& grid = table.grid();
    if (coord.c < 0 || coord.c >= grid.rows || coord.r < 0 || coord.r >= grid.cols)
        throw Error(Errc::out_of_grid, "kin window centre outside grid");

    const long long rho = (kernel - 1) / 2;
    // Clamp-to-edge multiplicity per axis: how many window offsets land on
    // each in-bounds index. Separable, so huge kernels stay O(rows + cols).
    auto axis_counts = [rho](int centre, int extent) {
        std::vector<long long> counts(static_cast<std::size_t>(extent), 0);
        const long long lo = centre - rho;
        const long long hi = centre + rho;  // inclusive
        for (int i = 0; i < extent; ++i) {
            long long count = 0;
            if (i == 0)
                count = std::max(0LL, std::min(hi, 0LL) - lo + 1);
            else if (i == extent - 1)
                count = std::max(0LL, hi - std::max(lo, static_cast<long long>(extent) - 1) + 1);
            if (extent == 1)
                count = hi - lo + 1;
            if (i > 0 && i < extent - 1 && i >= lo && i <= hi) count = 1;
            counts[static_cast<std::size_t>(i)] = count;
        }
        return counts;
    };
    const auto row_counts = axis_counts(coord.c, grid.rows);
    const auto col_counts = axis_counts(coord.r, grid.cols);

    ChannelMoments filtered;
    const double window = static_cast<double>(kernel) * kernel;
    for (int c = 0; c < grid.rows; ++c) {
        if (row_counts[c] == 0) continue;
        for (int r = 0; r < grid.cols; ++r) {
            if (col_counts[r] == 0) continue;
            const ChannelMoments& m = table.at(PatchCoord{c, r}, step);
            if (filtered.mean.empty()) {
                filtered.mean.assign(m.mean.size(), 0.0);
                filtered.stddev.assign(m.stddev.size(), 0.0);
            }
            const double weight = static_cast<double>(row_counts[c] * col_counts[r]) / window;
            for (std::size_t ch = 0; ch < m.mean.size(); ++ch) {
                filtered.mean[ch] += weight * m.mean[ch];
                filtered.stddev[ch] += weight * m.stddev[ch];
            }
        }
    }
    return filtered;
}

}  // namespace densenorm
