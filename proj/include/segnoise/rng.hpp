#pragma once

#include <cmath>
#include <cstdint>

namespace segnoise {

/// Identifies one independent random stream. Distinct (epoch, sample_id,
/// op_tag) triples under the same experiment seed give independent streams,
/// so per-epoch corruptions are reproducible regardless of load order.
struct SeedKey {
    std::uint64_t experiment_seed = 0;
    std::uint32_t epoch = 0;
    std::uint32_t sample_id = 0;
    std::uint32_t op_tag = 0;
};

namespace op_tags {
inline constexpr std::uint32_t warp_field = 1;
inline constexpr std::uint32_t crop_rect = 2;
inline constexpr std::uint32_t dataset_plan = 3;
inline constexpr std::uint32_t batch_shuffle = 4;
inline constexpr std::uint32_t synth_sample = 5;
inline constexpr std::uint32_t labeled_subset = 6;
inline constexpr std::uint32_t bias_draw = 7;
} // namespace op_tags

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(base) ^ a) ^ b);
}

/// Counter-based deterministic generator. Stateless apart from the draw
/// counter: output i is a pure function of (SeedKey, i).
class CounterRng {
public:
    explicit CounterRng(SeedKey const &key)
        : base_(derive_seed(derive_seed(key.experiment_seed, key.epoch, key.sample_id),
                            key.op_tag)) {}

    std::uint64_t next_u64() { return mix64(base_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Normal(0, sigma^2) via Box-Muller; consumes two uniforms per pair.
    double next_normal(double sigma) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_ * sigma;
        }
        double const u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        double const u2 = next_unit();
        double const r = std::sqrt(-2.0 * std::log(u1));
        double const theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta) * sigma;
    }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace segnoise
