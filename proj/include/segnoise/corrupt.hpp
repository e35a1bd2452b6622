#pragma once

#include "segnoise/grid.hpp"
#include "segnoise/rng.hpp"
#include "segnoise/warp.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace segnoise {

struct NoOpSpec {
    bool operator==(NoOpSpec const &) const = default;
};
struct WarpSpec {
    WarpParams params;
    bool operator==(WarpSpec const &) const = default;
};
struct ShiftSpec {
    int dx = 0;
    int dy = 0;
    bool operator==(ShiftSpec const &) const = default;
};
struct CropLeftSpec {
    bool operator==(CropLeftSpec const &) const = default;
};
struct CropRandSpec {
    double lo = 0.0;
    double hi = 1.0;
    bool operator==(CropRandSpec const &) const = default;
};
struct PermuteSpec {
    double fraction = 0.0;
    bool operator==(PermuteSpec const &) const = default;
};
struct DiscardSpec {
    double fraction = 0.0;
    bool operator==(DiscardSpec const &) const = default;
};

using CorruptionSpec = std::variant<NoOpSpec, WarpSpec, ShiftSpec, CropLeftSpec,
                                    CropRandSpec, PermuteSpec, DiscardSpec>;

/// Permute and Discard act on the dataset as a whole, not per mask.
bool is_dataset_level(CorruptionSpec const &spec);

/// True when the operator ignores its SeedKey entirely (the biased errors).
bool is_seed_invariant(CorruptionSpec const &spec);

std::string spec_op_name(CorruptionSpec const &spec);
nlohmann::json spec_to_json(CorruptionSpec const &spec);
CorruptionSpec spec_from_json(nlohmann::json const &j);

/// Fixed-once dataset-level corruption: label permutation and discards.
struct DatasetPlan {
    std::vector<int> sample_ids;
    std::map<int, int> permutation_map; // identity outside the permuted subset
    std::set<int> discarded;

    int mapped(int sample_id) const {
        auto it = permutation_map.find(sample_id);
        return it == permutation_map.end() ? sample_id : it->second;
    }
    bool is_discarded(int sample_id) const { return discarded.count(sample_id) != 0; }
    std::vector<int> retained() const;
};

/// Apply a per-mask corruption. Always derives from the pristine mask, so
/// corruptions never compound across epochs. Deterministic in (spec, mask, seed).
Mask apply(CorruptionSpec const &spec, Mask const &mask, SeedKey const &seed);

/// Remove exactly ceil(area/2) foreground pixels in column-major order
/// (leftmost column first, top to bottom within a column). Seed-free.
Mask crop_left(Mask const &mask);

/// Clear a random rectangle with edge lengths round(u * bbox edge),
/// u ~ Uniform[lo, hi], placed uniformly inside the bounding box.
Mask crop_rand(Mask const &mask, double lo, double hi, SeedKey const &seed);

/// Resolve Permute/Discard once before training. Permute(f) applies a single
/// uniformly random cycle to a random subset of size round(f*N), so every
/// selected sample is actually mismatched.
DatasetPlan build_dataset_plan(CorruptionSpec const &spec, std::vector<int> const &sample_ids,
                               SeedKey const &seed);

} // namespace segnoise
