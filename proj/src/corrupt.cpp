#include "segnoise/corrupt.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace segnoise {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void check_fraction(double f, char const *what) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

/// Partial Fisher-Yates: the first `take` entries of the returned vector are
/// a uniform random sample (in uniform random order) of `ids`.
std::vector<int> partial_shuffle(std::vector<int> ids, std::size_t take, CounterRng &rng) {
    for (std::size_t i = 0; i < take && i + 1 < ids.size(); ++i) {
        std::size_t const j = i + rng.next_below(ids.size() - i);
        std::swap(ids[i], ids[j]);
    }
    return ids;
}

} // namespace

bool is_dataset_level(CorruptionSpec const &spec) {
    return std::holds_alternative<PermuteSpec>(spec) || std::holds_alternative<DiscardSpec>(spec);
}

bool is_seed_invariant(CorruptionSpec const &spec) {
    return std::holds_alternative<NoOpSpec>(spec) || std::holds_alternative<ShiftSpec>(spec) ||
           std::holds_alternative<CropLeftSpec>(spec);
}

std::string spec_op_name(CorruptionSpec const &spec) {
    struct Visitor {
        std::string operator()(NoOpSpec const &) const { return "none"; }
        std::string operator()(WarpSpec const &) const { return "warp"; }
        std::string operator()(ShiftSpec const &) const { return "shift"; }
        std::string operator()(CropLeftSpec const &) const { return "crop_left"; }
        std::string operator()(CropRandSpec const &) const { return "crop_rand"; }
        std::string operator()(PermuteSpec const &) const { return "permute"; }
        std::string operator()(DiscardSpec const &) const { return "discard"; }
    };
    return std::visit(Visitor{}, spec);
}

nlohmann::json spec_to_json(CorruptionSpec const &spec) {
    nlohmann::json j;
    j["op"] = spec_op_name(spec);
    if (auto const *w = std::get_if<WarpSpec>(&spec)) {
        j["sigma"] = w->params.sigma;
        j["grid_rows"] = w->params.grid_rows;
        j["grid_cols"] = w->params.grid_cols;
    } else if (auto const *s = std::get_if<ShiftSpec>(&spec)) {
        j["dx"] = s->dx;
        j["dy"] = s->dy;
    } else if (auto const *c = std::get_if<CropRandSpec>(&spec)) {
        j["lo"] = c->lo;
        j["hi"] = c->hi;
    } else if (auto const *p = std::get_if<PermuteSpec>(&spec)) {
        j["fraction"] = p->fraction;
    } else if (auto const *d = std::get_if<DiscardSpec>(&spec)) {
        j["fraction"] = d->fraction;
    }
    return j;
}

CorruptionSpec spec_from_json(nlohmann::json const &j) {
    std::string const op = j.at("op").get<std::string>();
    if (op == "none") {
        return NoOpSpec{};
    }
    if (op == "warp") {
        WarpSpec w;
        w.params.sigma = j.at("sigma").get<double>();
        w.params.grid_rows = j.value("grid_rows", 3);
        w.params.grid_cols = j.value("grid_cols", 3);
        if (w.params.sigma < 0.0) {
            throw std::invalid_argument("warp sigma must be >= 0");
        }
        return w;
    }
    if (op == "shift") {
        return ShiftSpec{j.at("dx").get<int>(), j.at("dy").get<int>()};
    }
    if (op == "crop_left") {
        return CropLeftSpec{};
    }
    if (op == "crop_rand") {
        CropRandSpec c{j.at("lo").get<double>(), j.at("hi").get<double>()};
        check_fraction(c.lo, "crop_rand lo");
        check_fraction(c.hi, "crop_rand hi");
        if (c.lo > c.hi) {
            throw std::invalid_argument("crop_rand requires lo <= hi");
        }
        return c;
    }
    if (op == "permute") {
        PermuteSpec p{j.at("fraction").get<double>()};
        check_fraction(p.fraction, "permute fraction");
        return p;
    }
    if (op == "discard") {
        DiscardSpec d{j.at("fraction").get<double>()};
        check_fraction(d.fraction, "discard fraction");
        return d;
    }
    throw std::invalid_argument("unknown corruption op: " + op);
}

std::vector<int> DatasetPlan::retained() const {
    std::vector<int> out;
    out.reserve(sample_ids.size());
    for (int id : sample_ids) {
        if (!is_discarded(id)) {
            out.push_back(id);
        }
    }
    return out;
}

Mask apply(CorruptionSpec const &spec, Mask const &mask, SeedKey const &seed) {
    if (is_dataset_level(spec)) {
        throw std::invalid_argument(
            "permute/discard act at dataset level; use build_dataset_plan");
    }
    if (std::holds_alternative<NoOpSpec>(spec)) {
        return mask;
    }
    if (auto const *w = std::get_if<WarpSpec>(&spec)) {
        SeedKey key = seed;
        key.op_tag = op_tags::warp_field;
        return warp_apply(mask, make_warp(w->params, mask.width(), mask.height(), key));
    }
    if (auto const *s = std::get_if<ShiftSpec>(&spec)) {
        return translate(mask, s->dx, s->dy);
    }
    if (std::holds_alternative<CropLeftSpec>(spec)) {
        return crop_left(mask);
    }
    auto const &c = std::get<CropRandSpec>(spec);
    return crop_rand(mask, c.lo, c.hi, seed);
}

Mask crop_left(Mask const &mask) {
    std::uint64_t const total = area(mask);
    if (total == 0) {
        return mask;
    }
    std::uint64_t to_remove = (total + 1) / 2;
    Mask out = mask;
    for (int x = 0; x < out.width() && to_remove > 0; ++x) {
        for (int y = 0; y < out.height() && to_remove > 0; ++y) {
            if (out.at(x, y)) {
                out.set(x, y, false);
                --to_remove;
            }
        }
    }
    return out;
}

Mask crop_rand(Mask const &mask, double lo, double hi, SeedKey const &seed) {
    check_fraction(lo, "crop_rand lo");
    check_fraction(hi, "crop_rand hi");
    if (lo > hi) {
        throw std::invalid_argument("crop_rand requires lo <= hi");
    }
    auto const box = bounding_box(mask);
    if (!box) {
        return mask;
    }
    SeedKey key = seed;
    key.op_tag = op_tags::crop_rect;
    CounterRng rng(key);
    double const u1 = lo + rng.next_unit() * (hi - lo);
    double const u2 = lo + rng.next_unit() * (hi - lo);
    int const rect_w = round_half_up(u1 * box->width());
    int const rect_h = round_half_up(u2 * box->height());
    if (rect_w == 0 || rect_h == 0) {
        return mask;
    }
    int const x0 = box->x0 + static_cast<int>(rng.next_below(box->width() - rect_w + 1));
    int const y0 = box->y0 + static_cast<int>(rng.next_below(box->height() - rect_h + 1));
    Mask out = mask;
    for (int y = y0; y < y0 + rect_h; ++y) {
        for (int x = x0; x < x0 + rect_w; ++x) {
            out.set(x, y, false);
        }
    }
    return out;
}

DatasetPlan build_dataset_plan(CorruptionSpec const &spec, std::vector<int> const &sample_ids,
                               SeedKey const &seed) {
    if (!is_dataset_level(spec) && !std::holds_alternative<NoOpSpec>(spec)) {
        throw std::invalid_argument("build_dataset_plan takes permute, discard, or no-op specs");
    }
    DatasetPlan plan;
    plan.sample_ids = sample_ids;
    if (std::holds_alternative<NoOpSpec>(spec)) {
        return plan;
    }
    SeedKey key = seed;
    key.op_tag = op_tags::dataset_plan;
    CounterRng rng(key);
    std::size_t const n = sample_ids.size();
    if (auto const *p = std::get_if<PermuteSpec>(&spec)) {
        auto const m = static_cast<std::size_t>(round_half_up(p->fraction * n));
        if (m < 2) {
            if (m == 1) {
                std::cerr << "warning: permute subset of size 1; plan left as identity\n";
            }
            return plan;
        }
        auto const order = partial_shuffle(sample_ids, m, rng);
        // One cycle over the shuffled subset: no fixed points.
        for (std::size_t i = 0; i < m; ++i) {
            plan.permutation_map[order[i]] = order[(i + 1) % m];
        }
        return plan;
    }
    auto const &d = std::get<DiscardSpec>(spec);
    auto const m = static_cast<std::size_t>(round_half_up(d.fraction * n));
    auto const order = partial_shuffle(sample_ids, m, rng);
    plan.discarded.insert(order.begin(), order.begin() + m);
    return plan;
}

} // namespace segnoise
