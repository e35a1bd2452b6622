#include "segnoise/harness.hpp"

#include "segnoise/metrics.hpp"
#include "segnoise/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace segnoise {

namespace {

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

void validate(ExperimentConfig const &config) {
    if (config.repetitions < 1) {
        throw std::invalid_argument("repetitions must be >= 1");
    }
    if (config.dataset_size < 10) {
        throw std::invalid_argument("dataset_size must be >= 10");
    }
    double const total =
        config.train_fraction + config.val_fraction + config.test_fraction;
    if (std::abs(total - 1.0) > 1e-9 || config.train_fraction <= 0.0 ||
        config.test_fraction <= 0.0 || config.val_fraction < 0.0) {
        throw std::invalid_argument("split fractions must be valid and sum to 1");
    }
}

std::uint64_t fnv1a(std::vector<std::uint8_t> const &bytes, std::uint64_t h) {
    for (auto b : bytes) {
        h = (h ^ b) * 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_masks(std::span<Sample const> samples) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto const &s : samples) {
        h = fnv1a(s.mask.values(), h);
    }
    return h;
}

ResultTable run_grid(ExperimentConfig const &config, std::vector<GridCell> grid) {
    validate(config);

    std::size_t clean_index = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].family == "clean") {
            clean_index = i;
            break;
        }
    }
    if (clean_index == grid.size()) {
        grid.insert(grid.begin(), GridCell{"clean", "0", 0.0, NoOpSpec{}});
        clean_index = 0;
    }

    int const n = config.dataset_size;
    int const n_train = round_half_up(config.train_fraction * n);
    int const n_val = round_half_up(config.val_fraction * n);
    if (n_train < 1 || n_train + n_val >= n) {
        throw std::invalid_argument("split leaves an empty train or test set");
    }

    std::vector<std::vector<double>> dice(grid.size());
    for (int rep = 0; rep < config.repetitions; ++rep) {
        std::vector<Sample> const dataset =
            generate(config.synth, n, derive_seed(config.experiment_seed, 1, rep));
        std::vector<Sample> const train_set(dataset.begin(), dataset.begin() + n_train);
        std::span<Sample const> const test_set(dataset.data() + n_train + n_val,
                                               dataset.size() - n_train - n_val);
        std::uint64_t const test_hash = hash_masks(test_set);
        for (std::size_t ci = 0; ci < grid.size(); ++ci) {
            GridCell const &cell = grid[ci];
            try {
                TrainConfig tc = config.train;
                tc.seed = derive_seed(config.experiment_seed, 1000 + ci, rep);
                TrainResult const trained = train(train_set, cell.spec, tc);
                if (hash_masks(test_set) != test_hash) {
                    throw std::logic_error("test split changed during training");
                }
                dice[ci].push_back(evaluate_pooled_dice(trained.model, test_set));
            } catch (std::exception const &e) {
                throw std::runtime_error("cell " + cell.family + "/" + cell.param + " rep " +
                                         std::to_string(rep) + " failed: " + e.what());
            }
        }
    }

    ResultTable table;
    table.config_echo = experiment_config_to_json(config);
    for (std::size_t ci = 0; ci < grid.size(); ++ci) {
        RelativePerformance const rel = relative_performance(dice[ci], dice[clean_index]);
        for (int rep = 0; rep < config.repetitions; ++rep) {
            table.rows.push_back(ResultRow{grid[ci].family, grid[ci].param, rep,
                                           dice[ci][rep], rel.ratio, rel.variance});
        }
    }
    return table;
}

} // namespace

std::vector<GridCell> default_grid() {
    std::vector<GridCell> grid;
    grid.push_back({"clean", "0", 0.0, NoOpSpec{}});
    for (double sigma : {0.0, 2.0, 5.0, 10.0, 20.0}) {
        grid.push_back({"warp", format_param(sigma), sigma,
                        WarpSpec{WarpParams{3, 3, sigma}}});
    }
    for (int shift : {0, 2, 5, 10, 30}) {
        grid.push_back({"shift", format_param(shift), static_cast<double>(shift),
                        ShiftSpec{shift, 0}});
    }
    grid.push_back({"crop", "left", 0.0, CropLeftSpec{}});
    grid.push_back({"crop", "rand_0.5", 1.0, CropRandSpec{0.5, 1.0}});
    grid.push_back({"crop", "rand_0", 2.0, CropRandSpec{0.0, 1.0}});
    for (double f : {0.0, 0.1, 0.25, 0.5}) {
        grid.push_back({"permute", format_param(f), f, PermuteSpec{f}});
        grid.push_back({"discard", format_param(f), f, DiscardSpec{f}});
    }
    return grid;
}

nlohmann::json experiment_config_to_json(ExperimentConfig const &config) {
    nlohmann::json grid = nlohmann::json::array();
    for (auto const &cell : config.grid) {
        grid.push_back(nlohmann::json{{"family", cell.family},
                                      {"param", cell.param},
                                      {"param_value", cell.param_value},
                                      {"spec", spec_to_json(cell.spec)}});
    }
    return nlohmann::json{
        {"synth", synth_config_to_json(config.synth)},
        {"train", train_config_to_json(config.train)},
        {"dataset_size", config.dataset_size},
        {"repetitions", config.repetitions},
        {"split",
         {{"train", config.train_fraction},
          {"val", config.val_fraction},
          {"test", config.test_fraction}}},
        {"experiment_seed", config.experiment_seed},
        {"grid", grid}};
}

ExperimentConfig experiment_config_from_json(nlohmann::json const &j) {
    ExperimentConfig c;
    if (j.contains("synth")) {
        c.synth = synth_config_from_json(j.at("synth"));
    }
    if (j.contains("train")) {
        c.train = train_config_from_json(j.at("train"));
    }
    c.dataset_size = j.value("dataset_size", c.dataset_size);
    c.repetitions = j.value("repetitions", c.repetitions);
    if (j.contains("split")) {
        auto const &s = j.at("split");
        c.train_fraction = s.value("train", c.train_fraction);
        c.val_fraction = s.value("val", c.val_fraction);
        c.test_fraction = s.value("test", c.test_fraction);
    }
    c.experiment_seed = j.value("experiment_seed", c.experiment_seed);
    if (j.contains("grid")) {
        for (auto const &cell : j.at("grid")) {
            GridCell g;
            g.family = cell.at("family").get<std::string>();
            g.param = cell.at("param").get<std::string>();
            g.param_value = cell.value("param_value", 0.0);
            g.spec = spec_from_json(cell.at("spec"));
            c.grid.push_back(std::move(g));
        }
    }
    validate(c);
    return c;
}

ResultTable run(ExperimentConfig const &config) {
    return run_grid(config, config.grid.empty() ? default_grid() : config.grid);
}

ResultTable permute_vs_discard(ExperimentConfig const &config,
                               std::vector<double> const &fractions) {
    std::vector<GridCell> grid;
    grid.push_back({"clean", "0", 0.0, NoOpSpec{}});
    for (double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw std::invalid_argument("fractions must lie in [0, 1]");
        }
        grid.push_back({"permute", format_param(f), f, PermuteSpec{f}});
        grid.push_back({"discard", format_param(f), f, DiscardSpec{f}});
    }
    return run_grid(config, std::move(grid));
}

namespace {

struct FamilyPoint {
    std::string param;
    double relative = 0.0;
    double stddev = 0.0;
};

std::string fmt(double v, char const *format = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

void write_family_svg(std::filesystem::path const &path, std::string const &family,
                      std::vector<FamilyPoint> const &points) {
    int const width = 480;
    int const height = 320;
    double const left = 60.0;
    double const right = 440.0;
    double const top = 40.0;
    double const bottom = 280.0;

    double lo = points[0].relative - points[0].stddev;
    double hi = points[0].relative + points[0].stddev;
    for (auto const &p : points) {
        lo = std::min(lo, p.relative - p.stddev);
        hi = std::max(hi, p.relative + p.stddev);
    }
    double const pad = std::max(0.05, (hi - lo) * 0.1);
    lo -= pad;
    hi += pad;

    auto x_at = [&](std::size_t i) {
        if (points.size() == 1) {
            return (left + right) / 2.0;
        }
        return left + (right - left) * static_cast<double>(i) / (points.size() - 1);
    };
    auto y_at = [&](double v) { return bottom - (bottom - top) * (v - lo) / (hi - lo); };

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write chart: " + path.string());
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt((left + right) / 2.0) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">"
        << family << " (relative performance)</text>\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(right)
        << "\" y2=\"" << fmt(bottom) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left)
        << "\" y2=\"" << fmt(bottom) << "\" stroke=\"black\"/>\n";

    // +-1 std band.
    out << "<polygon fill=\"#9ecae1\" opacity=\"0.5\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << fmt(x_at(i)) << ',' << fmt(y_at(points[i].relative + points[i].stddev)) << ' ';
    }
    for (std::size_t i = points.size(); i-- > 0;) {
        out << fmt(x_at(i)) << ',' << fmt(y_at(points[i].relative - points[i].stddev));
        if (i > 0) {
            out << ' ';
        }
    }
    out << "\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0) {
            out << ' ';
        }
        out << fmt(x_at(i)) << ',' << fmt(y_at(points[i].relative));
    }
    out << "\"/>\n";

    for (std::size_t i = 0; i < points.size(); ++i) {
        out << "<text x=\"" << fmt(x_at(i)) << "\" y=\"" << fmt(bottom + 18.0)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << points[i].param << "</text>\n";
    }
    out << "<text x=\"" << fmt(left - 8.0) << "\" y=\"" << fmt(y_at(lo + pad))
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(lo + pad) << "</text>\n";
    out << "<text x=\"" << fmt(left - 8.0) << "\" y=\"" << fmt(y_at(hi - pad))
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(hi - pad) << "</text>\n";
    out << "</svg>\n";
    if (!out) {
        throw std::runtime_error("failed writing chart: " + path.string());
    }
}

} // namespace

void emit(ResultTable const &table, std::filesystem::path const &directory) {
    if (table.rows.empty()) {
        throw std::invalid_argument("result table is empty");
    }
    std::filesystem::create_directories(directory);

    {
        std::ofstream csv(directory / "results.csv", std::ios::binary);
        if (!csv) {
            throw std::runtime_error("cannot write results.csv in " + directory.string());
        }
        csv << "experiment,param,rep,dice,relative,variance\n";
        for (auto const &row : table.rows) {
            char line[256];
            std::snprintf(line, sizeof(line), "%s,%s,%d,%.6f,%.6f,%.6g\n",
                          row.experiment.c_str(), row.param.c_str(), row.rep, row.dice,
                          row.relative, row.variance);
            csv << line;
        }
    }

    {
        nlohmann::json rows = nlohmann::json::array();
        for (auto const &row : table.rows) {
            rows.push_back(nlohmann::json{{"experiment", row.experiment},
                                          {"param", row.param},
                                          {"rep", row.rep},
                                          {"dice", row.dice},
                                          {"relative", row.relative},
                                          {"variance", row.variance}});
        }
        nlohmann::json const doc{{"config", table.config_echo}, {"rows", rows}};
        std::ofstream json_out(directory / "results.json", std::ios::binary);
        json_out << doc.dump(2) << '\n';
    }

    // One chart per family, points in first-appearance order.
    std::vector<std::string> family_order;
    std::map<std::string, std::vector<FamilyPoint>> families;
    for (auto const &row : table.rows) {
        auto &pts = families[row.experiment];
        if (families.at(row.experiment).empty() ||
            std::none_of(pts.begin(), pts.end(),
                         [&](FamilyPoint const &p) { return p.param == row.param; })) {
            if (pts.empty()) {
                family_order.push_back(row.experiment);
            }
            pts.push_back(FamilyPoint{row.param, row.relative, std::sqrt(row.variance)});
        }
    }
    for (auto const &family : family_order) {
        write_family_svg(directory / (family + ".svg"), family, families.at(family));
    }
}

} // namespace segnoise
