#include "segnoise/corrupt.hpp"
#include "segnoise/harness.hpp"
#include "segnoise/learner.hpp"
#include "segnoise/metrics.hpp"
#include "segnoise/pgm.hpp"
#include "segnoise/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

nlohmann::json load_json(fs::path const &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read file: " + path.string());
    }
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (nlohmann::json::exception const &e) {
        throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
    }
}

std::vector<double> parse_fractions(std::string const &csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(std::stod(item));
    }
    if (out.empty()) {
        throw std::runtime_error("no fractions given");
    }
    return out;
}

struct Args {
    std::string spec_path;
    std::string mask_path;
    std::string out_path;
    std::string data_dir;
    std::string pred_dir;
    std::string ref_dir;
    std::string config_path;
    std::string train_config_path;
    std::string fractions = "0,0.1,0.25,0.5";
    std::uint64_t seed = 0;
    int epoch = 0;
    int sample_id = 0;
    int draws = 0;
    int n = 0;
};

void run_synth(Args const &a) {
    segnoise::SynthConfig config;
    if (!a.config_path.empty()) {
        config = segnoise::synth_config_from_json(load_json(a.config_path));
    }
    auto const samples = segnoise::generate(config, a.n, a.seed);
    segnoise::write_dataset(a.out_path, samples);
}

void run_corrupt(Args const &a) {
    auto const spec = segnoise::spec_from_json(load_json(a.spec_path));
    auto const mask = segnoise::read_mask_pgm(a.mask_path);
    segnoise::SeedKey key{a.seed, static_cast<std::uint32_t>(a.epoch),
                          static_cast<std::uint32_t>(a.sample_id), 0};
    segnoise::write_mask_pgm(a.out_path, segnoise::apply(spec, mask, key));
}

void run_bias(Args const &a) {
    auto const spec = segnoise::spec_from_json(load_json(a.spec_path));
    auto const mask = segnoise::read_mask_pgm(a.mask_path);
    auto const report = segnoise::estimate_bias(spec, mask, a.draws, a.seed);
    fs::create_directories(a.out_path);
    fs::path const dir(a.out_path);
    segnoise::write_frequency_pgm(dir / "mean.pgm", report.mean_mask, report.width,
                                  report.height);
    segnoise::write_mask_pgm(dir / "consensus.pgm", report.consensus);
    nlohmann::json const sidecar{{"recovery_dice", report.recovery_dice},
                                 {"l1_bias", report.l1_bias},
                                 {"draws", a.draws},
                                 {"spec", segnoise::spec_to_json(spec)}};
    std::ofstream out(dir / "bias.json");
    out << sidecar.dump(2) << '\n';
}

void run_dice(Args const &a) {
    std::vector<fs::path> refs;
    for (auto const &entry : fs::directory_iterator(a.ref_dir)) {
        if (entry.path().extension() == ".pgm") {
            refs.push_back(entry.path());
        }
    }
    if (refs.empty()) {
        throw std::runtime_error("no .pgm files in reference directory: " + a.ref_dir);
    }
    std::sort(refs.begin(), refs.end());
    segnoise::OverlapCounts counts;
    for (auto const &ref_path : refs) {
        fs::path const pred_path = fs::path(a.pred_dir) / ref_path.filename();
        auto const ref = segnoise::read_mask_pgm(ref_path);
        auto const pred = segnoise::read_mask_pgm(pred_path);
        segnoise::accumulate(counts, pred, ref);
    }
    std::printf("%.6f\n", segnoise::pooled_dice(counts));
}

void run_train(Args const &a) {
    auto const samples = segnoise::read_dataset(a.data_dir);
    auto const spec = segnoise::spec_from_json(load_json(a.spec_path));
    segnoise::TrainConfig config;
    if (!a.train_config_path.empty()) {
        config = segnoise::train_config_from_json(load_json(a.train_config_path));
    }
    config.seed = a.seed;
    auto const result = segnoise::train(samples, spec, config);
    segnoise::save_model(a.out_path, result.model);
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
        std::fprintf(stderr, "epoch %zu loss %.6f\n", e, result.epoch_loss[e]);
    }
}

void run_experiment(Args const &a) {
    auto const config = segnoise::experiment_config_from_json(load_json(a.config_path));
    segnoise::emit(segnoise::run(config), a.out_path);
}

void run_permute_vs_discard(Args const &a) {
    auto const config = segnoise::experiment_config_from_json(load_json(a.config_path));
    auto const table = segnoise::permute_vs_discard(config, parse_fractions(a.fractions));
    segnoise::emit(table, a.out_path);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Annotation-corruption operators, bias estimation, and "
                 "label-noise robustness experiments on synthetic phantoms"};
    app.require_subcommand(1);
    Args a;

    auto *synth = app.add_subcommand("synth", "Generate a synthetic phantom dataset");
    synth->add_option("--config", a.config_path, "Synth config JSON (optional)");
    synth->add_option("--n", a.n, "Number of samples")->required();
    synth->add_option("--seed", a.seed, "Dataset seed")->required();
    synth->add_option("--out", a.out_path, "Output dataset directory")->required();

    auto *corrupt = app.add_subcommand("corrupt", "Apply one corruption to one mask");
    corrupt->add_option("--spec", a.spec_path, "Corruption spec JSON")->required();
    corrupt->add_option("--mask", a.mask_path, "Input mask PGM")->required();
    corrupt->add_option("--seed", a.seed, "Experiment seed")->required();
    corrupt->add_option("--epoch", a.epoch, "Epoch index");
    corrupt->add_option("--sample-id", a.sample_id, "Sample id");
    corrupt->add_option("--out", a.out_path, "Output mask PGM")->required();

    auto *bias = app.add_subcommand("bias", "Monte-Carlo bias estimate of a corruption");
    bias->add_option("--spec", a.spec_path, "Corruption spec JSON")->required();
    bias->add_option("--mask", a.mask_path, "Input mask PGM")->required();
    bias->add_option("--draws", a.draws, "Number of draws")->required();
    bias->add_option("--seed", a.seed, "Base seed")->required();
    bias->add_option("--out", a.out_path, "Output directory")->required();

    auto *dice = app.add_subcommand("dice", "Pooled Dice between two mask directories");
    dice->add_option("--pred", a.pred_dir, "Predicted masks directory")->required();
    dice->add_option("--ref", a.ref_dir, "Reference masks directory")->required();

    auto *train = app.add_subcommand("train", "Train the patch scorer on a dataset");
    train->add_option("--data", a.data_dir, "Dataset directory")->required();
    train->add_option("--spec", a.spec_path, "Corruption spec JSON")->required();
    train->add_option("--train-config", a.train_config_path, "Training config JSON");
    train->add_option("--seed", a.seed, "Training seed")->required();
    train->add_option("--out", a.out_path, "Output model checkpoint")->required();

    auto *experiment = app.add_subcommand("experiment", "Run a corruption sweep");
    experiment->add_option("--config", a.config_path, "Experiment config JSON")->required();
    experiment->add_option("--out", a.out_path, "Output directory")->required();

    auto *pvd = app.add_subcommand("permute-vs-discard",
                                   "Compare label permutation against data discard");
    pvd->add_option("--config", a.config_path, "Experiment config JSON")->required();
    pvd->add_option("--fractions", a.fractions, "Comma-separated fractions");
    pvd->add_option("--out", a.out_path, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const &e) {
        return app.exit(e);
    } catch (CLI::ParseError const &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) {
            run_synth(a);
        } else if (corrupt->parsed()) {
            run_corrupt(a);
        } else if (bias->parsed()) {
            run_bias(a);
        } else if (dice->parsed()) {
            run_dice(a);
        } else if (train->parsed()) {
            run_train(a);
        } else if (experiment->parsed()) {
            run_experiment(a);
        } else if (pvd->parsed()) {
            run_permute_vs_discard(a);
        }
    } catch (std::exception const &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
