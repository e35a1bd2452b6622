#include "segnoise/learner.hpp"

#include "segnoise/metrics.hpp"
#include "segnoise/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace segnoise {

namespace {

void check_model(PatchScorer const &model) {
    if (model.patch_size < 1 || model.patch_size % 2 == 0) {
        throw std::invalid_argument("patch size must be odd and positive");
    }
    std::size_t const expected = static_cast<std::size_t>(model.channels) *
                                 model.patch_size * model.patch_size;
    if (model.weights.size() != expected) {
        throw std::invalid_argument("weight count does not match channels * patch_size^2");
    }
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

} // namespace

PatchScorer PatchScorer::zeros(int channels, int patch_size) {
    PatchScorer m;
    m.patch_size = patch_size;
    m.channels = channels;
    m.weights.assign(static_cast<std::size_t>(channels) * patch_size * patch_size, 0.0);
    check_model(m);
    return m;
}

nlohmann::json train_config_to_json(TrainConfig const &c) {
    return nlohmann::json{{"epochs", c.epochs},
                          {"learning_rate", c.learning_rate},
                          {"batch_size", c.batch_size},
                          {"smoothing_eps", c.smoothing_eps},
                          {"labeled_fraction", c.labeled_fraction},
                          {"seed", c.seed},
                          {"patch_size", c.patch_size}};
}

TrainConfig train_config_from_json(nlohmann::json const &j) {
    TrainConfig c;
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.smoothing_eps = j.value("smoothing_eps", c.smoothing_eps);
    c.labeled_fraction = j.value("labeled_fraction", c.labeled_fraction);
    c.seed = j.value("seed", c.seed);
    c.patch_size = j.value("patch_size", c.patch_size);
    if (c.epochs < 0 || c.learning_rate <= 0.0 || c.batch_size < 1 || c.smoothing_eps <= 0.0 ||
        !(c.labeled_fraction > 0.0 && c.labeled_fraction <= 1.0)) {
        throw std::invalid_argument("invalid training configuration");
    }
    return c;
}

std::vector<double> forward(PatchScorer const &model, MultiChannelImage const &image) {
    check_model(model);
    if (image.channels() != model.channels) {
        throw std::invalid_argument("image channel count does not match model");
    }
    int const radius = model.patch_size / 2;
    int const k = model.patch_size;
    std::vector<double> probs(static_cast<std::size_t>(image.width()) * image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            double response = model.bias;
            std::size_t w = 0;
            for (int c = 0; c < model.channels; ++c) {
                for (int oy = -radius; oy <= radius; ++oy) {
                    int const sy = y + oy;
                    if (sy < 0 || sy >= image.height()) {
                        w += k;
                        continue;
                    }
                    for (int ox = -radius; ox <= radius; ++ox, ++w) {
                        int const sx = x + ox;
                        if (sx >= 0 && sx < image.width()) {
                            response += model.weights[w] * image.at(c, sx, sy);
                        }
                    }
                }
            }
            probs[static_cast<std::size_t>(y) * image.width() + x] = logistic(response);
        }
    }
    return probs;
}

SoftDice soft_dice_loss(std::span<double const> probs, Mask const &mask, double eps) {
    if (probs.size() != mask.values().size()) {
        throw std::invalid_argument("probability map size does not match mask");
    }
    if (eps <= 0.0) {
        throw std::invalid_argument("smoothing eps must be > 0");
    }
    double overlap = 0.0;
    double p_sum = 0.0;
    double g_sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        overlap += probs[i] * mask.values()[i];
        p_sum += probs[i];
        g_sum += mask.values()[i];
    }
    double const num = 2.0 * overlap + eps;
    double const den = p_sum + g_sum + eps;
    SoftDice out;
    out.loss = 1.0 - num / den;
    out.grad.resize(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        out.grad[i] = -(2.0 * mask.values()[i] * den - num) / (den * den);
    }
    return out;
}

ParamGradient loss_and_param_gradient(PatchScorer const &model, MultiChannelImage const &image,
                                      Mask const &target, double eps) {
    if (target.width() != image.width() || target.height() != image.height()) {
        throw std::invalid_argument("target mask dimensions do not match image");
    }
    std::vector<double> const probs = forward(model, image);
    SoftDice const dice = soft_dice_loss(probs, target, eps);

    ParamGradient grad;
    grad.loss = dice.loss;
    grad.weights.assign(model.weights.size(), 0.0);
    int const radius = model.patch_size / 2;
    int const k = model.patch_size;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            std::size_t const i = static_cast<std::size_t>(y) * image.width() + x;
            double const g = dice.grad[i] * probs[i] * (1.0 - probs[i]);
            if (g == 0.0) {
                continue;
            }
            grad.bias += g;
            std::size_t w = 0;
            for (int c = 0; c < model.channels; ++c) {
                for (int oy = -radius; oy <= radius; ++oy) {
                    int const sy = y + oy;
                    if (sy < 0 || sy >= image.height()) {
                        w += k;
                        continue;
                    }
                    for (int ox = -radius; ox <= radius; ++ox, ++w) {
                        int const sx = x + ox;
                        if (sx >= 0 && sx < image.width()) {
                            grad.weights[w] += g * image.at(c, sx, sy);
                        }
                    }
                }
            }
        }
    }
    return grad;
}

TrainResult train(std::vector<Sample> const &dataset, CorruptionSpec const &spec,
                  TrainConfig const &config) {
    if (dataset.empty()) {
        throw std::invalid_argument("training dataset is empty");
    }
    std::unordered_map<int, std::size_t> index_by_id;
    std::vector<int> ids;
    ids.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        ids.push_back(dataset[i].id);
        index_by_id[dataset[i].id] = i;
    }

    CorruptionSpec const plan_spec = is_dataset_level(spec) ? spec : CorruptionSpec{NoOpSpec{}};
    CorruptionSpec const mask_spec = is_dataset_level(spec) ? CorruptionSpec{NoOpSpec{}} : spec;
    DatasetPlan const plan =
        build_dataset_plan(plan_spec, ids, SeedKey{config.seed, 0, 0, op_tags::dataset_plan});

    // Labeled subset is fixed for the run; unlabeled samples are unused by
    // this purely supervised learner.
    std::vector<int> candidates = plan.retained();
    std::size_t const n_labeled = std::min(
        candidates.size(),
        static_cast<std::size_t>(round_half_up(config.labeled_fraction * ids.size())));
    {
        CounterRng rng(SeedKey{config.seed, 0, 0, op_tags::labeled_subset});
        for (std::size_t i = 0; i < n_labeled && i + 1 < candidates.size(); ++i) {
            std::size_t const j = i + rng.next_below(candidates.size() - i);
            std::swap(candidates[i], candidates[j]);
        }
    }
    std::vector<int> trainable(candidates.begin(), candidates.begin() + n_labeled);
    std::sort(trainable.begin(), trainable.end());
    if (trainable.empty()) {
        throw std::invalid_argument("no trainable samples remain after discard/labeling");
    }

    TrainResult result;
    result.model = PatchScorer::zeros(dataset.front().image.channels(), config.patch_size);
    std::size_t const n_params = result.model.weights.size();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<int> order = trainable;
        {
            CounterRng rng(SeedKey{config.seed, static_cast<std::uint32_t>(epoch), 0,
                                   op_tags::batch_shuffle});
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                std::size_t const j = i + rng.next_below(order.size() - i);
                std::swap(order[i], order[j]);
            }
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            std::size_t const stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            std::vector<double> batch_grad(n_params, 0.0);
            double batch_bias_grad = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                int const id = order[i];
                Sample const &sample = dataset[index_by_id.at(id)];
                Mask const &reference = dataset[index_by_id.at(plan.mapped(id))].mask;
                Mask const target =
                    apply(mask_spec, reference,
                          SeedKey{config.seed, static_cast<std::uint32_t>(epoch),
                                  static_cast<std::uint32_t>(id), 0});
                ParamGradient const g =
                    loss_and_param_gradient(result.model, sample.image, target,
                                            config.smoothing_eps);
                epoch_loss += g.loss;
                for (std::size_t w = 0; w < n_params; ++w) {
                    batch_grad[w] += g.weights[w];
                }
                batch_bias_grad += g.bias;
            }
            double const scale = config.learning_rate / static_cast<double>(stop - start);
            for (std::size_t w = 0; w < n_params; ++w) {
                result.model.weights[w] -= scale * batch_grad[w];
            }
            result.model.bias -= scale * batch_bias_grad;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return result;
}

Mask predict_mask(PatchScorer const &model, MultiChannelImage const &image) {
    std::vector<double> const probs = forward(model, image);
    Mask out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            if (probs[static_cast<std::size_t>(y) * image.width() + x] >= 0.5) {
                out.set(x, y, true);
            }
        }
    }
    return out;
}

double evaluate_pooled_dice(PatchScorer const &model, std::span<Sample const> samples) {
    OverlapCounts counts;
    for (Sample const &s : samples) {
        accumulate(counts, predict_mask(model, s.image), s.mask);
    }
    return pooled_dice(counts);
}

void save_model(std::filesystem::path const &path, PatchScorer const &model) {
    check_model(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write model file: " + path.string());
    }
    nlohmann::json const header{{"patch_size", model.patch_size}, {"channels", model.channels}};
    out << header.dump() << '\n';
    // Flat little-endian float64 block: weights then bias.
    auto write_f64 = [&](double v) {
        static_assert(sizeof(double) == 8);
        out.write(reinterpret_cast<char const *>(&v), sizeof(v));
    };
    for (double w : model.weights) {
        write_f64(w);
    }
    write_f64(model.bias);
    if (!out) {
        throw std::runtime_error("failed writing model file: " + path.string());
    }
}

PatchScorer load_model(std::filesystem::path const &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read model file: " + path.string());
    }
    std::string header_line;
    std::getline(in, header_line);
    nlohmann::json const header = nlohmann::json::parse(header_line);
    PatchScorer model = PatchScorer::zeros(header.at("channels").get<int>(),
                                           header.at("patch_size").get<int>());
    for (double &w : model.weights) {
        in.read(reinterpret_cast<char *>(&w), sizeof(w));
    }
    in.read(reinterpret_cast<char *>(&model.bias), sizeof(model.bias));
    if (!in) {
        throw std::runtime_error("truncated model file: " + path.string());
    }
    return model;
}

} // namespace segnoise
