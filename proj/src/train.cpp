#include "landslide/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "landslide/detect.hpp"

namespace landslide {

using nlohmann::json;
using nn::Mode;
using nn::Tensor4;

namespace {

void fill_sample(Tensor4& batch, int slot, const Patch& patch, int in_h, int in_w) {
    resample_bilinear(patch.pixels.data(), kPatchSize, kPatchSize, kPatchBands,
                      &batch.at(slot, 0, 0, 0), in_h, in_w);
}

Tensor4 batch_from_patches(const std::vector<Patch>& patches, size_t begin, size_t count,
                           int in_h, int in_w, std::vector<int>* labels) {
    Tensor4 batch(static_cast<int>(count), in_h, in_w, kPatchBands);
    for (size_t i = 0; i < count; ++i) {
        fill_sample(batch, static_cast<int>(i), patches[begin + i], in_h, in_w);
        if (labels) labels->push_back(static_cast<int>(patches[begin + i].label));
    }
    return batch;
}

}  // namespace

TrainOutcome train(nn::Model& model, const PatchSet& patchset, const TrainConfig& cfg,
                   const nn::AdamState* resume) {
    require(cfg.epochs >= 1, "epochs must be >= 1");
    require(cfg.batch_size >= 1, "batch_size must be >= 1");
    require(cfg.learning_rate >= 0.0, "learning_rate must be non-negative");
    require(!patchset.train.empty() && !patchset.test.empty(),
            "both splits must be non-empty");
    require(model.input.c == kPatchBands, "model input must have 3 channels");
    validate_augmentation(cfg.augmentation);

    const int in_h = model.input.h, in_w = model.input.w;
    const size_t n = patchset.train.size();

    nn::AdamState adam = resume ? *resume : nn::AdamState::init_for(model, cfg.learning_rate);
    Rng stream(cfg.seed);               // shuffles and dropout
    Rng aug_stream(cfg.augmentation.seed);

    std::vector<double> curve;
    double best_test_loss = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t(0));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        stream.shuffle(order);
        double epoch_loss = 0.0;
        for (size_t start = 0; start < n; start += cfg.batch_size) {
            const size_t count = std::min(static_cast<size_t>(cfg.batch_size), n - start);
            Tensor4 batch(static_cast<int>(count), in_h, in_w, kPatchBands);
            std::vector<int> labels;
            labels.reserve(count);
            for (size_t i = 0; i < count; ++i) {
                const Patch& src = patchset.train[order[start + i]];
                const Patch augmented = cfg.augmentation.is_identity()
                                            ? src
                                            : augment(src, cfg.augmentation, aug_stream);
                fill_sample(batch, static_cast<int>(i), augmented, in_h, in_w);
                labels.push_back(static_cast<int>(augmented.label));
            }
            auto result = model.backward(batch, labels, &stream);
            nn::adam_step(model, result.grads, adam);
            epoch_loss += result.loss * static_cast<double>(count);
        }
        curve.push_back(epoch_loss / static_cast<double>(n));

        if (cfg.early_stop_patience) {
            const double test_loss = mean_loss(model, patchset.test);
            if (test_loss < best_test_loss) {
                best_test_loss = test_loss;
                since_best = 0;
            } else if (++since_best > *cfg.early_stop_patience) {
                break;
            }
        }
    }

    TrainOutcome out;
    out.report = evaluate(model, patchset.test);
    out.report.loss_curve = std::move(curve);
    out.adam = std::move(adam);
    return out;
}

EvalReport evaluate(const nn::Model& model, const std::vector<Patch>& patches) {
    require(!patches.empty(), "cannot evaluate an empty patch list");
    const int in_h = model.input.h, in_w = model.input.w;
    std::vector<int> predicted, truth;
    predicted.reserve(patches.size());
    constexpr size_t kEvalBatch = 64;
    for (size_t start = 0; start < patches.size(); start += kEvalBatch) {
        const size_t count = std::min(kEvalBatch, patches.size() - start);
        std::vector<int> labels;
        const Tensor4 batch = batch_from_patches(patches, start, count, in_h, in_w, &labels);
        const Tensor4 probs = model.forward(batch, Mode::Infer);
        for (size_t i = 0; i < count; ++i) {
            const int pred =
                probs.at(static_cast<int>(i), 0, 0, 1) > probs.at(static_cast<int>(i), 0, 0, 0)
                    ? 1
                    : 0;
            predicted.push_back(pred);
            truth.push_back(labels[i]);
        }
    }
    return report_from_confusion(confusion_from_pairs(predicted, truth));
}

double mean_loss(const nn::Model& model, const std::vector<Patch>& patches) {
    require(!patches.empty(), "cannot compute the loss of an empty patch list");
    const int in_h = model.input.h, in_w = model.input.w;
    double acc = 0.0;
    constexpr size_t kEvalBatch = 64;
    for (size_t start = 0; start < patches.size(); start += kEvalBatch) {
        const size_t count = std::min(kEvalBatch, patches.size() - start);
        std::vector<int> labels;
        const Tensor4 batch = batch_from_patches(patches, start, count, in_h, in_w, &labels);
        const Tensor4 probs = model.forward(batch, Mode::Infer);
        acc += nn::scc_loss(probs, labels).loss * static_cast<double>(count);
    }
    return acc / static_cast<double>(patches.size());
}

TrainConfig train_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("malformed train config: ") + e.what());
    }
    TrainConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "epochs") {
                cfg.epochs = value.get<int>();
            } else if (key == "batch_size") {
                cfg.batch_size = value.get<int>();
            } else if (key == "learning_rate") {
                cfg.learning_rate = value.get<double>();
            } else if (key == "seed") {
                cfg.seed = value.get<uint64_t>();
            } else if (key == "early_stop_patience") {
                if (!value.is_null()) cfg.early_stop_patience = value.get<int>();
            } else if (key == "augmentation") {
                for (const auto& [akey, avalue] : value.items()) {
                    if (akey == "flip_horizontal") {
                        cfg.augmentation.flip_horizontal = avalue.get<bool>();
                    } else if (akey == "flip_vertical") {
                        cfg.augmentation.flip_vertical = avalue.get<bool>();
                    } else if (akey == "max_rotation") {
                        cfg.augmentation.max_rotation = avalue.get<float>();
                    } else if (akey == "max_zoom") {
                        cfg.augmentation.max_zoom = avalue.get<float>();
                    } else if (akey == "max_translation") {
                        cfg.augmentation.max_translation = avalue.get<float>();
                    } else if (akey == "seed") {
                        cfg.augmentation.seed = avalue.get<uint64_t>();
                    } else {
                        fail("unknown augmentation config key: " + akey);
                    }
                }
            } else {
                fail("unknown train config key: " + key);
            }
        }
    } catch (const json::exception& e) {
        fail(std::string("malformed train config: ") + e.what());
    }
    return cfg;
}

std::string train_config_to_json(const TrainConfig& cfg) {
    json j{
        {"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"learning_rate", cfg.learning_rate},
        {"seed", cfg.seed},
        {"early_stop_patience",
         cfg.early_stop_patience ? json(*cfg.early_stop_patience) : json(nullptr)},
        {"augmentation",
         {{"flip_horizontal", cfg.augmentation.flip_horizontal},
          {"flip_vertical", cfg.augmentation.flip_vertical},
          {"max_rotation", cfg.augmentation.max_rotation},
          {"max_zoom", cfg.augmentation.max_zoom},
          {"max_translation", cfg.augmentation.max_translation},
          {"seed", cfg.augmentation.seed}}},
    };
    return j.dump(2) + "\n";
}

}  // namespace landslide
