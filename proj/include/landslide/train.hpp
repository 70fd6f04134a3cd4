#pragma once

#include <optional>
#include <string>

#include "landslide/augment.hpp"
#include "landslide/metrics.hpp"
#include "landslide/nn/adam.hpp"
#include "landslide/nn/model.hpp"
#include "landslide/sampling.hpp"

namespace landslide {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 1e-3;
    AugmentationConfig augmentation;
    uint64_t seed = 0;
    std::optional<int> early_stop_patience;  // epochs without test-loss improvement
};

// JSON round-trip per the config-file interface; unknown keys are rejected.
TrainConfig train_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& cfg);

struct TrainOutcome {
    EvalReport report;   // test-split metrics plus per-epoch train loss curve
    nn::AdamState adam;  // final optimizer state, for checkpointing
};

// Seeded epochs of augmented mini-batch training. Per epoch the train split
// is shuffled, each patch augmented on the fly and resampled to the model
// input size, then forward/loss/backward/adam per batch. Evaluation runs on
// the test split with augmentation and dropout off. Deterministic for a
// fixed seed in single-threaded mode. Pass a resume state to continue a
// checkpointed optimizer.
TrainOutcome train(nn::Model& model, const PatchSet& patchset, const TrainConfig& cfg,
                   const nn::AdamState* resume = nullptr);

// Argmax predictions over patches (infer mode), confusion with Landslide
// positive, Eq.-style accuracy/precision/recall.
EvalReport evaluate(const nn::Model& model, const std::vector<Patch>& patches);

// Mean SCC loss over patches in infer mode.
double mean_loss(const nn::Model& model, const std::vector<Patch>& patches);

}  // namespace landslide
