#pragma once

#include <memory>
#include <string>

#include "nsaug/gan/config.hpp"
#include "nsaug/gan/model.hpp"
#include "nsaug/nn/adam.hpp"

namespace nsaug::gan {

struct LoadedCheckpoint {
    LossWeights weights;
    std::shared_ptr<GanModel<float>> model;  // parameters and step restored
    bool has_optimizer = false;
    std::shared_ptr<nn::Adam<float>> opt_gen, opt_dis;
};

// Versioned binary container: config echo, loss weights, step counter, and
// named parameter blocks, with optimizer moments when provided. Round-trips
// bit-exactly on the writing platform.
void save_checkpoint(const std::string& path, const GanModel<float>& model,
                     const LossWeights& weights, const nn::Adam<float>* opt_gen = nullptr,
                     const nn::Adam<float>* opt_dis = nullptr);

LoadedCheckpoint load_checkpoint(const std::string& path);

// Loading for a resume: the checkpoint must be architecture-compatible with
// `expected`; training-schedule fields may differ.
LoadedCheckpoint load_checkpoint_compatible(const std::string& path, const NetConfig& expected);

}  // namespace nsaug::gan
