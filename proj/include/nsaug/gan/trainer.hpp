#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nsaug/gan/checkpoint.hpp"
#include "nsaug/gan/config.hpp"
#include "nsaug/gan/losses.hpp"
#include "nsaug/gan/model.hpp"
#include "nsaug/image.hpp"
#include "nsaug/nn/adam.hpp"

namespace nsaug::gan {

/// One training example: an image plus the index of the style domain it
/// belongs to.  Images may be any size; the trainer fits them to the
/// configured square resolution before use.
struct TrainItem {
    Image image;
    int domain = 0;
};

struct TrainOptions {
    /// Directory that receives losses.csv and all checkpoints.  Created if
    /// missing.
    std::string out_dir;
    /// Optional checkpoint to resume from.  Must match the architecture of
    /// the supplied config; training continues from its stored step.
    std::string resume_from;
    /// Print a progress line through warn() every N steps.  0 disables.
    int progress_every = 0;
};

struct TrainResult {
    std::shared_ptr<GanModel<float>> model;
    std::shared_ptr<nn::Adam<float>> opt_gen;
    std::shared_ptr<nn::Adam<float>> opt_dis;
    std::string final_checkpoint;
    std::string log_path;
};

/// Convert an image to a (1,3,size,size) CHW tensor in [0,1], fitting it to
/// the square resolution first.
nn::Tensor<float> image_to_tensor(const Image& img, int size);

/// Extract sample `n` of a (N,3,H,W) tensor as an image, clamping to [0,1].
Image tensor_to_image(const nn::Tensor<float>& t, int n);

/// Run the adversarial training loop over `corpus`.  Requires images from at
/// least two distinct domains.  Writes losses.csv (one row per step),
/// periodic checkpoints, and final.ckpt into opts.out_dir.  Aborts with
/// NumericalError if any logged loss becomes non-finite, saving an emergency
/// checkpoint first.
TrainResult train(const std::vector<TrainItem>& corpus, const NetConfig& config,
                  const LossWeights& weights, const TrainOptions& opts);

}  // namespace nsaug::gan
