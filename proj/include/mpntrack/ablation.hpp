#pragma once

#include <cstdint>
#include <vector>

#include "mpntrack/metrics.hpp"
#include "mpntrack/pipeline.hpp"
#include "mpntrack/synthetic.hpp"
#include "mpntrack/trainer.hpp"

namespace mpntrack {

// One synthetic benchmark: training happens on the leading frames, tracking
// metrics are computed on the trailing holdout span.
struct AblationDataset {
    SyntheticData data;
    Sequence sequence;                     // full detection stream with labels
    std::vector<Detection> holdout_detections;
    std::vector<Trajectory> holdout_gt;
    int holdout_start_frame = 0;
};

AblationDataset make_ablation_dataset(SyntheticConfig const & config, double holdout_fraction);

struct AblationRun {
    double edge_accuracy = 0.0;            // held-out, thresholded at 0.5
    double constraint_satisfaction = 0.0;  // union graph at 0.5, before rounding
    EvalResult tracking;
};

// Trains on the dataset (best-monitored checkpoint), then evaluates edge
// classification and full tracking on the holdout span.
AblationRun run_ablation(AblationDataset const & dataset, TrainConfig const & train_config,
                         PipelineConfig const & pipeline_config, Model * model_out = nullptr);

// Tracking-only evaluation for an already trained model.
AblationRun evaluate_on_holdout(AblationDataset const & dataset, Model & model,
                                TrainConfig const & train_config, PipelineConfig const & pipeline_config);

// The seeded benchmark and budget shared by the experiment drivers: 20
// tracks over 300 frames with 15% missed detections and appearance noise
// 0.3 in a crowded field, trained for 3000 iterations.
SyntheticConfig ablation_benchmark_config(std::uint64_t seed);
TrainConfig ablation_train_config(UpdateMode mode, std::uint64_t seed);
PipelineConfig ablation_pipeline_config();

}  // namespace mpntrack
