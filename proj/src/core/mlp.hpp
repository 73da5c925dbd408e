#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rng.hpp"

namespace affectfuse {

// Row batch: n rows of dim features, flat row-major.
struct Dataset {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::vector<double> x;
    std::vector<int> y;  // class indices, empty when unlabeled

    const double* row(std::size_t i) const { return x.data() + i * dim; }
    double* row(std::size_t i) { return x.data() + i * dim; }
};

// Fully connected net: widths[0] inputs, widths.back() classes, ReLU on all
// hidden layers, softmax on the output. Dropout (inverted) only in training.
struct MlpModel {
    std::vector<int> widths;
    std::vector<std::vector<double>> weights;  // per layer, row-major [out x in]
    std::vector<std::vector<double>> biases;
    double dropout_rate = 0.5;
    std::uint64_t rng_seed = 0;

    static MlpModel zeros(const std::vector<int>& widths, double dropout_rate = 0.5);
    // He-style uniform init scaled by fan-in, deterministic from seed
    static MlpModel init(const std::vector<int>& widths, std::uint64_t seed, double dropout_rate = 0.5);

    std::size_t layer_count() const { return weights.size(); }
    std::size_t param_count() const;

    // class probabilities; train_mode applies dropout using rng
    std::vector<double> forward(const double* x, bool train_mode = false, Rng* rng = nullptr) const;
    std::vector<double> forward(const std::vector<double>& x, bool train_mode = false,
                                Rng* rng = nullptr) const;
};

// Mean cross-entropy over the batch plus gradients (same layout as the
// model's weights/biases). Dropout masks are drawn here when enabled so the
// backward pass reuses them.
double mlp_loss_and_gradients(const MlpModel& model, const Dataset& batch,
                              const std::vector<std::size_t>& indices,
                              std::vector<std::vector<double>>& grad_w,
                              std::vector<std::vector<double>>& grad_b, bool use_dropout, Rng* rng);

struct AdamParams {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamOptimizer {
public:
    explicit AdamOptimizer(const MlpModel& model, const AdamParams& params = {});
    void step(MlpModel& model, const std::vector<std::vector<double>>& grad_w,
              const std::vector<std::vector<double>>& grad_b);

private:
    AdamParams params_;
    std::vector<std::vector<double>> mw_, vw_, mb_, vb_;
    std::int64_t t_ = 0;
};

struct TrainConfig {
    AdamParams adam;
    int batch_size = 64;
    int epochs = 100;
    std::int64_t per_epoch_budget = 0;  // 0: one pass over the data, shuffled
    std::vector<double> oversample_factors;  // per class; empty = all 1
    double dropout_rate = 0.5;
};

struct TrainResult {
    std::vector<double> epoch_loss;
};

// Index stream with exact per-class quotas: the budget is split across
// classes (proportionally to the oversample factors, equal by default) and
// each class's draw list cycles fresh shuffles of its indices, so every
// sample of a class appears floor or ceil(quota/n) times per epoch.
class BalancedSampler {
public:
    BalancedSampler(const std::vector<int>& labels, int n_classes, std::int64_t budget,
                    const std::vector<double>& factors = {});

    std::vector<std::size_t> epoch(Rng& rng) const;
    const std::vector<std::int64_t>& quotas() const { return quotas_; }

private:
    std::vector<std::vector<std::size_t>> by_class_;
    std::vector<std::int64_t> quotas_;
};

TrainResult train_mlp(MlpModel& model, const Dataset& data, const TrainConfig& config,
                      std::uint64_t seed);

// Per-feature min/max map fitted on the training split; constant features
// map to 0 and test values pass through unclamped.
struct Normalizer {
    std::vector<double> min, max;

    static Normalizer fit(const Dataset& train);
    void apply(Dataset& data) const;
    void apply_row(double* row, std::size_t dim) const;
};

// --- speech enrichment (WavLM-style embeddings -> 1031-D features) --------

struct EnrichmentHeadSpec {
    std::string name;          // "categorical", "valence", "arousal", "dominance"
    int n_classes = 0;
    int append_logits = 0;     // how many leading logits join the output
};

struct EnrichmentConfig {
    std::vector<EnrichmentHeadSpec> heads;
    int input_dim = 1024;
    int hidden = 64;
    int target_width = 1031;
    double learning_rate = 1e-3;
    int iterations = 5000;
    int batch_size = 64;
    double minority_boost = 4.0;  // sampling probability multiplier vs the majority class

    static EnrichmentConfig defaults();
    void validate() const;  // append widths must sum to target - input_dim
};

class SpeechEnrichment {
public:
    // zero-initialized heads (appended logits all zero until trained)
    static SpeechEnrichment zeros(const EnrichmentConfig& config);
    // labels_per_head[h][i] is the class of row i for head h, or -1 if missing
    static SpeechEnrichment train(const Dataset& embeddings,
                                  const std::vector<std::vector<int>>& labels_per_head,
                                  const EnrichmentConfig& config, std::uint64_t seed);

    std::vector<double> apply(const double* embedding) const;  // target_width values
    const EnrichmentConfig& config() const { return config_; }
    const MlpModel& head(std::size_t i) const { return heads_[i]; }
    double head_train_accuracy(std::size_t i) const { return train_accuracy_[i]; }

private:
    EnrichmentConfig config_;
    std::vector<MlpModel> heads_;
    std::vector<double> train_accuracy_;
};

}  // namespace affectfuse
