#include "mlp.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace affectfuse {

std::size_t MlpModel::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

MlpModel MlpModel::zeros(const std::vector<int>& widths, double dropout_rate) {
    if (widths.size() < 2) throw ValidationError("mlp: need at least input and output widths");
    MlpModel m;
    m.widths = widths;
    m.dropout_rate = dropout_rate;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        m.weights.emplace_back(static_cast<std::size_t>(widths[l + 1]) * widths[l], 0.0);
        m.biases.emplace_back(static_cast<std::size_t>(widths[l + 1]), 0.0);
    }
    return m;
}

MlpModel MlpModel::init(const std::vector<int>& widths, std::uint64_t seed, double dropout_rate) {
    MlpModel m = zeros(widths, dropout_rate);
    m.rng_seed = seed;
    Rng rng(seed);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(widths[l]));
        for (double& w : m.weights[l]) w = rng.uniform(-limit, limit);
    }
    return m;
}

namespace {

void softmax_inplace(std::vector<double>& z) {
    double mx = z[0];
    for (double v : z) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

struct ForwardCache {
    std::vector<std::vector<double>> activations;  // input + post-ReLU of hidden layers
    std::vector<std::vector<double>> dropout_mask; // per hidden layer; empty when unused
    std::vector<double> probs;
};

void forward_pass(const MlpModel& model, const double* x, bool use_dropout, Rng* rng,
                  ForwardCache* cache, std::vector<double>& out) {
    const std::size_t n_layers = model.weights.size();
    std::vector<double> cur(x, x + model.widths[0]);
    if (cache) {
        cache->activations.clear();
        cache->dropout_mask.assign(n_layers > 0 ? n_layers - 1 : 0, {});
        cache->activations.push_back(cur);
    }
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int in = model.widths[l];
        const int outw = model.widths[l + 1];
        std::vector<double> next(static_cast<std::size_t>(outw));
        const double* W = model.weights[l].data();
        for (int o = 0; o < outw; ++o) {
            double acc = model.biases[l][static_cast<std::size_t>(o)];
            const double* wrow = W + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += wrow[i] * cur[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = acc;
        }
        const bool is_output = l + 1 == n_layers;
        if (!is_output) {
            for (double& v : next) v = v > 0.0 ? v : 0.0;
            if (use_dropout && model.dropout_rate > 0.0) {
                const double keep = 1.0 - model.dropout_rate;
                std::vector<double> mask(next.size());
                for (std::size_t i = 0; i < next.size(); ++i) {
                    mask[i] = (rng->uniform() < keep) ? 1.0 / keep : 0.0;
                    next[i] *= mask[i];
                }
                if (cache) cache->dropout_mask[l] = std::move(mask);
            }
            if (cache) cache->activations.push_back(next);
        } else {
            softmax_inplace(next);
            if (cache) cache->probs = next;
        }
        cur = std::move(next);
    }
    out = std::move(cur);
}

}  // namespace

std::vector<double> MlpModel::forward(const double* x, bool train_mode, Rng* rng) const {
    if (train_mode && dropout_rate > 0.0 && !rng)
        throw ValidationError("mlp forward: training mode with dropout needs an rng");
    std::vector<double> out;
    forward_pass(*this, x, train_mode && dropout_rate > 0.0, rng, nullptr, out);
    return out;
}

std::vector<double> MlpModel::forward(const std::vector<double>& x, bool train_mode, Rng* rng) const {
    if (static_cast<int>(x.size()) != widths[0])
        throw ValidationError("mlp forward: input is " + std::to_string(x.size()) + "D, model expects " +
                              std::to_string(widths[0]));
    return forward(x.data(), train_mode, rng);
}

double mlp_loss_and_gradients(const MlpModel& model, const Dataset& batch,
                              const std::vector<std::size_t>& indices,
                              std::vector<std::vector<double>>& grad_w,
                              std::vector<std::vector<double>>& grad_b, bool use_dropout, Rng* rng) {
    const std::size_t n_layers = model.weights.size();
    grad_w.resize(n_layers);
    grad_b.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        grad_w[l].assign(model.weights[l].size(), 0.0);
        grad_b[l].assign(model.biases[l].size(), 0.0);
    }
    if (indices.empty()) return 0.0;

    double total_loss = 0.0;
    ForwardCache cache;
    std::vector<double> out;
    for (std::size_t idx : indices) {
        forward_pass(model, batch.row(idx), use_dropout, rng, &cache, out);
        const int target = batch.y[idx];
        const double p = std::max(cache.probs[static_cast<std::size_t>(target)], 1e-300);
        total_loss += -std::log(p);

        // delta at the output: softmax + cross-entropy
        std::vector<double> delta = cache.probs;
        delta[static_cast<std::size_t>(target)] -= 1.0;

        for (std::size_t l = n_layers; l-- > 0;) {
            const int in = model.widths[l];
            const int outw = model.widths[l + 1];
            const std::vector<double>& act = cache.activations[l];
            double* gw = grad_w[l].data();
            for (int o = 0; o < outw; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                grad_b[l][static_cast<std::size_t>(o)] += d;
                double* grow = gw + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) grow[i] += d * act[static_cast<std::size_t>(i)];
            }
            if (l == 0) break;
            std::vector<double> prev_delta(static_cast<std::size_t>(in), 0.0);
            const double* W = model.weights[l].data();
            for (int o = 0; o < outw; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                const double* wrow = W + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) prev_delta[static_cast<std::size_t>(i)] += d * wrow[i];
            }
            // through dropout then ReLU of the previous hidden layer
            const std::vector<double>& mask = cache.dropout_mask[l - 1];
            for (int i = 0; i < in; ++i) {
                double g = prev_delta[static_cast<std::size_t>(i)];
                if (!mask.empty()) g *= mask[static_cast<std::size_t>(i)];
                if (act[static_cast<std::size_t>(i)] <= 0.0) g = 0.0;
                prev_delta[static_cast<std::size_t>(i)] = g;
            }
            delta = std::move(prev_delta);
        }
    }
    const double inv_n = 1.0 / static_cast<double>(indices.size());
    for (std::size_t l = 0; l < n_layers; ++l) {
        for (double& g : grad_w[l]) g *= inv_n;
        for (double& g : grad_b[l]) g *= inv_n;
    }
    return total_loss * inv_n;
}

AdamOptimizer::AdamOptimizer(const MlpModel& model, const AdamParams& params) : params_(params) {
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        mw_.emplace_back(model.weights[l].size(), 0.0);
        vw_.emplace_back(model.weights[l].size(), 0.0);
        mb_.emplace_back(model.biases[l].size(), 0.0);
        vb_.emplace_back(model.biases[l].size(), 0.0);
    }
}

void AdamOptimizer::step(MlpModel& model, const std::vector<std::vector<double>>& grad_w,
                         const std::vector<std::vector<double>>& grad_b) {
    ++t_;
    const double bc1 = 1.0 - std::pow(params_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(params_.beta2, static_cast<double>(t_));
    auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                      const std::vector<double>& g) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = params_.beta1 * m[i] + (1.0 - params_.beta1) * g[i];
            v[i] = params_.beta2 * v[i] + (1.0 - params_.beta2) * g[i] * g[i];
            const double mh = m[i] / bc1;
            const double vh = v[i] / bc2;
            p[i] -= params_.learning_rate * mh / (std::sqrt(vh) + params_.epsilon);
        }
    };
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        update(model.weights[l], mw_[l], vw_[l], grad_w[l]);
        update(model.biases[l], mb_[l], vb_[l], grad_b[l]);
    }
}

BalancedSampler::BalancedSampler(const std::vector<int>& labels, int n_classes, std::int64_t budget,
                                 const std::vector<double>& factors) {
    if (budget <= 0) throw ValidationError("balanced_sampler: per-epoch budget must be positive");
    if (n_classes <= 0) throw ValidationError("balanced_sampler: need at least one class");
    if (!factors.empty() && static_cast<int>(factors.size()) != n_classes)
        throw ValidationError("balanced_sampler: factor count != class count");
    for (double f : factors)
        if (f <= 0.0) throw ValidationError("balanced_sampler: factors must be positive");

    by_class_.assign(static_cast<std::size_t>(n_classes), {});
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes)
            throw ValidationError("balanced_sampler: label out of range at row " + std::to_string(i));
        by_class_[static_cast<std::size_t>(labels[i])].push_back(i);
    }

    // exact quotas: split the budget proportionally to the factors, handing
    // the remainder out by largest fractional share (ties by class id)
    std::vector<double> w(static_cast<std::size_t>(n_classes), 1.0);
    if (!factors.empty()) w = factors;
    double total_w = 0.0;
    for (double f : w) total_w += f;
    quotas_.assign(static_cast<std::size_t>(n_classes), 0);
    std::vector<std::pair<double, int>> fracs;
    std::int64_t assigned = 0;
    for (int c = 0; c < n_classes; ++c) {
        const double share = static_cast<double>(budget) * w[static_cast<std::size_t>(c)] / total_w;
        quotas_[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(share);
        assigned += quotas_[static_cast<std::size_t>(c)];
        fracs.push_back({share - std::floor(share), -c});
    }
    std::sort(fracs.rbegin(), fracs.rend());
    for (std::int64_t r = 0; r < budget - assigned; ++r)
        ++quotas_[static_cast<std::size_t>(-fracs[static_cast<std::size_t>(r)].second)];

    for (int c = 0; c < n_classes; ++c) {
        if (quotas_[static_cast<std::size_t>(c)] > 0 && by_class_[static_cast<std::size_t>(c)].empty())
            throw ValidationError("balanced_sampler: class " + std::to_string(c) +
                                  " has no samples but a quota of " +
                                  std::to_string(quotas_[static_cast<std::size_t>(c)]));
    }
}

std::vector<std::size_t> BalancedSampler::epoch(Rng& rng) const {
    std::vector<std::size_t> stream;
    for (std::size_t c = 0; c < by_class_.size(); ++c) {
        std::vector<std::size_t> perm = by_class_[c];
        std::int64_t remaining = quotas_[c];
        while (remaining > 0) {
            rng.shuffle(perm);
            const std::int64_t take = std::min<std::int64_t>(remaining, static_cast<std::int64_t>(perm.size()));
            stream.insert(stream.end(), perm.begin(), perm.begin() + take);
            remaining -= take;
        }
    }
    rng.shuffle(stream);
    return stream;
}

TrainResult train_mlp(MlpModel& model, const Dataset& data, const TrainConfig& config,
                      std::uint64_t seed) {
    if (data.n == 0) throw ValidationError("train: empty dataset");
    if (data.y.size() != data.n) throw ValidationError("train: labels missing");
    const int n_classes = model.widths.back();
    model.dropout_rate = config.dropout_rate;

    const std::int64_t budget =
        config.per_epoch_budget > 0 ? config.per_epoch_budget : static_cast<std::int64_t>(data.n);
    BalancedSampler sampler(data.y, n_classes, budget, config.oversample_factors);

    Rng rng(seed);
    AdamOptimizer opt(model, config.adam);
    std::vector<std::vector<double>> gw, gb;
    TrainResult result;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<std::size_t> stream = sampler.epoch(rng);
        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < stream.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end = std::min(stream.size(), start + static_cast<std::size_t>(config.batch_size));
            std::vector<std::size_t> batch(stream.begin() + static_cast<std::ptrdiff_t>(start),
                                           stream.begin() + static_cast<std::ptrdiff_t>(end));
            const double loss =
                mlp_loss_and_gradients(model, data, batch, gw, gb, config.dropout_rate > 0.0, &rng);
            if (!std::isfinite(loss))
                throw RuntimeError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(n_batches) +
                                   " (lr=" + std::to_string(config.adam.learning_rate) + ")");
            opt.step(model, gw, gb);
            epoch_loss += loss;
            ++n_batches;
        }
        result.epoch_loss.push_back(n_batches ? epoch_loss / static_cast<double>(n_batches) : 0.0);
    }
    return result;
}

Normalizer Normalizer::fit(const Dataset& train) {
    if (train.n == 0) throw ValidationError("normalizer: empty training split");
    Normalizer nz;
    nz.min.assign(train.dim, 0.0);
    nz.max.assign(train.dim, 0.0);
    for (std::size_t j = 0; j < train.dim; ++j) {
        nz.min[j] = nz.max[j] = train.row(0)[j];
    }
    for (std::size_t i = 1; i < train.n; ++i) {
        const double* r = train.row(i);
        for (std::size_t j = 0; j < train.dim; ++j) {
            nz.min[j] = std::min(nz.min[j], r[j]);
            nz.max[j] = std::max(nz.max[j], r[j]);
        }
    }
    return nz;
}

void Normalizer::apply_row(double* row, std::size_t dim) const {
    if (dim != min.size()) throw ValidationError("normalizer: dimension mismatch");
    for (std::size_t j = 0; j < dim; ++j) {
        const double span = max[j] - min[j];
        row[j] = span > 0.0 ? (row[j] - min[j]) / span : 0.0;
    }
}

void Normalizer::apply(Dataset& data) const {
    for (std::size_t i = 0; i < data.n; ++i) apply_row(data.row(i), data.dim);
}

EnrichmentConfig EnrichmentConfig::defaults() {
    EnrichmentConfig c;
    // 1024 + 5 + 1 + 1 + 0 = 1031. The four heads are all trained; how many
    // of each head's logits join the feature vector is configuration, and
    // this default drops dominance entirely (nearly constant in practice).
    c.heads = {{"categorical", 5, 5}, {"valence", 3, 1}, {"arousal", 3, 1}, {"dominance", 3, 0}};
    return c;
}

void EnrichmentConfig::validate() const {
    if (heads.empty()) throw ValidationError("enrichment: no heads configured");
    int total = 0;
    std::string widths;
    for (const auto& h : heads) {
        if (h.append_logits < 0 || h.append_logits > h.n_classes)
            throw ValidationError("enrichment: head '" + h.name + "' appends " +
                                  std::to_string(h.append_logits) + " of " + std::to_string(h.n_classes) +
                                  " logits");
        total += h.append_logits;
        if (!widths.empty()) widths += " + ";
        widths += h.name + ":" + std::to_string(h.append_logits);
    }
    if (input_dim + total != target_width)
        throw ValidationError("enrichment: appended logit widths " + widths + " sum to " +
                              std::to_string(total) + ", need " + std::to_string(target_width - input_dim) +
                              " for a " + std::to_string(target_width) + "D output");
}

SpeechEnrichment SpeechEnrichment::zeros(const EnrichmentConfig& config) {
    config.validate();
    SpeechEnrichment e;
    e.config_ = config;
    for (const auto& h : config.heads) {
        e.heads_.push_back(MlpModel::zeros({config.input_dim, config.hidden, h.n_classes}, 0.0));
        e.train_accuracy_.push_back(0.0);
    }
    return e;
}

SpeechEnrichment SpeechEnrichment::train(const Dataset& embeddings,
                                         const std::vector<std::vector<int>>& labels_per_head,
                                         const EnrichmentConfig& config, std::uint64_t seed) {
    config.validate();
    if (labels_per_head.size() != config.heads.size())
        throw ValidationError("enrichment: label tracks != configured heads");
    if (embeddings.dim != static_cast<std::size_t>(config.input_dim))
        throw ValidationError("enrichment: embeddings are " + std::to_string(embeddings.dim) +
                              "D, expected " + std::to_string(config.input_dim));

    SpeechEnrichment e;
    e.config_ = config;
    for (std::size_t h = 0; h < config.heads.size(); ++h) {
        const EnrichmentHeadSpec& spec = config.heads[h];
        const std::vector<int>& labels = labels_per_head[h];
        if (labels.size() != embeddings.n)
            throw ValidationError("enrichment: head '" + spec.name + "' has " +
                                  std::to_string(labels.size()) + " labels for " +
                                  std::to_string(embeddings.n) + " rows");

        std::vector<std::size_t> usable;
        std::vector<std::int64_t> class_count(static_cast<std::size_t>(spec.n_classes), 0);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] < 0) continue;
            if (labels[i] >= spec.n_classes)
                throw ValidationError("enrichment: head '" + spec.name + "' label out of range at row " +
                                      std::to_string(i));
            usable.push_back(i);
            ++class_count[static_cast<std::size_t>(labels[i])];
        }
        if (usable.empty())
            throw ValidationError("enrichment: head '" + spec.name + "' has no labeled rows");

        // minority classes sampled minority_boost times more often than the
        // most frequent class
        int majority = 0;
        for (int c = 1; c < spec.n_classes; ++c)
            if (class_count[static_cast<std::size_t>(c)] > class_count[static_cast<std::size_t>(majority)])
                majority = c;
        std::vector<double> row_weight(usable.size());
        for (std::size_t k = 0; k < usable.size(); ++k)
            row_weight[k] = labels[usable[k]] == majority ? 1.0 : config.minority_boost;

        MlpModel head = MlpModel::init({config.input_dim, config.hidden, spec.n_classes},
                                       split_seed(seed, h), 0.0);
        AdamParams adam;
        adam.learning_rate = config.learning_rate;
        AdamOptimizer opt(head, adam);
        Rng rng(split_seed(seed, 1000 + h));

        Dataset view;  // shares the embedding matrix, with this head's labels
        view.n = embeddings.n;
        view.dim = embeddings.dim;
        view.x = embeddings.x;
        view.y.assign(embeddings.n, 0);
        for (std::size_t i = 0; i < labels.size(); ++i) view.y[i] = std::max(labels[i], 0);

        std::vector<std::vector<double>> gw, gb;
        std::vector<std::size_t> batch(static_cast<std::size_t>(config.batch_size));
        for (int it = 0; it < config.iterations; ++it) {
            for (std::size_t b = 0; b < batch.size(); ++b)
                batch[b] = usable[rng.weighted(row_weight)];
            const double loss = mlp_loss_and_gradients(head, view, batch, gw, gb, false, nullptr);
            if (!std::isfinite(loss))
                throw RuntimeError("enrichment: non-finite loss for head '" + spec.name + "'");
            opt.step(head, gw, gb);
        }

        std::int64_t correct = 0;
        for (std::size_t i : usable) {
            const std::vector<double> p = head.forward(view.row(i));
            const int pred = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
            if (pred == labels[i]) ++correct;
        }
        e.train_accuracy_.push_back(static_cast<double>(correct) / static_cast<double>(usable.size()));
        e.heads_.push_back(std::move(head));
    }
    return e;
}

std::vector<double> SpeechEnrichment::apply(const double* embedding) const {
    std::vector<double> out(embedding, embedding + config_.input_dim);
    for (std::size_t h = 0; h < heads_.size(); ++h) {
        const EnrichmentHeadSpec& spec = config_.heads[h];
        if (spec.append_logits == 0) continue;
        // raw logits (pre-softmax): run the layers by hand
        const MlpModel& m = heads_[h];
        std::vector<double> cur(embedding, embedding + config_.input_dim);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            const int in = m.widths[l], outw = m.widths[l + 1];
            std::vector<double> next(static_cast<std::size_t>(outw));
            for (int o = 0; o < outw; ++o) {
                double acc = m.biases[l][static_cast<std::size_t>(o)];
                const double* wrow = m.weights[l].data() + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) acc += wrow[i] * cur[static_cast<std::size_t>(i)];
                next[static_cast<std::size_t>(o)] = acc;
            }
            if (l + 1 < m.weights.size())
                for (double& v : next) v = v > 0.0 ? v : 0.0;
            cur = std::move(next);
        }
        out.insert(out.end(), cur.begin(), cur.begin() + spec.append_logits);
    }
    if (static_cast<int>(out.size()) != config_.target_width)
        throw RuntimeError("enrichment output is " + std::to_string(out.size()) + "D, expected " +
                           std::to_string(config_.target_width));
    return out;
}

}  // namespace affectfuse
