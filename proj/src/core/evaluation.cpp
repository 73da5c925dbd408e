#include "evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "errors.hpp"
#include "labels.hpp"

namespace affectfuse {

std::vector<std::string> FoldPlan::test_subjects(int fold, const std::string& country) const {
    std::vector<std::string> out;
    for (const auto& [subject, f] : fold_of_subject) {
        if (f != fold) continue;
        if (country != labels::kWhole && country_of_subject.at(subject) != country) continue;
        out.push_back(subject);
    }
    return out;
}

bool FoldPlan::in_test(const std::string& subject, int fold) const {
    auto it = fold_of_subject.find(subject);
    if (it == fold_of_subject.end())
        throw ValidationError("fold plan: unknown subject '" + subject + "'");
    return it->second == fold;
}

FoldPlan make_folds(const std::vector<Subject>& subjects, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("make_folds: k must be at least 2");
    std::map<std::string, std::vector<std::string>> by_country;
    for (const auto& s : subjects) {
        if (by_country[s.country].end() !=
            std::find(by_country[s.country].begin(), by_country[s.country].end(), s.id))
            throw ValidationError("make_folds: duplicate subject '" + s.id + "'");
        by_country[s.country].push_back(s.id);
    }
    FoldPlan plan;
    plan.k = k;
    std::uint64_t country_stream = 0;
    for (auto& [country, ids] : by_country) {
        if (static_cast<int>(ids.size()) < k)
            throw ValidationError("make_folds: country " + country + " has " +
                                  std::to_string(ids.size()) + " subjects, needs at least " +
                                  std::to_string(k));
        std::sort(ids.begin(), ids.end());
        Rng rng(split_seed(seed, country_stream++));
        rng.shuffle(ids);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            plan.fold_of_subject[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
            plan.country_of_subject[ids[i]] = country;
        }
    }
    return plan;
}

int default_epochs(LabelType label_type, const std::string& country) {
    if (label_type == LabelType::Audio && country == "NO") return 200;
    return 100;
}

std::int64_t default_budget(LabelType label_type, const std::string& country) {
    if (label_type == LabelType::Video) return 7500;
    if (country == "SP") return 5418;
    if (country == "FR") return 2556;
    if (country == "NO") return 234;
    return 10494;  // WH
}

namespace {

const std::vector<std::string>& class_names(LabelType t) {
    return t == LabelType::Audio ? labels::kAudioKeep : labels::kVideoKeep;
}

const std::string& row_label(const SampleRow& row, LabelType t) {
    return t == LabelType::Audio ? row.audio_label : row.video_label;
}

bool row_in_country(const SampleRow& row, const std::string& country) {
    return country == labels::kWhole || row.country == country;
}

bool row_speaking_ok(const SampleRow& row, SpeakingFilter f) {
    if (f == SpeakingFilter::All) return true;
    return (f == SpeakingFilter::Speech) == row.speaking;
}

struct EncodedRows {
    Dataset data;
    std::vector<std::string> subjects;  // per row
};

EncodedRows collect_rows(const SampleMatrix& matrix, const std::string& country, SpeakingFilter speaking,
                         const std::vector<std::string>& classes) {
    EncodedRows out;
    out.data.dim = matrix.feature_dim;
    for (const auto& row : matrix.rows) {
        if (!row_in_country(row, country)) continue;
        if (!row_speaking_ok(row, speaking)) continue;
        const int cls = labels::index_of(classes, row_label(row, matrix.label_type));
        if (cls < 0) continue;
        out.data.x.insert(out.data.x.end(), row.features.begin(), row.features.end());
        out.data.y.push_back(cls);
        out.subjects.push_back(row.subject_id);
        ++out.data.n;
    }
    return out;
}

Dataset filter_by_subjects(const EncodedRows& rows, const std::set<std::string>& allowed, bool keep_inside) {
    Dataset d;
    d.dim = rows.data.dim;
    for (std::size_t i = 0; i < rows.data.n; ++i) {
        const bool inside = allowed.count(rows.subjects[i]) > 0;
        if (inside != keep_inside) continue;
        const double* r = rows.data.row(i);
        d.x.insert(d.x.end(), r, r + d.dim);
        d.y.push_back(rows.data.y[i]);
        ++d.n;
    }
    return d;
}

std::vector<std::vector<std::int64_t>> evaluate_confusion(const MlpModel& model, const Dataset& test,
                                                          std::size_t n_classes) {
    std::vector<std::vector<std::int64_t>> confusion(n_classes,
                                                     std::vector<std::int64_t>(n_classes, 0));
    for (std::size_t i = 0; i < test.n; ++i) {
        const auto p = model.forward(test.row(i));
        const int pred = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
        ++confusion[static_cast<std::size_t>(test.y[i])][static_cast<std::size_t>(pred)];
    }
    return confusion;
}

MlpModel train_once(const Dataset& train_raw, const std::vector<int>& arch, const TrainConfig& cfg,
                    std::size_t n_classes, std::uint64_t seed, Normalizer* out_nz = nullptr) {
    Dataset train = train_raw;
    const Normalizer nz = Normalizer::fit(train);
    nz.apply(train);
    if (out_nz) *out_nz = nz;
    std::vector<int> widths;
    widths.push_back(static_cast<int>(train.dim));
    widths.insert(widths.end(), arch.begin(), arch.end());
    widths.push_back(static_cast<int>(n_classes));
    MlpModel model = MlpModel::init(widths, split_seed(seed, 0xA11), cfg.dropout_rate);
    train_mlp(model, train, cfg, split_seed(seed, 0x7247));
    return model;
}

double evaluate_uar(const MlpModel& model, const Normalizer& nz, const Dataset& test_raw,
                    std::size_t n_classes) {
    Dataset test = test_raw;
    nz.apply(test);
    return uar(evaluate_confusion(model, test, n_classes));
}

std::set<std::string> subjects_of(const EncodedRows& rows) {
    return {rows.subjects.begin(), rows.subjects.end()};
}

}  // namespace

std::size_t model_select(const SampleMatrix& matrix, const FoldPlan& plan,
                         const ExperimentConfig& config) {
    if (config.archs.empty()) throw ValidationError("model_select: no candidate architectures");
    if (config.archs.size() == 1) return 0;

    const auto& classes = class_names(matrix.label_type);
    const EncodedRows train_pool = collect_rows(matrix, config.train_country, config.speaking_train, classes);
    if (train_pool.data.n == 0) throw ValidationError("model_select: no training rows");

    std::vector<double> mean_val_uar(config.archs.size(), 0.0);
    std::vector<int> n_evals(config.archs.size(), 0);
    for (int fold = 0; fold < plan.k; ++fold) {
        // train split of this fold, then a subject-level validation holdout
        std::set<std::string> fold_test;
        for (const auto& [subject, f] : plan.fold_of_subject)
            if (f == fold) fold_test.insert(subject);
        EncodedRows fold_train;
        fold_train.data.dim = train_pool.data.dim;
        for (std::size_t i = 0; i < train_pool.data.n; ++i) {
            if (fold_test.count(train_pool.subjects[i])) continue;
            const double* r = train_pool.data.row(i);
            fold_train.data.x.insert(fold_train.data.x.end(), r, r + fold_train.data.dim);
            fold_train.data.y.push_back(train_pool.data.y[i]);
            fold_train.subjects.push_back(train_pool.subjects[i]);
            ++fold_train.data.n;
        }
        const std::set<std::string> train_subject_set = subjects_of(fold_train);
        std::vector<std::string> train_subjects(train_subject_set.begin(), train_subject_set.end());
        if (train_subjects.size() < 2) continue;
        std::sort(train_subjects.begin(), train_subjects.end());
        Rng rng(split_seed(config.seed, 0x5E1 + static_cast<std::uint64_t>(fold)));
        rng.shuffle(train_subjects);
        const std::size_t n_val = std::max<std::size_t>(
            1, static_cast<std::size_t>(config.validation_fraction *
                                        static_cast<double>(train_subjects.size())));
        std::set<std::string> val_subjects(train_subjects.begin(),
                                           train_subjects.begin() + static_cast<std::ptrdiff_t>(n_val));

        const Dataset train_part = filter_by_subjects(fold_train, val_subjects, false);
        const Dataset val_part = filter_by_subjects(fold_train, val_subjects, true);
        if (train_part.n == 0 || val_part.n == 0) continue;

        for (std::size_t a = 0; a < config.archs.size(); ++a) {
            Normalizer nz;
            const MlpModel model =
                train_once(train_part, config.archs[a], config.train,
                           classes.size(), split_seed(config.seed, 0xB0 + a * 131 + static_cast<std::uint64_t>(fold)),
                           &nz);
            mean_val_uar[a] += evaluate_uar(model, nz, val_part, classes.size());
            ++n_evals[a];
        }
    }
    std::size_t best = 0;
    double best_uar = -1.0;
    for (std::size_t a = 0; a < config.archs.size(); ++a) {
        const double u = n_evals[a] ? mean_val_uar[a] / n_evals[a] : 0.0;
        if (u > best_uar) {
            best_uar = u;
            best = a;
        }
    }
    return best;
}

EvalReport run_experiment(const SampleMatrix& matrix, const FoldPlan& plan,
                          const ExperimentConfig& config) {
    const auto& classes = class_names(matrix.label_type);
    const std::size_t arch_idx = model_select(matrix, plan, config);
    const std::vector<int>& arch = config.archs[arch_idx];

    EvalReport report;
    report.id = config.id;
    report.label_type = matrix.label_type == LabelType::Audio ? "audio" : "video";
    report.modalities = matrix.modalities.to_string();
    report.train_country = config.train_country;
    report.test_country = config.test_country;
    report.speaking_train = config.speaking_train == SpeakingFilter::All
                                ? "all"
                                : (config.speaking_train == SpeakingFilter::Speech ? "speech" : "silence");
    report.speaking_test = config.speaking_test == SpeakingFilter::All
                               ? "all"
                               : (config.speaking_test == SpeakingFilter::Speech ? "speech" : "silence");
    report.classes = classes;
    report.arch = arch;
    report.folds = plan.k;
    report.runs = config.runs;
    report.seed = config.seed;
    report.confusion_total.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));

    const EncodedRows train_pool = collect_rows(matrix, config.train_country, config.speaking_train, classes);
    const EncodedRows test_pool = collect_rows(matrix, config.test_country, config.speaking_test, classes);
    if (train_pool.data.n == 0) throw ValidationError("run_experiment: no training rows");

    std::vector<std::vector<double>> recall_values(classes.size());

    for (int fold = 0; fold < plan.k; ++fold) {
        std::set<std::string> fold_test;
        for (const auto& [subject, f] : plan.fold_of_subject)
            if (f == fold) fold_test.insert(subject);

        const Dataset train_raw = filter_by_subjects(train_pool, fold_test, false);
        const Dataset test_raw = filter_by_subjects(test_pool, fold_test, true);
        report.n_train_per_fold.push_back(static_cast<std::int64_t>(train_raw.n));
        report.n_test_per_fold.push_back(static_cast<std::int64_t>(test_raw.n));
        if (test_raw.n == 0 || train_raw.n == 0) {
            ++report.skipped_folds;
            continue;
        }

        for (int run = 0; run < config.runs; ++run) {
            Normalizer nz;
            const MlpModel model = train_once(
                train_raw, arch, config.train, classes.size(),
                split_seed(config.seed, static_cast<std::uint64_t>(fold) * 101 + static_cast<std::uint64_t>(run)),
                &nz);
            Dataset test = test_raw;
            nz.apply(test);
            const auto confusion = evaluate_confusion(model, test, classes.size());
            report.uar_per_eval.push_back(uar(confusion));
            for (std::size_t c = 0; c < classes.size(); ++c) {
                std::int64_t row_sum = 0;
                for (std::size_t j = 0; j < classes.size(); ++j) {
                    row_sum += confusion[c][j];
                    report.confusion_total[c][j] += confusion[c][j];
                }
                if (row_sum > 0)
                    recall_values[c].push_back(static_cast<double>(confusion[c][c]) /
                                               static_cast<double>(row_sum));
            }
        }
    }

    if (report.uar_per_eval.empty()) throw RuntimeError("run_experiment: every fold was skipped");
    report.uar_mean = mean(report.uar_per_eval);
    report.uar_sem = sample_sd(report.uar_per_eval) /
                     std::sqrt(static_cast<double>(report.uar_per_eval.size()));
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& vals = recall_values[c];
        report.per_class_recall_mean.push_back(vals.empty() ? 0.0 : mean(vals));
        report.per_class_recall_sem.push_back(
            vals.size() > 1 ? sample_sd(vals) / std::sqrt(static_cast<double>(vals.size())) : 0.0);
    }
    return report;
}

std::vector<PairwiseComparison> pairwise_stats(const std::vector<EvalReport>& reports, double q,
                                               const std::string& group_by) {
    if (group_by != "country" && group_by != "country_label")
        throw ValidationError("pairwise_stats: group_by must be 'country' or 'country_label'");
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::string key = reports[i].test_country;
        if (group_by == "country_label") key += ":" + reports[i].label_type;
        groups[key].push_back(i);
    }

    std::vector<PairwiseComparison> out;
    for (const auto& [key, members] : groups) {
        std::vector<std::size_t> comparison_at;
        std::vector<double> pvals;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const EvalReport& ra = reports[members[a]];
                const EvalReport& rb = reports[members[b]];
                if (ra.uar_per_eval.size() != rb.uar_per_eval.size())
                    throw ValidationError("pairwise_stats: " + ra.id + " and " + rb.id +
                                          " have different evaluation counts");
                std::vector<double> diffs(ra.uar_per_eval.size());
                for (std::size_t i = 0; i < diffs.size(); ++i)
                    diffs[i] = ra.uar_per_eval[i] - rb.uar_per_eval[i];
                double n_train = 0, n_test = 0;
                for (std::size_t f = 0; f < ra.n_train_per_fold.size(); ++f) {
                    n_train += static_cast<double>(ra.n_train_per_fold[f]);
                    n_test += static_cast<double>(ra.n_test_per_fold[f]);
                }
                n_train /= static_cast<double>(ra.n_train_per_fold.size());
                n_test /= static_cast<double>(ra.n_test_per_fold.size());
                const TTestResult t = corrected_ttest(diffs, n_train, n_test);
                PairwiseComparison cmp;
                cmp.group = key;
                cmp.experiment_a = ra.id;
                cmp.experiment_b = rb.id;
                cmp.mean_diff = mean(diffs);
                cmp.t = t.t;
                cmp.p = t.p;
                cmp.degenerate = t.degenerate;
                comparison_at.push_back(out.size());
                pvals.push_back(t.p);
                out.push_back(cmp);
            }
        }
        if (!pvals.empty()) {
            const auto reject = bky_fdr(pvals, q);
            for (std::size_t i = 0; i < reject.size(); ++i) out[comparison_at[i]].reject = reject[i];
        }
    }
    return out;
}

}  // namespace affectfuse
