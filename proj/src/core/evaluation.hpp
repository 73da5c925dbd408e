#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlp.hpp"
#include "stats.hpp"
#include "sync.hpp"

namespace affectfuse {

struct Subject {
    std::string id;
    std::string country;
};

// Subject-independent fold assignment, stratified per country. The
// multi-country plan reuses the per-country assignment verbatim, so fold f's
// WH test set is exactly the union of the per-country fold f test sets.
struct FoldPlan {
    int k = 10;
    std::map<std::string, int> fold_of_subject;
    std::map<std::string, std::string> country_of_subject;

    std::vector<std::string> test_subjects(int fold, const std::string& country) const;  // country or "WH"
    bool in_test(const std::string& subject, int fold) const;
};

FoldPlan make_folds(const std::vector<Subject>& subjects, int k, std::uint64_t seed);

struct ExperimentConfig {
    std::string id;
    std::string train_country = "WH";  // SP | FR | NO | WH
    std::string test_country = "WH";
    SpeakingFilter speaking_train = SpeakingFilter::All;
    SpeakingFilter speaking_test = SpeakingFilter::All;
    std::vector<std::vector<int>> archs = {{100, 20}, {200, 40}, {500, 100}};
    TrainConfig train;
    int runs = 3;
    double validation_fraction = 0.1;
    std::uint64_t seed = 1;
};

struct EvalReport {
    std::string id;
    std::string label_type;      // "audio" | "video"
    std::string modalities;      // "A+F+G"
    std::string train_country, test_country;
    std::string speaking_train, speaking_test;
    std::vector<std::string> classes;
    std::vector<int> arch;       // chosen hidden widths
    int folds = 0, runs = 0;
    std::vector<double> uar_per_eval;          // fold-major: fold * runs + run
    double uar_mean = 0.0, uar_sem = 0.0;
    std::vector<double> per_class_recall_mean;
    std::vector<double> per_class_recall_sem;
    std::vector<std::vector<std::int64_t>> confusion_total;
    std::vector<std::int64_t> n_train_per_fold, n_test_per_fold;
    int skipped_folds = 0;
    std::uint64_t seed = 0;
};

// paper defaults: 100 epochs everywhere except Norway audio (200)
int default_epochs(LabelType label_type, const std::string& country);
// paper per-epoch sample budgets (audio per country; 7500 for video)
std::int64_t default_budget(LabelType label_type, const std::string& country);

// Picks the architecture with the best mean validation UAR across folds;
// validation folds hold out a seeded fraction of train subjects.
std::size_t model_select(const SampleMatrix& matrix, const FoldPlan& plan,
                         const ExperimentConfig& config);

EvalReport run_experiment(const SampleMatrix& matrix, const FoldPlan& plan,
                          const ExperimentConfig& config);

struct PairwiseComparison {
    std::string group;
    std::string experiment_a, experiment_b;
    double mean_diff = 0.0;
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;
    bool reject = false;  // after BKY within the group
};

// Pairwise corrected t-tests between experiments sharing a group key, BKY-
// adjusted per group. group_by: "country" pools label types per test
// country; "country_label" keeps them separate.
std::vector<PairwiseComparison> pairwise_stats(const std::vector<EvalReport>& reports, double q,
                                               const std::string& group_by = "country");

}  // namespace affectfuse
