#pragma once

#include <cstdint>
#include <vector>

namespace affectfuse {

// two-sided p-value for a t statistic with df degrees of freedom
double student_t_two_sided_p(double t, double df);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;  // zero variance with nonzero mean
};

// Corrected repeated k-fold cross-validation t-test on paired differences:
// the variance term is inflated by (1/n + n_test/n_train); df = n - 1 with
// n = #diffs (k folds x r runs). Sample (n-1) variance.
TTestResult corrected_ttest(const std::vector<double>& diffs, double n_train, double n_test);

// classical paired t-test (the corrected test with n_test/n_train = 0)
TTestResult naive_ttest(const std::vector<double>& diffs);

// Two-stage adaptive step-up FDR control. Stage one is a linear step-up at
// q' = q/(1+q); its rejection count estimates the number of true nulls m0 =
// m - r1, and stage two reruns the step-up at q' * m / m0. Returns one
// reject flag per input hypothesis (input order preserved).
std::vector<bool> bky_fdr(const std::vector<double>& pvalues, double q = 0.05);

// mean per-class recall over classes with at least one true sample
double uar(const std::vector<std::vector<std::int64_t>>& confusion);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

}  // namespace affectfuse
