#include "affectfuse/affectfuse.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "core/annotations.hpp"
#include "core/errors.hpp"
#include "core/functionals.hpp"
#include "core/pipeline.hpp"
#include "core/stats.hpp"
#include "core/trajectories.hpp"

using namespace affectfuse;

struct af_context {
    std::string last_error;
};

extern "C" {

af_context* af_context_new(void) { return new (std::nothrow) af_context; }

void af_context_free(af_context* ctx) { delete ctx; }

const char* af_last_error(const af_context* ctx) {
    return ctx ? ctx->last_error.c_str() : "null context";
}

const char* af_version(void) { return "0.1.0"; }

void af_string_free(char* s) { std::free(s); }

}  // extern "C"

namespace {

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
af_status guarded(af_context* ctx, Fn&& fn) {
    if (!ctx) return AF_ERR_VALIDATION;
    ctx->last_error.clear();
    try {
        fn();
        return AF_OK;
    } catch (const ValidationError& e) {
        ctx->last_error = e.what();
        return AF_ERR_VALIDATION;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return AF_ERR_RUNTIME;
    }
}

using StageFn = pipeline::json (*)(const pipeline::json&);

af_status run_stage(af_context* ctx, StageFn stage, const char* options_json, char** summary) {
    return guarded(ctx, [&] {
        if (!options_json) throw ValidationError("options_json is null");
        const pipeline::json options = pipeline::json::parse(options_json);
        const pipeline::json result = stage(options);
        if (summary) *summary = dup_string(result.dump());
    });
}

}  // namespace

extern "C" {

af_status af_synth(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::synth, options_json, summary);
}
af_status af_validate(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::validate, options_json, summary);
}
af_status af_goldstd(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::goldstd, options_json, summary);
}
af_status af_kappa(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::kappa, options_json, summary);
}
af_status af_gazefeat(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::gazefeat, options_json, summary);
}
af_status af_sync(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::sync, options_json, summary);
}
af_status af_train(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::train, options_json, summary);
}
af_status af_eval(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::eval, options_json, summary);
}
af_status af_stats(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::stats, options_json, summary);
}
af_status af_report(af_context* ctx, const char* options_json, char** summary) {
    return run_stage(ctx, &pipeline::report, options_json, summary);
}

af_status af_cohen_kappa(af_context* ctx, const int32_t* a, const int32_t* b, size_t n,
                         double* kappa) {
    return guarded(ctx, [&] {
        if (!a || !b || !kappa) throw ValidationError("null argument");
        std::vector<std::string> sa(n), sb(n);
        for (size_t i = 0; i < n; ++i) {
            sa[i] = std::to_string(a[i]);
            sb[i] = std::to_string(b[i]);
        }
        *kappa = cohen_kappa(sa, sb);
    });
}

af_status af_median_filter(af_context* ctx, const double* in, size_t n, int width, double* out) {
    return guarded(ctx, [&] {
        if (!in || !out) throw ValidationError("null argument");
        const std::vector<double> filtered = median_filter(std::vector<double>(in, in + n), width);
        std::memcpy(out, filtered.data(), n * sizeof(double));
    });
}

af_status af_functionals(af_context* ctx, const double* series, size_t n, double out[9]) {
    return guarded(ctx, [&] {
        if (!series || !out) throw ValidationError("null argument");
        const auto f = functionals_full(std::vector<double>(series, series + n)).full();
        std::memcpy(out, f.data(), 9 * sizeof(double));
    });
}

af_status af_corrected_ttest(af_context* ctx, const double* diffs, size_t n, double n_train,
                             double n_test, double* t, double* p) {
    return guarded(ctx, [&] {
        if (!diffs || !t || !p) throw ValidationError("null argument");
        const TTestResult r = corrected_ttest(std::vector<double>(diffs, diffs + n), n_train, n_test);
        *t = r.t;
        *p = r.p;
    });
}

af_status af_bky_fdr(af_context* ctx, const double* pvalues, size_t n, double q, int32_t* reject) {
    return guarded(ctx, [&] {
        if (!pvalues || !reject) throw ValidationError("null argument");
        const auto decisions = bky_fdr(std::vector<double>(pvalues, pvalues + n), q);
        for (size_t i = 0; i < n; ++i) reject[i] = decisions[i] ? 1 : 0;
    });
}

af_status af_uar(af_context* ctx, const double* confusion, size_t n_classes, double* out) {
    return guarded(ctx, [&] {
        if (!confusion || !out) throw ValidationError("null argument");
        std::vector<std::vector<std::int64_t>> m(n_classes, std::vector<std::int64_t>(n_classes));
        for (size_t r = 0; r < n_classes; ++r)
            for (size_t c = 0; c < n_classes; ++c)
                m[r][c] = static_cast<std::int64_t>(confusion[r * n_classes + c]);
        *out = uar(m);
    });
}

}  // extern "C"
