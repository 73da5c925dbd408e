#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace affectfuse {

namespace {

// regularized incomplete beta via Lentz's continued fraction
double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-14, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                         b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) throw ValidationError("student t: df must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return ibeta(df / 2.0, 0.5, x);
}

TTestResult corrected_ttest(const std::vector<double>& diffs, double n_train, double n_test) {
    if (diffs.size() < 2) throw ValidationError("corrected_ttest: need at least 2 differences");
    if (n_train <= 0.0 || n_test <= 0.0)
        throw ValidationError("corrected_ttest: split sizes must be positive");
    const double n = static_cast<double>(diffs.size());
    const double m = mean(diffs);
    const double sd = sample_sd(diffs);
    TTestResult r;
    if (sd == 0.0) {
        if (m == 0.0) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = m > 0.0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
            r.degenerate = true;
        }
        return r;
    }
    const double corrected_var = (1.0 / n + n_test / n_train) * sd * sd;
    r.t = m / std::sqrt(corrected_var);
    r.p = student_t_two_sided_p(r.t, n - 1.0);
    return r;
}

TTestResult naive_ttest(const std::vector<double>& diffs) {
    if (diffs.size() < 2) throw ValidationError("naive_ttest: need at least 2 differences");
    const double n = static_cast<double>(diffs.size());
    const double m = mean(diffs);
    const double sd = sample_sd(diffs);
    TTestResult r;
    if (sd == 0.0) {
        if (m == 0.0) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = m > 0.0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
            r.degenerate = true;
        }
        return r;
    }
    r.t = m / (sd / std::sqrt(n));
    r.p = student_t_two_sided_p(r.t, n - 1.0);
    return r;
}

namespace {

// number of rejections of the linear (BH) step-up at level q
std::size_t step_up_rejections(const std::vector<double>& sorted_p, double q) {
    const double m = static_cast<double>(sorted_p.size());
    std::size_t r = 0;
    for (std::size_t i = 0; i < sorted_p.size(); ++i)
        if (sorted_p[i] <= (static_cast<double>(i + 1) / m) * q) r = i + 1;
    return r;
}

}  // namespace

std::vector<bool> bky_fdr(const std::vector<double>& pvalues, double q) {
    if (pvalues.empty()) return {};
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("bky_fdr: q must be in (0,1)");
    for (double p : pvalues)
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("bky_fdr: p-value outside [0,1]");

    const std::size_t m = pvalues.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
    std::vector<double> sorted(m);
    for (std::size_t i = 0; i < m; ++i) sorted[i] = pvalues[order[i]];

    const double q1 = q / (1.0 + q);
    const std::size_t r1 = step_up_rejections(sorted, q1);

    std::size_t n_reject;
    if (r1 == 0) {
        n_reject = 0;
    } else if (r1 == m) {
        n_reject = m;
    } else {
        const double m0 = static_cast<double>(m - r1);
        const double q2 = q1 * static_cast<double>(m) / m0;
        n_reject = step_up_rejections(sorted, q2);
    }

    std::vector<bool> reject(m, false);
    for (std::size_t i = 0; i < n_reject; ++i) reject[order[i]] = true;
    return reject;
}

double uar(const std::vector<std::vector<std::int64_t>>& confusion) {
    if (confusion.empty()) throw ValidationError("uar: empty confusion matrix");
    for (const auto& row : confusion)
        if (row.size() != confusion.size()) throw ValidationError("uar: confusion matrix not square");
    double total_recall = 0.0;
    int present = 0;
    std::int64_t grand = 0;
    for (std::size_t c = 0; c < confusion.size(); ++c) {
        std::int64_t row_sum = 0;
        for (std::int64_t v : confusion[c]) row_sum += v;
        grand += row_sum;
        if (row_sum == 0) continue;  // class absent from the test split
        total_recall += static_cast<double>(confusion[c][c]) / static_cast<double>(row_sum);
        ++present;
    }
    if (grand == 0) throw ValidationError("uar: all-zero confusion matrix");
    return total_recall / static_cast<double>(present);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace affectfuse
