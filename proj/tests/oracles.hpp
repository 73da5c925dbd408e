// Independent reference implementations used to check the library. These are
// deliberately written the slow, obvious way and must not share code with
// src/core.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oracle {

// --- gold standard ----------------------------------------------------------

struct Span {
    long long start, end;
    std::string label;
};

// per-ms tally for one 3-s segment given per-rater spans; empty = silence,
// "discarded" when no label reaches the fraction
inline std::string segment_label(const std::vector<std::vector<Span>>& raters, long long seg_start,
                                 double fraction) {
    std::map<std::string, long long> tally;
    long long labeled = 0;
    for (long long t = seg_start; t < seg_start + 3000; ++t) {
        std::map<std::string, int> votes;
        for (const auto& r : raters)
            for (const auto& s : r)
                if (s.start <= t && t < s.end) ++votes[s.label];
        if (votes.empty()) continue;
        int best = 0;
        for (const auto& [l, n] : votes) best = std::max(best, n);
        int n_best = 0;
        std::string winner;
        for (const auto& [l, n] : votes)
            if (n == best) {
                ++n_best;
                winner = l;
            }
        if (n_best != 1) continue;  // tie across raters: unlabeled ms
        ++tally[winner];
        ++labeled;
    }
    if (labeled == 0) return "silence";
    long long best = 0;
    std::string winner;
    for (const auto& [l, n] : tally)
        if (n > best || (n == best && l < winner)) {
            best = n;
            winner = l;
        }
    return (double)best / 3000.0 >= fraction ? winner : "discarded";
}

// --- medians and functionals -------------------------------------------------

inline double median_window(const std::vector<double>& s, long long center, int half) {
    const long long n = (long long)s.size();
    const long long h = std::min((long long)half, std::min(center, n - 1 - center));
    std::vector<double> buf;
    for (long long j = center - h; j <= center + h; ++j) buf.push_back(s[(size_t)j]);
    std::sort(buf.begin(), buf.end());
    return buf[buf.size() / 2];
}

inline double pct(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    double h = q * (double)(v.size() - 1);
    size_t lo = (size_t)h;
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] * (1.0 - (h - (double)lo)) + v[lo + 1] * (h - (double)lo);
}

// min, max, mean, sd(population), range, p25, p50, p75, iqr
inline std::vector<double> functionals9(const std::vector<double>& v) {
    double mn = v[0], mx = v[0], sum = 0;
    for (double x : v) {
        mn = std::min(mn, x);
        mx = std::max(mx, x);
        sum += x;
    }
    double mean = sum / (double)v.size();
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / (double)v.size());
    double p25 = pct(v, 0.25), p50 = pct(v, 0.5), p75 = pct(v, 0.75);
    return {mn, mx, mean, sd, mx - mn, p25, p50, p75, p75 - p25};
}

// --- BKY two-stage FDR --------------------------------------------------------

// written from the procedure definition, using an explicit adjusted-p style
// step-up rather than the library's threshold scan
inline std::vector<bool> bky(const std::vector<double>& p, double q) {
    size_t m = p.size();
    std::vector<size_t> idx(m);
    for (size_t i = 0; i < m; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return p[a] < p[b]; });

    auto bh_count = [&](double level) {
        size_t k = 0;
        for (size_t i = m; i-- > 0;) {
            if (p[idx[i]] * (double)m <= level * (double)(i + 1)) {
                k = i + 1;
                break;
            }
        }
        return k;
    };

    double q1 = q / (1.0 + q);
    size_t r1 = bh_count(q1);
    size_t r;
    if (r1 == 0)
        r = 0;
    else if (r1 == m)
        r = m;
    else
        r = bh_count(q1 * (double)m / (double)(m - r1));

    std::vector<bool> rej(m, false);
    for (size_t i = 0; i < r; ++i) rej[idx[i]] = true;
    return rej;
}

// --- numeric gradients ---------------------------------------------------------

template <typename LossFn>
inline double central_difference(LossFn&& loss, double& param, double h = 1e-6) {
    const double orig = param;
    param = orig + h;
    const double up = loss();
    param = orig - h;
    const double down = loss();
    param = orig;
    return (up - down) / (2.0 * h);
}

}  // namespace oracle
