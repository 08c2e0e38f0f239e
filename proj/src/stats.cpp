#include "blicket/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "blicket/errors.hpp"

namespace blicket {

std::vector<double> average_ranks(const std::vector<double>& xs) {
    std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ConfigError("correlation undefined for constant input");
    return sxy / std::sqrt(sxx * syy);
}

double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ConfigError("paired samples must have equal length");
    if (xs.size() < 3) throw ConfigError("need at least 3 pairs");
    return pearson(average_ranks(xs), average_ranks(ys));
}

}  // namespace

SpearmanResult spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    SpearmanResult out;
    out.n = xs.size();
    out.rho = spearman_rho(xs, ys);
    double n = static_cast<double>(out.n);
    if (out.rho >= 1.0 || out.rho <= -1.0) {
        out.t = out.rho > 0 ? INFINITY : -INFINITY;
        out.p = 0.0;
        return out;
    }
    out.t = out.rho * std::sqrt((n - 2.0) / (1.0 - out.rho * out.rho));
    out.p = 2.0 * (1.0 - students_t_cdf(std::fabs(out.t), n - 2.0));
    return out;
}

double spearman_exact_p(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ConfigError("paired samples must have equal length");
    if (xs.size() >= 10) throw ConfigError("exact permutation p limited to n < 10");
    double observed = std::fabs(spearman_rho(xs, ys));
    std::vector<double> ry = average_ranks(ys);
    std::vector<double> rx = average_ranks(xs);
    std::vector<std::size_t> perm(ys.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t total = 0, hits = 0;
    do {
        std::vector<double> shuffled(ry.size());
        for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = ry[perm[i]];
        ++total;
        if (std::fabs(pearson(rx, shuffled)) >= observed - 1e-12) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw ConfigError("need at least 2 samples per group");
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double ma = mean(a), mb = mean(b);
    double va = 0.0, vb = 0.0;
    for (double x : a) va += (x - ma) * (x - ma);
    for (double x : b) vb += (x - mb) * (x - mb);
    va /= na - 1.0;
    vb /= nb - 1.0;
    double sa = va / na, sb = vb / nb;
    if (sa + sb == 0.0) throw ConfigError("zero variance in both groups");
    WelchResult out;
    out.t = (ma - mb) / std::sqrt(sa + sb);
    out.df = (sa + sb) * (sa + sb) /
             (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    out.p = 2.0 * (1.0 - students_t_cdf(std::fabs(out.t), out.df));
    return out;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "ns";
}

double students_t_cdf(double x, double df) {
    boost::math::students_t dist(df);
    return boost::math::cdf(dist, x);
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw ConfigError("mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}
