#include "spider/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spider/numerics.hpp"
#include "spider/rng.hpp"

namespace spider {

namespace {

void check_samples(const std::vector<double>& v, std::size_t min_n) {
    if (v.size() < min_n) throw std::invalid_argument("samples: too few samples");
    for (double s : v)
        if (std::isnan(s)) throw std::invalid_argument("samples: NaN rejected");
}

double ks_lambda(double d, double effective_n) {
    const double rn = std::sqrt(effective_n);
    return (rn + 0.12 + 0.11 / rn) * d;
}

TestReport make_ks_report(double d, double effective_n, double level, const std::string& name,
                          std::size_t n, std::uint64_t seed) {
    TestReport r;
    r.name = name;
    r.statistic = d;
    r.threshold = kolmogorov_critical(level, effective_n);
    r.p_value = kolmogorov_sf(ks_lambda(d, effective_n));
    r.pass = d <= r.threshold;
    r.n = n;
    r.seed = seed;
    return r;
}

}  // namespace

double kolmogorov_sf(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_critical(double level, double effective_n) {
    // invert kolmogorov_sf(lambda) = level by bisection, then unscale
    double lo = 1e-3, hi = 4.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_sf(mid) > level)
            lo = mid;
        else
            hi = mid;
    }
    const double rn = std::sqrt(effective_n);
    return 0.5 * (lo + hi) / (rn + 0.12 + 0.11 / rn);
}

TestReport ks_one_sample(std::vector<double> samples, const Cdf& cdf, double level,
                         const std::string& name, std::uint64_t seed) {
    check_samples(samples, 100);
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        if (f < 0.0 || f > 1.0 || std::isnan(f))
            throw std::invalid_argument("cdf: values must lie in [0,1]");
        const double di = static_cast<double>(i);
        d = std::max(d, std::max((di + 1.0) / n - f, f - di / n));
    }
    return make_ks_report(d, n, level, name, samples.size(), seed);
}

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double level,
                         const std::string& name, std::uint64_t seed) {
    check_samples(a, 100);
    check_samples(b, 100);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return make_ks_report(d, ne, level, name, a.size() + b.size(), seed);
}

TestReport ks_one_sample_weighted(std::vector<double> samples, std::vector<double> weights,
                                  const Cdf& cdf, double level, const std::string& name,
                                  std::uint64_t seed) {
    check_samples(samples, 100);
    if (weights.size() != samples.size())
        throw std::invalid_argument("weights: length mismatch");
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return samples[l] < samples[r]; });
    double wsum = 0.0, w2sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("weights: must be finite and nonnegative");
        wsum += w;
        w2sum += w * w;
    }
    if (wsum <= 0.0) throw std::invalid_argument("weights: total weight must be positive");
    double acc = 0.0;
    double d = 0.0;
    for (std::size_t idx : order) {
        const double f = cdf(samples[idx]);
        d = std::max(d, std::fabs(acc / wsum - f));
        acc += weights[idx];
        d = std::max(d, std::fabs(acc / wsum - f));
    }
    const double ess = wsum * wsum / w2sum;
    return make_ks_report(d, ess, level, name, samples.size(), seed);
}

TestReport chi_square_rays(const std::vector<std::int64_t>& counts,
                           const std::vector<double>& expected_law, double level,
                           const std::string& name, std::uint64_t seed) {
    if (counts.size() != expected_law.size() || counts.size() < 2)
        throw std::invalid_argument("counts: need one count per category, at least two");
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total <= 0) throw std::invalid_argument("counts: empty sample");
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = expected_law[i] * static_cast<double>(total);
        if (!(expected > 0.0)) throw std::invalid_argument("expected_law: zero-mass category");
        const double diff = static_cast<double>(counts[i]) - expected;
        stat += diff * diff / expected;
    }
    const double df = static_cast<double>(counts.size() - 1);
    TestReport r;
    r.name = name;
    r.statistic = stat;
    r.p_value = num::chi2_sf(stat, df);
    // critical value by bisection on the survival function
    double lo = 0.0, hi = 1e4;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (num::chi2_sf(mid, df) > level)
            lo = mid;
        else
            hi = mid;
    }
    r.threshold = 0.5 * (lo + hi);
    r.pass = stat <= r.threshold;
    r.n = static_cast<std::size_t>(total);
    r.seed = seed;
    return r;
}

TestReport chi_square_two_sample(const std::vector<std::int64_t>& a,
                                 const std::vector<std::int64_t>& b, double level,
                                 const std::string& name, std::uint64_t seed) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("counts: category mismatch");
    std::int64_t na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i];
        nb += b[i];
    }
    if (na <= 0 || nb <= 0) throw std::invalid_argument("counts: empty sample");
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tot = static_cast<double>(a[i] + b[i]);
        if (tot == 0.0) continue;
        const double ea = tot * static_cast<double>(na) / static_cast<double>(na + nb);
        const double eb = tot * static_cast<double>(nb) / static_cast<double>(na + nb);
        stat += (static_cast<double>(a[i]) - ea) * (static_cast<double>(a[i]) - ea) / ea;
        stat += (static_cast<double>(b[i]) - eb) * (static_cast<double>(b[i]) - eb) / eb;
    }
    const double df = static_cast<double>(a.size() - 1);
    TestReport r;
    r.name = name;
    r.statistic = stat;
    r.p_value = num::chi2_sf(stat, df);
    double lo = 0.0, hi = 1e4;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (num::chi2_sf(mid, df) > level)
            lo = mid;
        else
            hi = mid;
    }
    r.threshold = 0.5 * (lo + hi);
    r.pass = stat <= r.threshold;
    r.n = static_cast<std::size_t>(na + nb);
    r.seed = seed;
    return r;
}

namespace {

std::vector<double> ranks_of(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return v[l] < v[r]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<double>(i);
    return rank;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TestReport independence_check(const std::vector<double>& a, const std::vector<double>& b,
                              double level, const std::string& name, std::uint64_t seed,
                              std::size_t n_permutations) {
    check_samples(a, 100);
    check_samples(b, 100);
    if (a.size() != b.size()) throw std::invalid_argument("samples: length mismatch");
    const std::vector<double> ra = ranks_of(a);
    const std::vector<double> rb = ranks_of(b);
    const double observed = std::fabs(pearson(ra, rb));

    std::vector<double> shuffled = rb;
    std::vector<double> permuted(n_permutations);
    std::size_t exceed = 0;
    for (std::size_t p = 0; p < n_permutations; ++p) {
        RngStream rng = RngStream::substream(seed, streams::kPermutation, p);
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
            const std::size_t j =
                static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
            std::swap(shuffled[i], shuffled[std::min(j, i)]);
        }
        permuted[p] = std::fabs(pearson(ra, shuffled));
        if (permuted[p] >= observed) ++exceed;
    }
    std::sort(permuted.begin(), permuted.end());
    TestReport r;
    r.name = name;
    r.statistic = observed;
    const std::size_t q = static_cast<std::size_t>(
        std::min(static_cast<double>(n_permutations - 1),
                 std::ceil((1.0 - level) * static_cast<double>(n_permutations))));
    r.threshold = permuted[q];
    r.p_value = (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(n_permutations));
    r.pass = r.p_value >= level;
    r.n = a.size();
    r.seed = seed;
    return r;
}

}  // namespace spider
