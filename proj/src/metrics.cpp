#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace episeir {

std::vector<double> seven_day_average(std::span<const double> raw) {
    const int n = static_cast<int>(raw.size());
    if (n < 1) throw InvalidArgument("seven_day_average: empty series");
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) {
        const int half = std::min({3, k, n - 1 - k});
        double sum = 0.0;
        for (int j = k - half; j <= k + half; ++j) sum += raw[j];
        out[k] = sum / (2 * half + 1);
    }
    return out;
}

namespace {

double diff_norm(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

} // namespace

double accuracy(std::span<const double> candidate, std::span<const double> reference,
                std::span<const double> baseline) {
    if (candidate.size() != reference.size() || baseline.size() != reference.size())
        throw InvalidArgument("accuracy: series lengths differ");
    const double deviation = diff_norm(candidate, reference);
    const double max_deviation = diff_norm(baseline, reference);
    if (max_deviation == 0.0) {
        if (deviation == 0.0) return 1.0;
        throw InvalidArgument("accuracy: baseline equals reference but candidate deviates");
    }
    return std::clamp(1.0 - deviation / max_deviation, 0.0, 1.0);
}

Deviation max_average_deviation(std::span<const double> candidate,
                                std::span<const double> reference) {
    if (candidate.size() != reference.size())
        throw InvalidArgument("max_average_deviation: series lengths differ");
    Deviation d;
    double peak = 0.0;
    for (size_t k = 0; k < reference.size(); ++k) {
        d.max_abs = std::max(d.max_abs, std::abs(candidate[k] - reference[k]));
        peak = std::max(peak, std::abs(reference[k]));
    }
    d.relative_to_peak = peak > 0.0 ? d.max_abs / peak : 0.0;
    return d;
}

double mean_absolute_error(std::span<const double> candidate, std::span<const double> reference) {
    if (candidate.size() != reference.size() || candidate.empty())
        throw InvalidArgument("mean_absolute_error: series mismatch");
    double sum = 0.0;
    for (size_t k = 0; k < candidate.size(); ++k) sum += std::abs(candidate[k] - reference[k]);
    return sum / candidate.size();
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear_fit: need two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("linear_fit: degenerate abscissa");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

} // namespace episeir
