#pragma once
#include <span>
#include <vector>

namespace episeir {

// Centered 7-day moving average; the window shrinks symmetrically at the
// series ends.
std::vector<double> seven_day_average(std::span<const double> raw);

// 1 - ||candidate - reference||_2 / ||baseline - reference||_2, clamped to
// [0,1]. The reference scores 1, the baseline 0.
double accuracy(std::span<const double> candidate, std::span<const double> reference,
                std::span<const double> baseline);

struct Deviation {
    double max_abs = 0.0;          // persons
    double relative_to_peak = 0.0; // vs reference peak
};

Deviation max_average_deviation(std::span<const double> candidate,
                                std::span<const double> reference);

double mean_absolute_error(std::span<const double> candidate, std::span<const double> reference);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

} // namespace episeir
