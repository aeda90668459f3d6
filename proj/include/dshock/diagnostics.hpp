#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dshock {

enum class HolderMethod { automatic, brute_force, two_stage };

struct HolderResult {
    double value = 0.0;
    double x1 = 0.0, x2 = 0.0;  // maximizing pair
    std::size_t i = 0, j = 0;   // its sample indices
    HolderMethod method = HolderMethod::brute_force;
};

// sup |u(x)-u(y)| / |x-y|^beta over sample pairs. automatic: all pairs for
// n <= 10^4, otherwise the two-stage scan (coarse pairs, then all pairs near
// the 100 best coarse rows plus all short-range pairs).
HolderResult holder_seminorm(std::span<const double> x, std::span<const double> u, double beta,
                             HolderMethod method = HolderMethod::automatic);

// A maximizing pair closer than this many samples measures the grid, not the
// profile; such snapshots are left out of rate fits.
inline constexpr std::size_t kHolderMinPairSpan = 8;
bool holder_resolved(const HolderResult& h, std::size_t min_span = kHolderMinPairSpan);

struct FitResult {
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double prefactor = std::numeric_limits<double>::quiet_NaN();
    double r2 = 0.0;
    double window_lo = 0.0, window_hi = 0.0;  // range of the abscissa used
    std::size_t points = 0;
};

enum class RateStatus { fitted, bounded };
const char* to_string(RateStatus s);

struct TemporalFit {
    double beta = 0.0;
    RateStatus status = RateStatus::fitted;
    FitResult fit;          // log [u] vs log(T* - t)
    double expected = 0.0;  // -(3 beta - 1)/2
    double variation = 0.0; // max/min of [u] over the window (bounded case)
};

struct FitWindowOptions {
    std::size_t exclude_last = 3;  // interpolation-noise guard
    double decades = 1.0;
    std::size_t min_points = 8;
};

// Fit over the final resolved decade of T* - t. beta <= 1/3 returns the
// bounded status with the variation of the series instead of a power law.
TemporalFit fit_temporal_rate(std::span<const double> t, std::span<const double> seminorm, double t_star, double beta,
                              const FitWindowOptions& opt = {});

struct SpatialFitOptions {
    double rho_floor = 20.0;  // outer edge: rho - 1 >= rho_floor keeps the local expansion valid
    double inner_factor = 10.0;  // spatial term must dominate the temporal one by this factor
    std::size_t min_points = 20;
};

struct SpatialFit {
    FitResult slope;         // log|rho-1| vs log|x-x*| on the dominated window
    double c = 0.0;          // two-parameter form c / (delta + |x-x*|^{2/3})
    double delta = 0.0;
    double two_param_rms = 0.0;  // rms log residual
    std::size_t two_param_points = 0;
};

// Throws InsufficientData when the dominated window has too few samples.
SpatialFit fit_spatial_profile(std::span<const double> x, std::span<const double> rho, double x_star,
                               const SpatialFitOptions& opt = {});

struct TstarEstimate {
    double t_star = std::numeric_limits<double>::quiet_NaN();
    FitResult fit;  // 1/max|u_x| = slope t + intercept; exponent holds the slope
    bool non_monotone_tail = false;
};

// Linear fit of 1/max|u_x| against t on the monotone suffix restricted to its
// final decade.
TstarEstimate estimate_tstar(std::span<const double> t, std::span<const double> max_ux,
                             const FitWindowOptions& opt = {});

struct BlowupReport {
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double x_star = std::numeric_limits<double>::quiet_NaN();
    std::map<double, TemporalFit> temporal_fits;
    SpatialFit spatial_fit;
    TstarEstimate ux_inverse_fit;
    std::vector<std::string> warnings;
};

}  // namespace dshock
