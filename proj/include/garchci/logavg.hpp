#pragma once

#include "garchci/garch.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace garchci {

/// How shifted copies of the sample are formed.
enum class ShiftMode {
    Suffix,  ///< shift s uses x[s*stride .. n), partial sums restarted at the new origin
    Window,  ///< shift s uses the disjoint window x[s*stride .. (s+1)*stride)
};

/// Sample size n used when turning statistic quantiles into an interval for mu.
enum class InversionLength {
    ShortestShift,  ///< length of the shortest shifted sub-sample
    FullSample,     ///< the full path length
};

struct LogAvgConfig {
    std::size_t k_min = 5;
    std::size_t shift_stride = 100;
    std::size_t n_shifts = 5;
    ShiftMode mode = ShiftMode::Suffix;
    InversionLength inversion = InversionLength::ShortestShift;
};

struct ShiftWindow {
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// Sub-samples used for a path of length n. Throws InsufficientLength if
/// any of them would leave fewer than k_min + 1 statistics.
std::vector<ShiftWindow> shift_windows(std::size_t n, const LogAvgConfig& cfg);

/// Effective sample size for the interval inversion.
std::size_t inversion_length(std::size_t n, const LogAvgConfig& cfg);

/// T_k = (sum_{i<=k} x2_i - k * center) / sqrt(k), k = 1..n.
struct StatSequence {
    std::vector<double> values;
    double center = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

StatSequence t_sequence(std::span<const double> x2, double center);
StatSequence t_sequence(const SamplePath& path, double center);

/// Normalized logarithmic-average empirical distribution function: an
/// equal-weight mixture over shifts of sum_{k>=k_min} (1/k) 1{S_k <= t} / sum 1/k.
class LogAvgCdf {
public:
    LogAvgCdf() = default;

    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& cumulative() const noexcept { return cumulative_; }
    const std::vector<std::size_t>& shifts() const noexcept { return shifts_; }
    /// sum 1/k over the included indices, one entry per shift.
    const std::vector<double>& normalizers() const noexcept { return normalizers_; }
    std::size_t k_min() const noexcept { return k_min_; }
    std::size_t size() const noexcept { return support_.size(); }
    double total_mass() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

    double operator()(double t) const;

    /// Write `t,cdf` rows, one per support point.
    void write_csv(std::ostream& out) const;

private:
    friend LogAvgCdf build_logavg_cdf(std::span<const std::vector<double>> sequences,
                                      std::span<const std::size_t> offsets, std::size_t k_min);

    std::vector<double> support_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    std::vector<std::size_t> shifts_;
    std::vector<double> normalizers_;
    std::size_t k_min_ = 1;
};

/// Core builder: averages the log-average CDFs of each statistic sequence
/// (entry j of a sequence is the statistic at index k = j + 1).
LogAvgCdf build_logavg_cdf(std::span<const std::vector<double>> sequences, std::span<const std::size_t> offsets,
                           std::size_t k_min);

/// Single sequence, no shifting.
LogAvgCdf build_logavg_cdf(const StatSequence& seq, std::size_t k_min);

/// T-statistic CDF with the shift protocol of `cfg`: every shifted
/// sub-sample is re-indexed from 1 and centered at the same `center`.
LogAvgCdf build_logavg_cdf(std::span<const double> x2, double center, const LogAvgConfig& cfg);

/// Left-continuous generalized inverse: smallest support point t with
/// CDF(t) >= q, 0 < q < 1.
double quantile(const LogAvgCdf& cdf, double q);

}  // namespace garchci
