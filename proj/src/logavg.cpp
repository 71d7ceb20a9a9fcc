#include "garchci/logavg.hpp"

#include "garchci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace garchci {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double harmonic_tail(std::size_t k_min, std::size_t m) {
    CompensatedSum acc;
    for (std::size_t k = k_min; k <= m; ++k) acc.add(1.0 / static_cast<double>(k));
    return acc.value();
}

}  // namespace

std::vector<ShiftWindow> shift_windows(std::size_t n, const LogAvgConfig& cfg) {
    if (cfg.k_min == 0) throw std::invalid_argument("k_min must be at least 1");
    if (cfg.n_shifts == 0) throw std::invalid_argument("n_shifts must be at least 1");
    if (cfg.n_shifts > 1 && cfg.shift_stride == 0) throw std::invalid_argument("shift_stride must be positive");

    std::vector<ShiftWindow> out;
    out.reserve(cfg.n_shifts);
    if (cfg.mode == ShiftMode::Suffix) {
        const std::size_t last_offset = cfg.shift_stride * (cfg.n_shifts - 1);
        if (n <= cfg.k_min + last_offset) {
            throw InsufficientLength("path length " + std::to_string(n) + " must exceed k_min + stride*(n_shifts-1) = " +
                                     std::to_string(cfg.k_min + last_offset));
        }
        for (std::size_t s = 0; s < cfg.n_shifts; ++s) {
            const std::size_t offset = s * cfg.shift_stride;
            out.push_back({offset, n - offset});
        }
    } else {
        if (cfg.shift_stride <= cfg.k_min) {
            throw InsufficientLength("window length " + std::to_string(cfg.shift_stride) + " must exceed k_min");
        }
        if (n < cfg.shift_stride * cfg.n_shifts) {
            throw InsufficientLength("path length " + std::to_string(n) + " is shorter than " +
                                     std::to_string(cfg.n_shifts) + " windows of " +
                                     std::to_string(cfg.shift_stride));
        }
        for (std::size_t s = 0; s < cfg.n_shifts; ++s) out.push_back({s * cfg.shift_stride, cfg.shift_stride});
    }
    return out;
}

std::size_t inversion_length(std::size_t n, const LogAvgConfig& cfg) {
    if (cfg.inversion == InversionLength::FullSample) return n;
    const auto windows = shift_windows(n, cfg);
    return std::min_element(windows.begin(), windows.end(), [](const ShiftWindow& a, const ShiftWindow& b) {
               return a.length < b.length;
           })->length;
}

StatSequence t_sequence(std::span<const double> x2, double center) {
    StatSequence seq;
    seq.center = center;
    seq.values.resize(x2.size());
    double partial = 0.0;
    for (std::size_t i = 0; i < x2.size(); ++i) {
        partial += x2[i] - center;
        seq.values[i] = partial / std::sqrt(static_cast<double>(i + 1));
    }
    return seq;
}

StatSequence t_sequence(const SamplePath& path, double center) {
    return t_sequence(std::span<const double>(path.x2), center);
}

double LogAvgCdf::operator()(double t) const {
    const auto it = std::upper_bound(support_.begin(), support_.end(), t);
    if (it == support_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

void LogAvgCdf::write_csv(std::ostream& out) const {
    out << "t,cdf\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < support_.size(); ++i) out << support_[i] << ',' << cumulative_[i] << '\n';
}

LogAvgCdf build_logavg_cdf(std::span<const std::vector<double>> sequences, std::span<const std::size_t> offsets,
                           std::size_t k_min) {
    if (sequences.empty()) throw std::invalid_argument("at least one statistic sequence is required");
    if (offsets.size() != sequences.size()) throw std::invalid_argument("one offset per sequence is required");
    if (k_min == 0) throw std::invalid_argument("k_min must be at least 1");

    struct Atom {
        double value;
        double weight;
    };
    std::vector<Atom> atoms;
    LogAvgCdf cdf;
    cdf.k_min_ = k_min;
    cdf.shifts_.assign(offsets.begin(), offsets.end());

    const double share = 1.0 / static_cast<double>(sequences.size());
    for (const auto& seq : sequences) {
        if (seq.size() < k_min) {
            throw InsufficientLength("statistic sequence of length " + std::to_string(seq.size()) +
                                     " has no index >= k_min = " + std::to_string(k_min));
        }
        const double normalizer = harmonic_tail(k_min, seq.size());
        cdf.normalizers_.push_back(normalizer);
        for (std::size_t k = k_min; k <= seq.size(); ++k) {
            atoms.push_back({seq[k - 1], share / (static_cast<double>(k) * normalizer)});
        }
    }

    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });

    CompensatedSum running;
    for (std::size_t i = 0; i < atoms.size();) {
        const double v = atoms[i].value;
        CompensatedSum w;
        for (; i < atoms.size() && atoms[i].value == v; ++i) {
            w.add(atoms[i].weight);
            running.add(atoms[i].weight);
        }
        cdf.support_.push_back(v);
        cdf.weights_.push_back(w.value());
        cdf.cumulative_.push_back(running.value());
    }
    return cdf;
}

LogAvgCdf build_logavg_cdf(const StatSequence& seq, std::size_t k_min) {
    const std::size_t offset = 0;
    return build_logavg_cdf(std::span<const std::vector<double>>(&seq.values, 1), std::span<const std::size_t>(&offset, 1),
                            k_min);
}

LogAvgCdf build_logavg_cdf(std::span<const double> x2, double center, const LogAvgConfig& cfg) {
    const auto windows = shift_windows(x2.size(), cfg);
    std::vector<std::vector<double>> sequences;
    std::vector<std::size_t> offsets;
    sequences.reserve(windows.size());
    for (const auto& w : windows) {
        sequences.push_back(t_sequence(x2.subspan(w.offset, w.length), center).values);
        offsets.push_back(w.offset);
    }
    return build_logavg_cdf(sequences, offsets, cfg.k_min);
}

double quantile(const LogAvgCdf& cdf, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
    if (cdf.size() == 0) throw std::invalid_argument("quantile of an empty distribution");
    const auto& cum = cdf.cumulative();
    const auto it = std::lower_bound(cum.begin(), cum.end(), q);
    // Rounding can leave the total mass a few ulps below q close to 1.
    const std::size_t idx = it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin());
    return cdf.support()[idx];
}

}  // namespace garchci
