#pragma once

// Runs ordinary_test over a prime range, aggregates an empirical density with
// a Wilson interval, checkpoints at batch boundaries, and compares against a
// group's predicted density.

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "ordinary/frobenius.hpp"
#include "ordinary/groups.hpp"
#include "ordinary/surfaces.hpp"

namespace ordinary {

inline constexpr int kFormatVersion = 1;

struct EngineConfig {
    FrobeniusConfig frobenius;
    unsigned threads = 0;           // 0: hardware concurrency
    std::size_t batch_size = 1024;  // primes per quiescent step
    std::optional<std::filesystem::path> checkpoint_path;
    const std::atomic<bool>* cancel = nullptr;  // checked between batches
};

/// Order-independent totals over the primes processed so far.
struct DensityCounters {
    u64 last_p = 0;  // every prime <= last_p has been processed
    u64 good_primes = 0;
    u64 ordinary_count = 0;
    u64 skipped_primes = 0;
    u64 weil_audited = 0;     // records with both a1 and a2
    u64 roots_checked = 0;
    u64 a2_below_minus_2p = 0;
    std::optional<i64> min_a2;  // min over audited records of a2 / p, kept exactly
    std::optional<u64> min_a2_p;

    std::optional<double> min_a2_over_p() const;
    friend bool operator==(const DensityCounters&, const DensityCounters&) = default;
};

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

/// 95% Wilson score interval for `successes` out of `trials`; [0, 1] when trials = 0.
WilsonInterval wilson95(u64 successes, u64 trials);

struct DensityReport {
    std::string surface;  // canonical text
    std::string label;
    u64 bound = 0;
    DensityCounters counters;
    Fraction empirical{0, 1};
    WilsonInterval interval;
    std::optional<std::string> group_id;
    std::optional<Fraction> predicted;
    std::optional<bool> match;
};

struct RunCheckpoint {
    int format_version = kFormatVersion;
    std::string surface;
    u64 naive_max_fp = 0;
    u64 naive_max_fp2 = 0;
    DensityCounters counters;
    friend bool operator==(const RunCheckpoint&, const RunCheckpoint&) = default;
};

/// Writes through a temporary file and a rename, so readers never see a partial file.
void checkpoint_write(const std::filesystem::path& path, const RunCheckpoint& checkpoint);

/// Throws ParseError on a missing, truncated or corrupt file or a version mismatch.
RunCheckpoint checkpoint_read(const std::filesystem::path& path);

/// Thrown when EngineConfig::cancel is raised; the checkpoint (if any) is current.
class RunInterrupted : public std::runtime_error {
public:
    explicit RunInterrupted(u64 last_p)
        : std::runtime_error("run interrupted after p = " + std::to_string(last_p)), last_p_(last_p) {}
    u64 last_p() const noexcept { return last_p_; }

private:
    u64 last_p_;
};

using RecordSink = std::function<void(const FrobeniusRecord&)>;

/// Processes the odd primes up to `bound` (after resume->counters.last_p when
/// resuming), passing every record to `sink` in increasing p.
DensityReport run_density(const SurfaceModel& model, u64 bound, const EngineConfig& config = {},
                          const RecordSink& sink = {}, const std::optional<RunCheckpoint>& resume = std::nullopt);

/// Re-checks the frobenius invariants on one record; throws IntegrityError.
void audit_record(const FrobeniusRecord& record);

/// run_density plus predicted_density; match = predicted lies in the Wilson interval.
/// Throws AnalysisError if the entry fails validation.
DensityReport compare(const SurfaceModel& model, const GroupEntry& entry, u64 bound, const EngineConfig& config = {},
                      const ConstancyOptions& constancy = {},
                      const std::optional<RunCheckpoint>& resume = std::nullopt);

std::string format_fraction(const Fraction& f);

/// One JSON object per line; field names are stable for format_version 1.
std::string record_to_json_line(const FrobeniusRecord& record);

/// Summary report as a JSON document.
std::string report_to_json(const DensityReport& report);

}  // namespace ordinary
