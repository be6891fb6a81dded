#include "ordinary/engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ordinary/errors.hpp"

namespace ordinary {

using nlohmann::ordered_json;

namespace {

constexpr double kZ95 = 1.959963984540054;

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// a2 / p < b2 / q, exactly.
bool ratio_less(i64 a2, u64 p, i64 b2, u64 q) {
    return static_cast<__int128>(a2) * static_cast<__int128>(q) < static_cast<__int128>(b2) * static_cast<__int128>(p);
}

void accumulate(DensityCounters& c, const FrobeniusRecord& r) {
    if (r.status != ReductionStatus::Good) {
        ++c.skipped_primes;
        return;
    }
    ++c.good_primes;
    if (r.ordinary.value_or(false)) ++c.ordinary_count;
    if (r.roots_checked) ++c.roots_checked;
    if (r.a1 && r.a2) {
        ++c.weil_audited;
        const i64 a2 = *r.a2;
        if (static_cast<__int128>(a2) < -2 * static_cast<__int128>(r.p)) ++c.a2_below_minus_2p;
        if (!c.min_a2 || ratio_less(a2, r.p, *c.min_a2, *c.min_a2_p)) {
            c.min_a2 = a2;
            c.min_a2_p = r.p;
        }
    }
}

// Evaluates one batch of primes on `threads` workers. Each slot is written by
// exactly one worker; the first failure in prime order wins.
std::vector<FrobeniusRecord> evaluate_batch(const SurfaceModel& model, std::span<const Prime> primes,
                                            const FrobeniusConfig& frob, unsigned threads) {
    std::vector<FrobeniusRecord> out(primes.size());
    std::vector<std::exception_ptr> errors(primes.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < primes.size(); i = next.fetch_add(1)) {
            try {
                out[i] = ordinary_test(model, primes[i], frob);
                audit_record(out[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(primes.size(), 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace

std::optional<double> DensityCounters::min_a2_over_p() const {
    if (!min_a2) return std::nullopt;
    return static_cast<double>(*min_a2) / static_cast<double>(*min_a2_p);
}

WilsonInterval wilson95(u64 successes, u64 trials) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = kZ95 / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
    // The closed-form endpoints are exactly 0 and 1 at the extremes; rounding must not move them.
    if (successes == 0) w.low = 0.0;
    if (successes == trials) w.high = 1.0;
    w.low = std::min(w.low, phat);
    w.high = std::max(w.high, phat);
    return w;
}

void audit_record(const FrobeniusRecord& r) {
    if (r.status != ReductionStatus::Good) return;
    const u64 p = r.p;
    if (r.a1 && r.a2 && !within_weil_bounds(*r.a1, *r.a2, p)) throw IntegrityError("Weil bound violated", p);
    if (r.a1 && !r.a2) {
        // |a1| <= 4 sqrt(p)
        const __int128 a = *r.a1;
        if (a * a > 16 * static_cast<__int128>(p)) throw IntegrityError("Weil bound on a1 violated", p);
    }
    if (r.a1 && r.hw_trace && reduce(*r.a1, p) != *r.hw_trace)
        throw IntegrityError("Hasse-Witt trace disagrees with a1 mod p", p);
    if (r.a2 && r.hw_det && reduce(*r.a2, p) != *r.hw_det)
        throw IntegrityError("Hasse-Witt determinant disagrees with a2 mod p", p);
    if (r.a2 && r.a2_mod_p && reduce(*r.a2, p) != *r.a2_mod_p) throw IntegrityError("a2 mod p inconsistent", p);
    if (!r.ordinary || !r.a2_mod_p) throw IntegrityError("GOOD record without an ordinariness verdict", p);
    if (*r.ordinary != (*r.a2_mod_p != 0)) throw IntegrityError("ordinariness verdict disagrees with a2 mod p", p);
}

DensityReport run_density(const SurfaceModel& model, u64 bound, const EngineConfig& config, const RecordSink& sink,
                          const std::optional<RunCheckpoint>& resume) {
    if (config.frobenius.naive_max_fp2 > config.frobenius.naive_max_fp)
        throw std::invalid_argument("naive_max_fp2 must not exceed naive_max_fp");
    const std::string surface = serialize(model);

    DensityCounters counters;
    if (resume) {
        if (resume->surface != surface)
            throw ParseError("checkpoint belongs to a different surface", resume->surface);
        if (resume->naive_max_fp != config.frobenius.naive_max_fp ||
            resume->naive_max_fp2 != config.frobenius.naive_max_fp2)
            throw ParseError("checkpoint was written with different naive-count limits");
        if (resume->counters.last_p > bound)
            throw ParseError("checkpoint extends past the requested bound", std::to_string(resume->counters.last_p));
        counters = resume->counters;
    }

    const std::vector<Prime> all = primes_up_to(bound);
    auto first = std::upper_bound(all.begin(), all.end(), counters.last_p,
                                  [](u64 v, const Prime& p) { return v < p.value(); });
    const std::span<const Prime> todo(first, all.end());

    auto snapshot = [&] {
        if (!config.checkpoint_path) return;
        checkpoint_write(*config.checkpoint_path,
                         {kFormatVersion, surface, config.frobenius.naive_max_fp, config.frobenius.naive_max_fp2,
                          counters});
    };

    const unsigned threads = resolve_threads(config.threads);
    const std::size_t batch = std::max<std::size_t>(config.batch_size, 1);
    for (std::size_t start = 0; start < todo.size(); start += batch) {
        if (config.cancel && config.cancel->load()) {
            snapshot();
            throw RunInterrupted(counters.last_p);
        }
        const auto chunk = todo.subspan(start, std::min(batch, todo.size() - start));
        const auto records = evaluate_batch(model, chunk, config.frobenius, threads);
        for (const auto& r : records) {
            accumulate(counters, r);
            if (sink) sink(r);
        }
        counters.last_p = chunk.back().value();
        snapshot();
    }
    counters.last_p = std::max(counters.last_p, bound);
    snapshot();

    DensityReport report;
    report.surface = surface;
    report.label = model.label();
    report.bound = bound;
    report.counters = counters;
    report.empirical = counters.good_primes == 0
                           ? Fraction(0, 1)
                           : Fraction(static_cast<std::int64_t>(counters.ordinary_count),
                                      static_cast<std::int64_t>(counters.good_primes));
    report.interval = wilson95(counters.ordinary_count, counters.good_primes);
    return report;
}

DensityReport compare(const SurfaceModel& model, const GroupEntry& entry, u64 bound, const EngineConfig& config,
                      const ConstancyOptions& constancy, const std::optional<RunCheckpoint>& resume) {
    const ValidationReport validation = validate_entry(entry);
    if (const auto* failed = validation.first_failure())
        throw AnalysisError("entry '" + entry.id + "' failed validation: " + failed->name + ": " + failed->detail);
    const DensityPrediction prediction = predicted_density(entry, constancy);
    DensityReport report = run_density(model, bound, config, {}, resume);
    report.group_id = entry.id;
    report.predicted = prediction.density;
    const double predicted = boost::rational_cast<double>(prediction.density);
    report.match = report.interval.low <= predicted && predicted <= report.interval.high;
    return report;
}

void checkpoint_write(const std::filesystem::path& path, const RunCheckpoint& cp) {
    const DensityCounters& c = cp.counters;
    ordered_json j;
    j["format_version"] = cp.format_version;
    j["surface"] = cp.surface;
    j["naive_max_fp"] = cp.naive_max_fp;
    j["naive_max_fp2"] = cp.naive_max_fp2;
    j["last_p"] = c.last_p;
    j["good_primes"] = c.good_primes;
    j["ordinary_count"] = c.ordinary_count;
    j["skipped_primes"] = c.skipped_primes;
    j["weil_audited"] = c.weil_audited;
    j["roots_checked"] = c.roots_checked;
    j["a2_below_minus_2p"] = c.a2_below_minus_2p;
    j["min_a2"] = c.min_a2 ? ordered_json(*c.min_a2) : ordered_json(nullptr);
    j["min_a2_p"] = c.min_a2_p ? ordered_json(*c.min_a2_p) : ordered_json(nullptr);

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
        out << j.dump(2) << '\n';
        out.flush();
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

RunCheckpoint checkpoint_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open checkpoint", path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();

    ordered_json j;
    try {
        j = ordered_json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("corrupt checkpoint: ") + e.what(), path.string());
    }
    if (!j.is_object() || !j.contains("format_version"))
        throw ParseError("corrupt checkpoint: missing format_version", path.string());

    RunCheckpoint cp;
    try {
        cp.format_version = j.at("format_version").get<int>();
        if (cp.format_version != kFormatVersion)
            throw ParseError("unsupported checkpoint format_version " + std::to_string(cp.format_version),
                             path.string());
        cp.surface = j.at("surface").get<std::string>();
        cp.naive_max_fp = j.at("naive_max_fp").get<u64>();
        cp.naive_max_fp2 = j.at("naive_max_fp2").get<u64>();
        DensityCounters& c = cp.counters;
        c.last_p = j.at("last_p").get<u64>();
        c.good_primes = j.at("good_primes").get<u64>();
        c.ordinary_count = j.at("ordinary_count").get<u64>();
        c.skipped_primes = j.at("skipped_primes").get<u64>();
        c.weil_audited = j.at("weil_audited").get<u64>();
        c.roots_checked = j.at("roots_checked").get<u64>();
        c.a2_below_minus_2p = j.at("a2_below_minus_2p").get<u64>();
        if (!j.at("min_a2").is_null()) c.min_a2 = j.at("min_a2").get<i64>();
        if (!j.at("min_a2_p").is_null()) c.min_a2_p = j.at("min_a2_p").get<u64>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("corrupt checkpoint: ") + e.what(), path.string());
    }
    const DensityCounters& c = cp.counters;
    if (c.ordinary_count > c.good_primes || c.min_a2.has_value() != c.min_a2_p.has_value() ||
        (c.min_a2_p && *c.min_a2_p == 0))
        throw ParseError("corrupt checkpoint: inconsistent counters", path.string());
    return cp;
}

std::string format_fraction(const Fraction& f) {
    if (f.denominator() == 1) return std::to_string(f.numerator());
    return std::to_string(f.numerator()) + "/" + std::to_string(f.denominator());
}

std::string record_to_json_line(const FrobeniusRecord& r) {
    auto opt = [](const auto& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
    ordered_json j;
    j["p"] = r.p;
    j["status"] = std::string(to_string(r.status));
    j["a1"] = opt(r.a1);
    j["a2"] = opt(r.a2);
    j["a2_mod_p"] = opt(r.a2_mod_p);
    j["hw_trace"] = opt(r.hw_trace);
    j["hw_det"] = opt(r.hw_det);
    j["ordinary"] = opt(r.ordinary);
    j["shift"] = opt(r.shift);
    if (r.ap1) j["ap1"] = *r.ap1;
    if (r.ap2) j["ap2"] = *r.ap2;
    return j.dump();
}

std::string report_to_json(const DensityReport& report) {
    const DensityCounters& c = report.counters;
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["surface"] = report.surface;
    j["label"] = report.label;
    j["bound"] = report.bound;
    j["good_primes"] = c.good_primes;
    j["skipped_primes"] = c.skipped_primes;
    j["ordinary_count"] = c.ordinary_count;
    j["empirical"] = format_fraction(report.empirical);
    j["empirical_value"] = boost::rational_cast<double>(report.empirical);
    j["wilson95_low"] = report.interval.low;
    j["wilson95_high"] = report.interval.high;
    j["weil_audited_records"] = c.weil_audited;
    j["roots_checked"] = c.roots_checked;
    const auto min_ratio = c.min_a2_over_p();
    j["min_a2_over_p_observed"] = min_ratio ? ordered_json(*min_ratio) : ordered_json(nullptr);
    j["a2_below_minus_2p"] = c.a2_below_minus_2p > 0;
    if (report.group_id) j["group"] = *report.group_id;
    if (report.predicted) {
        j["predicted"] = format_fraction(*report.predicted);
        j["predicted_value"] = boost::rational_cast<double>(*report.predicted);
    }
    if (report.match) j["match"] = *report.match;
    return j.dump(2) + "\n";
}

}  // namespace ordinary
