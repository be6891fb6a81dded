#include "ordinary/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "ordinary/catalog.hpp"
#include "ordinary/engine.hpp"
#include "ordinary/errors.hpp"

namespace ordinary::cli {

using nlohmann::ordered_json;

namespace {

struct Options {
    std::string curve;
    std::string catalog = default_catalog_path().string();
    std::string corpus = default_corpus_path().string();
    std::string group;
    std::uint64_t seed = 2024;
    u64 naive_max_fp2 = 499;
    u64 naive_max_fp = 20000;
    u64 bound = 100000;
    unsigned threads = 0;
    std::string out = "-";
    std::string records;
    std::string checkpoint;
    std::string resume;
    int k = 1;
    int samples = 100000;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Opens --out; "-" is the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty() || path == "-") return;
        file_.open(path, std::ios::trunc);
        if (!file_) throw UsageError("cannot open output file " + path);
        stream_ = &file_;
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void check(const Options& o) {
    if (o.bound == 0) throw UsageError("--bound must be positive");
    if (o.naive_max_fp == 0 || o.naive_max_fp2 == 0) throw UsageError("naive-count limits must be positive");
    if (o.naive_max_fp2 > o.naive_max_fp) throw UsageError("--naive-max-fp2 must not exceed --naive-max-fp");
}

EngineConfig engine_config(const Options& o, const std::atomic<bool>* cancel) {
    EngineConfig c;
    c.frobenius.naive_max_fp = o.naive_max_fp;
    c.frobenius.naive_max_fp2 = o.naive_max_fp2;
    c.threads = o.threads;
    c.cancel = cancel;
    if (!o.checkpoint.empty())
        c.checkpoint_path = o.checkpoint;
    else if (!o.resume.empty())
        c.checkpoint_path = o.resume;
    return c;
}

ConstancyOptions constancy_options(const Options& o) {
    ConstancyOptions c;
    c.seed = o.seed;
    return c;
}

const GroupEntry& lookup(const std::vector<GroupEntry>& catalog, const std::string& id) {
    const GroupEntry* e = find_entry(catalog, id);
    if (!e) throw UsageError("unknown group id '" + id + "'");
    return *e;
}

int cmd_frobenius(const Options& o, std::ostream& out) {
    check(o);
    const SurfaceModel model = resolve_surface(o.curve, o.corpus);
    EngineConfig config = engine_config(o, nullptr);
    config.checkpoint_path.reset();
    Sink sink(o.out, out);
    std::ostream& s = sink.get();
    run_density(model, o.bound, config, [&](const FrobeniusRecord& r) {
        if (r.status == ReductionStatus::Good) s << record_to_json_line(r) << '\n';
    });
    return kOk;
}

int cmd_density(const Options& o, std::ostream& out, const std::atomic<bool>* cancel) {
    check(o);
    const SurfaceModel model = resolve_surface(o.curve, o.corpus);
    std::optional<RunCheckpoint> resume;
    if (!o.resume.empty()) resume = checkpoint_read(o.resume);

    std::optional<std::ofstream> records;
    if (!o.records.empty()) {
        // Appending keeps a resumed record file identical to a fresh one.
        records.emplace(o.records, resume ? std::ios::app : std::ios::trunc);
        if (!*records) throw UsageError("cannot open record file " + o.records);
    }
    RecordSink sink;
    if (records) sink = [&](const FrobeniusRecord& r) { *records << record_to_json_line(r) << '\n'; };

    const DensityReport report = run_density(model, o.bound, engine_config(o, cancel), sink, resume);
    Sink dest(o.out, out);
    dest.get() << report_to_json(report);
    return kOk;
}

ordered_json verdict_json(const ComponentVerdict& v) {
    ordered_json j;
    j["component"] = v.component_index;
    j["constant"] = v.constant;
    j["value"] = v.value ? ordered_json(*v.value) : ordered_json(nullptr);
    j["admissible"] = v.admissible ? ordered_json(*v.admissible) : ordered_json(nullptr);
    j["samples_used"] = v.samples_used;
    j["span_rank"] = v.span_rank;
    return j;
}

int cmd_analyze_group(const Options& o, std::ostream& out, std::ostream& err) {
    const auto catalog = load_catalog(o.catalog);
    const GroupEntry& entry = lookup(catalog, o.group);
    const ValidationReport validation = validate_entry(entry);
    if (const auto* failed = validation.first_failure()) {
        err << "validation failed for '" << entry.id << "': " << failed->name << ": " << failed->detail << '\n';
        return kIntegrity;
    }
    const DensityPrediction prediction = predicted_density(entry, constancy_options(o));

    ordered_json j;
    j["group"] = entry.id;
    j["kind"] = std::string(to_string(entry.kind));
    j["realizable"] = entry.realizable;
    j["components"] = entry.component_count();
    j["seed"] = o.seed;
    ordered_json verdicts = ordered_json::array();
    for (const auto& v : prediction.verdicts) verdicts.push_back(verdict_json(v));
    j["verdicts"] = verdicts;
    j["predicted"] = format_fraction(prediction.density);
    j["warnings"] = prediction.warnings;
    Sink dest(o.out, out);
    dest.get() << j.dump(2) << '\n';
    return kOk;
}

int cmd_verify(const Options& o, std::ostream& out, const std::atomic<bool>* cancel) {
    check(o);
    const SurfaceModel model = resolve_surface(o.curve, o.corpus);
    const auto catalog = load_catalog(o.catalog);
    const GroupEntry& entry = lookup(catalog, o.group);
    std::optional<RunCheckpoint> resume;
    if (!o.resume.empty()) resume = checkpoint_read(o.resume);
    const DensityReport report = compare(model, entry, o.bound, engine_config(o, cancel), constancy_options(o), resume);
    Sink dest(o.out, out);
    dest.get() << report_to_json(report);
    return report.match.value_or(false) ? kOk : kMismatch;
}

int cmd_moments(const Options& o, std::ostream& out) {
    const auto catalog = load_catalog(o.catalog);
    const GroupEntry& entry = lookup(catalog, o.group);
    if (o.k < 0 || o.k > 8) throw UsageError("--k must lie in [0, 8]");
    if (o.samples <= 0) throw UsageError("--samples must be positive");
    const MomentEstimate m = moment_estimate(entry, o.k, o.samples, o.seed);

    ordered_json j;
    j["group"] = entry.id;
    j["k"] = o.k;
    j["samples"] = m.samples;
    j["seed"] = o.seed;
    j["mean"] = m.mean;
    j["standard_error"] = m.standard_error;
    Sink dest(o.out, out);
    dest.get() << j.dump(2) << '\n';
    return kOk;
}

}  // namespace

std::filesystem::path default_catalog_path() { return std::filesystem::path(ORDINARY_DATA_DIR) / "catalog.yaml"; }
std::filesystem::path default_corpus_path() { return std::filesystem::path(ORDINARY_DATA_DIR) / "corpus.txt"; }

std::vector<std::pair<std::string, SurfaceModel>> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus", path.string());
    std::vector<std::pair<std::string, SurfaceModel>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string label;
        if (!(fields >> label)) continue;
        std::string rest;
        std::getline(fields, rest);
        if (rest.find_first_not_of(" \t") == std::string::npos) throw ParseError("corpus line without a surface", label);
        SurfaceModel parsed = parse_surface(rest);
        if (parsed.is_genus2()) {
            Genus2Curve c = parsed.genus2();
            c.label = label;
            out.emplace_back(label, SurfaceModel(std::move(c)));
        } else {
            EllipticProduct e = parsed.product();
            e.label = label;
            out.emplace_back(label, SurfaceModel(std::move(e)));
        }
    }
    return out;
}

SurfaceModel resolve_surface(const std::string& text, const std::filesystem::path& corpus) {
    if (text.find(':') != std::string::npos) return parse_surface(text);
    for (auto& [label, model] : load_corpus(corpus))
        if (label == text) return model;
    throw ParseError("not a surface and not a corpus label", text);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const std::atomic<bool>* cancel) {
    CLI::App app{"Ordinary-reduction densities of abelian surfaces and their group-side predictions", "ordinary"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    Options o;

    auto add_curve = [&](CLI::App* cmd) {
        cmd->add_option("--curve", o.curve, "surface text (genus2:[f0,...,fd] or product:[a,b];[a,b]) or corpus label")
            ->required();
        cmd->add_option("--corpus", o.corpus, "corpus file resolving curve labels");
    };
    auto add_run = [&](CLI::App* cmd) {
        cmd->add_option("--bound", o.bound, "largest prime considered");
        cmd->add_option("--naive-max-fp2", o.naive_max_fp2, "largest p for the O(p^2) count over F_{p^2}");
        cmd->add_option("--naive-max-fp", o.naive_max_fp, "largest p for the O(p) count over F_p");
        cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    };
    auto add_group = [&](CLI::App* cmd) {
        cmd->add_option("--catalog", o.catalog, "group catalog (YAML)");
        cmd->add_option("--group", o.group, "catalog entry id")->required();
        cmd->add_option("--seed", o.seed, "seed for every randomized step");
    };
    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", o.out, "output file ('-' = stdout)"); };
    auto add_resume = [&](CLI::App* cmd) {
        cmd->add_option("--checkpoint", o.checkpoint, "write a checkpoint here after every batch");
        cmd->add_option("--resume", o.resume, "continue from this checkpoint (updated in place unless --checkpoint)");
    };

    auto* frob = app.add_subcommand("frobenius", "per-prime Frobenius records (JSON lines) for every good odd p");
    add_curve(frob);
    add_run(frob);
    add_out(frob);

    auto* density = app.add_subcommand("density", "empirical density of ordinary primes with a Wilson interval");
    add_curve(density);
    add_run(density);
    add_out(density);
    add_resume(density);
    density->add_option("--records", o.records, "also write per-prime records (JSON lines) here");

    auto* analyze = app.add_subcommand("analyze-group", "component verdicts and the predicted density of an entry");
    add_group(analyze);
    add_out(analyze);

    auto* verify = app.add_subcommand("verify", "compare a surface's empirical density with an entry's prediction");
    add_curve(verify);
    add_run(verify);
    add_group(verify);
    add_out(verify);
    add_resume(verify);

    auto* moments = app.add_subcommand("moments", "Monte Carlo moments of tr(wedge^2) on an entry");
    add_group(moments);
    add_out(moments);
    moments->add_option("--k", o.k, "moment order in [0, 8]");
    moments->add_option("--samples", o.samples, "Monte Carlo sample count");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*frob) return cmd_frobenius(o, out);
        if (*density) return cmd_density(o, out, cancel);
        if (*analyze) return cmd_analyze_group(o, out, err);
        if (*verify) return cmd_verify(o, out, cancel);
        if (*moments) return cmd_moments(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IntegrityError& e) {
        err << "integrity error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const AnalysisError& e) {
        err << "analysis error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const RunInterrupted& e) {
        err << e.what() << '\n';
        return kInterrupted;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}

}  // namespace ordinary::cli
