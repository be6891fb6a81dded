#include "ordinary/catalog.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "ordinary/errors.hpp"

namespace ordinary {

namespace {

template <class T>
T required(const YAML::Node& doc, const char* key, const std::string& where) {
    const YAML::Node node = doc[key];
    if (!node) throw ParseError("catalog entry is missing '" + std::string(key) + "'", where);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ParseError("catalog field '" + std::string(key) + "' has the wrong type", where);
    }
}

GroupEntry parse_document(const YAML::Node& doc, std::size_t position) {
    if (!doc.IsMap()) throw ParseError("catalog document is not a mapping", "document " + std::to_string(position));
    GroupEntry entry;
    entry.id = required<std::string>(doc, "id", "document " + std::to_string(position));
    const std::string& where = entry.id;

    const auto kind_text = required<std::string>(doc, "kind", where);
    const auto kind = kind_from_string(kind_text);
    if (!kind) throw ParseError("unknown identity component kind", kind_text);
    entry.kind = *kind;
    entry.realizable = required<bool>(doc, "realizable", where);
    entry.root_of_unity_order = required<int>(doc, "root_of_unity_order", where);
    if (entry.root_of_unity_order < 1) {
        throw ParseError("root_of_unity_order must be positive", std::to_string(entry.root_of_unity_order));
    }

    if (const YAML::Node meta = doc["metadata"]) {
        if (!meta.IsMap()) throw ParseError("metadata must be a mapping", where);
        for (const auto& kv : meta) {
            entry.metadata.emplace_back(kv.first.as<std::string>(), kv.second.as<std::string>());
        }
    }

    const YAML::Node reps = doc["coset_reps"];
    if (!reps || !reps.IsSequence()) throw ParseError("coset_reps must be a list of 4x4 matrices", where);
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const YAML::Node m = reps[r];
        const std::string at = where + " rep " + std::to_string(r);
        if (!m.IsSequence() || m.size() != 4) throw ParseError("representative must have 4 rows", at);
        ExactMatrix exact;
        for (std::size_t i = 0; i < 4; ++i) {
            if (!m[i].IsSequence() || m[i].size() != 4) throw ParseError("row must have 4 entries", at);
            for (std::size_t j = 0; j < 4; ++j) {
                exact[i][j] = parse_cyclotomic(m[i][j].as<std::string>(), entry.root_of_unity_order);
            }
        }
        entry.exact_reps.push_back(std::move(exact));
    }
    entry.render();
    return entry;
}

}  // namespace

std::vector<GroupEntry> parse_catalog(std::string_view text) {
    std::vector<YAML::Node> docs;
    try {
        docs = YAML::LoadAll(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string("catalog is not valid YAML: ") + e.what());
    }
    std::vector<GroupEntry> out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].IsNull()) continue;
        out.push_back(parse_document(docs[i], i));
        if (find_entry({out.begin(), out.end() - 1}, out.back().id)) {
            throw ParseError("duplicate catalog id", out.back().id);
        }
    }
    return out;
}

std::vector<GroupEntry> load_catalog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open catalog file", path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_catalog(ss.str());
}

std::string serialize_entry(const GroupEntry& entry) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << entry.id;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(entry.kind));
    out << YAML::Key << "realizable" << YAML::Value << entry.realizable;
    out << YAML::Key << "root_of_unity_order" << YAML::Value << entry.root_of_unity_order;
    if (!entry.metadata.empty()) {
        out << YAML::Key << "metadata" << YAML::Value << YAML::BeginMap;
        for (const auto& [k, v] : entry.metadata) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
        out << YAML::EndMap;
    }
    out << YAML::Key << "coset_reps" << YAML::Value << YAML::BeginSeq;
    for (const ExactMatrix& m : entry.exact_reps) {
        out << YAML::BeginSeq;
        for (const auto& row : m) {
            out << YAML::Flow << YAML::BeginSeq;
            for (const auto& x : row) out << YAML::DoubleQuoted << format_cyclotomic(x);
            out << YAML::EndSeq;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string("---\n") + out.c_str() + "\n";
}

std::string serialize_catalog(const std::vector<GroupEntry>& entries) {
    std::string out;
    for (const auto& e : entries) out += serialize_entry(e);
    return out;
}

const GroupEntry* find_entry(const std::vector<GroupEntry>& entries, std::string_view id) noexcept {
    for (const auto& e : entries) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

bool same_entry(const GroupEntry& a, const GroupEntry& b) {
    return a.id == b.id && a.kind == b.kind && a.realizable == b.realizable &&
           a.root_of_unity_order == b.root_of_unity_order && a.metadata == b.metadata && a.exact_reps == b.exact_reps;
}

}  // namespace ordinary
