#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ordinary/surfaces.hpp"

namespace ordinary::cli {

/// Stable exit codes.
enum ExitCode : int {
    kOk = 0,
    kMismatch = 1,
    kUsage = 2,        // bad flags, malformed surface or catalog, unknown id
    kIntegrity = 3,    // Frobenius data integrity or group validation failure
    kInternal = 4,
    kInterrupted = 130,
};

std::filesystem::path default_catalog_path();
std::filesystem::path default_corpus_path();

/// `label surface` per line; '#' starts a comment.
std::vector<std::pair<std::string, SurfaceModel>> load_corpus(const std::filesystem::path& path);

/// Surface text, or a corpus label when the text has no ':'.
SurfaceModel resolve_surface(const std::string& text, const std::filesystem::path& corpus);

/// Entry point shared by tools/ordinary and the tests. `cancel`, when set,
/// interrupts a density run at the next batch boundary.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* cancel = nullptr);

}  // namespace ordinary::cli
