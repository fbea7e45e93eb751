#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "survey/model.hpp"

namespace survey {

/// Append-only JSON-lines log of response records. Each append writes one
/// complete line in a single flushed call, so a crash cannot leave a torn
/// record. Reading takes a snapshot; stored records are never mutated.
class ResponseStore {
public:
    explicit ResponseStore(std::string path) : path_(std::move(path)) {}

    /// Throws std::runtime_error when the file cannot be written.
    void append(const ResponseRecord& r);

    std::vector<ResponseRecord> load() const;
    std::size_t count() const;
    const std::string& path() const { return path_; }

private:
    std::string path_;
    mutable std::mutex mutex_;
};

std::vector<ResponseRecord> load_responses(const std::string& path);
void save_responses(const std::string& path, const std::vector<ResponseRecord>& records);

}  // namespace survey
