#include "survey/store.hpp"

#include <fstream>
#include <sstream>

#include "survey/response_io.hpp"

namespace survey {

namespace {

std::string read_file_or_empty(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

void ResponseStore::append(const ResponseRecord& r) {
    std::string line = response_to_json(r).dump() + "\n";
    std::lock_guard<std::mutex> lock(mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open response store " + path_);
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to response store " + path_ + " failed");
}

std::vector<ResponseRecord> ResponseStore::load() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return read_jsonl(read_file_or_empty(path_));
}

std::size_t ResponseStore::count() const { return load().size(); }

std::vector<ResponseRecord> load_responses(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_jsonl(buf.str());
}

void save_responses(const std::string& path, const std::vector<ResponseRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    std::string text = write_jsonl(records);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace survey
