#include "vlp/cache.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>

namespace vlp {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

DiskCache::DiskCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

fs::path DiskCache::entry_path(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<BackendResponse> DiskCache::get(const std::string& key) const {
  std::ifstream in(entry_path(key));
  if (!in) return std::nullopt;
  nlohmann::json doc;
  try {
    in >> doc;
    BackendResponse response = BackendResponse::from_json(doc.at("response"));
    response.from_cache = true;
    response.latency_ms = 0;
    return response;
  } catch (const std::exception&) {
    // Unreadable entry is treated as a miss; the atomic rewrite replaces it.
    return std::nullopt;
  }
}

void DiskCache::put(const std::string& key, const BackendResponse& response) const {
  nlohmann::json entry;
  entry["key"] = key;
  entry["response"] = response.to_json();
  entry["created_at"] = utc_timestamp();

  // Unique tmp name per writer: concurrent writers of one key must not
  // interleave before the atomic rename.
  static std::atomic<std::uint64_t> serial{0};
  const fs::path target = entry_path(key);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(serial.fetch_add(1));
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write cache entry: " + tmp.string());
    out << entry.dump(2) << "\n";
  }
  fs::rename(tmp, target);
}

std::size_t DiskCache::entry_count() const {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.is_regular_file() && e.path().extension() == ".json") ++n;
  return n;
}

std::uintmax_t DiskCache::total_bytes() const {
  std::uintmax_t bytes = 0;
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.is_regular_file()) bytes += e.file_size();
  return bytes;
}

void DiskCache::clear() const {
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.is_regular_file()) fs::remove(e.path());
}

BackendResponse CachingBackend::call(const BackendRequest& request) {
  const std::string key = cache_key(request);
  if (auto hit = cache_->get(key)) {
    hits_.fetch_add(1);
    return *hit;
  }
  misses_.fetch_add(1);
  BackendResponse response = inner_->call(request);
  BackendResponse stored = response;
  stored.from_cache = false;
  cache_->put(key, stored);
  return response;
}

}  // namespace vlp
