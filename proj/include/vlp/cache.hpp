#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "vlp/backend.hpp"

namespace vlp {

// Content-addressed response store: one <digest>.json file per entry,
// published atomically via temp-file-then-rename. Entries are immutable;
// concurrent writers of the same key produce identical files, so last
// writer wins harmlessly.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir);

  std::optional<BackendResponse> get(const std::string& key) const;
  void put(const std::string& key, const BackendResponse& response) const;

  std::size_t entry_count() const;
  std::uintmax_t total_bytes() const;
  void clear() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const;
  std::filesystem::path dir_;
};

// Wraps any backend with the cache: hits return the stored response with
// from_cache=true and never touch the inner backend.
class CachingBackend : public Backend {
 public:
  CachingBackend(std::shared_ptr<Backend> inner, std::shared_ptr<DiskCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  BackendResponse call(const BackendRequest& request) override;
  std::string id() const override { return inner_->id(); }
  std::uint64_t calls() const override { return inner_->calls(); }
  std::uint64_t transport_ops() const override { return inner_->transport_ops(); }

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }

 private:
  std::shared_ptr<Backend> inner_;
  std::shared_ptr<DiskCache> cache_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

}  // namespace vlp
