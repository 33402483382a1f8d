#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace earmark {

/// Audio bytes keyed by stored name.
class BlobStore {
 public:
  virtual ~BlobStore() = default;

  /// Atomic: either the whole blob becomes visible or nothing does.
  virtual void put(const std::string& name, std::string_view bytes) = 0;
  virtual std::optional<std::uint64_t> size(const std::string& name) const = 0;
  virtual std::string read(const std::string& name, std::uint64_t offset,
                           std::uint64_t length) const = 0;
  virtual bool remove(const std::string& name) = 0;
  /// Every entry currently present, sorted.
  virtual std::vector<std::string> list() const = 0;
};

class FileBlobStore final : public BlobStore {
 public:
  explicit FileBlobStore(std::filesystem::path root);

  void put(const std::string& name, std::string_view bytes) override;
  std::optional<std::uint64_t> size(const std::string& name) const override;
  std::string read(const std::string& name, std::uint64_t offset,
                   std::uint64_t length) const override;
  bool remove(const std::string& name) override;
  std::vector<std::string> list() const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_for(const std::string& name) const;

  std::filesystem::path root_;
};

}  // namespace earmark
