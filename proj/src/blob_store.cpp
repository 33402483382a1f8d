#include "earmark/blob_store.hpp"

#include "earmark/crypto.hpp"
#include "earmark/error.hpp"

#include <algorithm>
#include <fstream>

namespace earmark {

namespace fs = std::filesystem;

FileBlobStore::FileBlobStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

fs::path FileBlobStore::path_for(const std::string& name) const {
  const bool safe =
      !name.empty() && name.front() != '.' &&
      std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c == '.';
      });
  if (!safe) throw Error(ErrorCode::kNotFound, "not found");
  return root_ / name;
}

void FileBlobStore::put(const std::string& name, std::string_view bytes) {
  const fs::path target = path_for(name);
  const fs::path tmp = root_ / (".tmp-" + crypto::random_hex(8));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kInternal, "blob write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kInternal, "blob rename failed");
  }
}

std::optional<std::uint64_t> FileBlobStore::size(const std::string& name) const {
  std::error_code ec;
  auto n = fs::file_size(path_for(name), ec);
  if (ec) return std::nullopt;
  return n;
}

std::string FileBlobStore::read(const std::string& name, std::uint64_t offset,
                                std::uint64_t length) const {
  std::ifstream in(path_for(name), std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "not found");
  in.seekg(static_cast<std::streamoff>(offset));
  std::string out(length, '\0');
  in.read(out.data(), static_cast<std::streamsize>(length));
  out.resize(static_cast<std::size_t>(in.gcount()));
  return out;
}

bool FileBlobStore::remove(const std::string& name) {
  std::error_code ec;
  return fs::remove(path_for(name), ec);
}

std::vector<std::string> FileBlobStore::list() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace earmark
