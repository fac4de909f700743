#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gil::testing {

inline std::string fresh_temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("gil_" + tag + "_" +
                                                    std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline void write_be_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

// standard IDX pair for unsigned-byte images/labels
inline void write_idx_pair(const std::string& images_path, const std::string& labels_path,
                           const std::vector<std::vector<std::uint8_t>>& images,
                           const std::vector<std::uint8_t>& labels, std::uint32_t rows,
                           std::uint32_t cols) {
  std::ofstream img(images_path, std::ios::binary);
  write_be_u32(img, 0x00000803u);
  write_be_u32(img, static_cast<std::uint32_t>(images.size()));
  write_be_u32(img, rows);
  write_be_u32(img, cols);
  for (const auto& image : images)
    img.write(reinterpret_cast<const char*>(image.data()),
              static_cast<std::streamsize>(image.size()));

  std::ofstream lab(labels_path, std::ios::binary);
  write_be_u32(lab, 0x00000801u);
  write_be_u32(lab, static_cast<std::uint32_t>(labels.size()));
  lab.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

}  // namespace gil::testing
