#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace colombeau::app {

struct GalleryEntry {
  std::string_view name;
  std::string_view json;
};

/// Bundled scenarios in gallery order (generated from scenarios/*.json).
std::span<const GalleryEntry> gallery();
const GalleryEntry* find_gallery(std::string_view name);

struct ExampleInfo {
  std::string name;
  std::string description;
};
std::vector<ExampleInfo> list_examples();

}  // namespace colombeau::app
