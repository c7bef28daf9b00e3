#include "app/gallery.hpp"

#include "app/scenario.hpp"

namespace colombeau::app {

const GalleryEntry* find_gallery(std::string_view name) {
  for (const auto& e : gallery()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<ExampleInfo> list_examples() {
  std::vector<ExampleInfo> out;
  for (const auto& e : gallery()) {
    const Scenario sc = parse_scenario_text(std::string(e.json), std::string(e.name));
    out.push_back({sc.name, sc.description});
  }
  return out;
}

}  // namespace colombeau::app
