#include "treecode/tree.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace treecode {

using nlohmann::json;

TreeSpec TreeSpec::uniform(int depth, const NodeSpec& n) {
  if (depth < 0 || depth > 30) throw std::invalid_argument("tree depth out of range");
  TreeSpec spec;
  spec.depth = depth;
  spec.nodes.assign(spec.node_count(), n);
  return spec;
}

TreeSpec TreeSpec::layered(int depth, const std::vector<NodeSpec>& per_layer) {
  if (static_cast<int>(per_layer.size()) != depth) {
    throw std::invalid_argument("layered spec needs one NodeSpec per layer");
  }
  TreeSpec spec;
  spec.depth = depth;
  spec.nodes.resize(spec.node_count());
  for (int layer = 0; layer < depth; ++layer) {
    std::size_t width = std::size_t{1} << layer;
    for (std::size_t i = 0; i < width; ++i) spec.node(layer, i) = per_layer[layer];
  }
  return spec;
}

bool TreeSpec::is_layered() const {
  for (int layer = 0; layer < depth; ++layer) {
    std::size_t width = std::size_t{1} << layer;
    for (std::size_t i = 1; i < width; ++i) {
      if (!(node(layer, i) == node(layer, 0))) return false;
    }
  }
  return true;
}

namespace {

json gate_to_json(const TwoQubitClifford& g) {
  if (auto name = gate_name(g)) return *name;
  json images = json::array();
  for (const auto& img : g.images) images.push_back(pauli_pair_str(img));
  return images;
}

TwoQubitClifford gate_from_json(const json& j) {
  if (j.is_string()) {
    auto g = gate_by_name(j.get<std::string>());
    if (!g) throw std::runtime_error("unknown gate name: " + j.get<std::string>());
    return *g;
  }
  if (j.is_array() && j.size() == 4) {
    std::array<PauliPair, 4> images;
    for (int i = 0; i < 4; ++i) {
      auto p = pauli_pair_from_str(j[i].get<std::string>());
      if (!p) throw std::runtime_error("bad Pauli pair in gate image table");
      images[i] = *p;
    }
    return clifford_from_images(images);
  }
  throw std::runtime_error("gate must be a name or a 4-entry image table");
}

Pauli stab_from_json(const json& j) {
  auto s = j.get<std::string>();
  if (s.size() == 1) {
    if (auto p = pauli_from_char(s[0]); p && *p != kPauliI) return *p;
  }
  throw std::runtime_error("stab must be one of \"X\", \"Z\", \"Y\"");
}

}  // namespace

std::string TreeSpec::to_json() const {
  json j;
  j["depth"] = depth;
  if (is_layered()) {
    json layers = json::array();
    for (int layer = 0; layer < depth; ++layer) {
      const NodeSpec& n = node(layer, 0);
      layers.push_back({{"layer", layer},
                        {"gate", gate_to_json(n.gate)},
                        {"stab", std::string(1, pauli_char(n.stab))}});
    }
    j["layers"] = layers;
  } else {
    json out = json::array();
    for (int layer = 0; layer < depth; ++layer) {
      std::size_t width = std::size_t{1} << layer;
      for (std::size_t i = 0; i < width; ++i) {
        const NodeSpec& n = node(layer, i);
        out.push_back({{"layer", layer},
                       {"index", i},
                       {"gate", gate_to_json(n.gate)},
                       {"stab", std::string(1, pauli_char(n.stab))}});
      }
    }
    j["nodes"] = out;
  }
  return j.dump(2);
}

TreeSpec TreeSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  int depth = j.at("depth").get<int>();
  if (depth < 0 || depth > 30) throw std::runtime_error("tree depth out of range");

  NodeSpec def{bell_gate(), kPauliZ};
  bool have_default = false;
  if (j.contains("defaults")) {
    const json& d = j["defaults"];
    if (d.contains("gate")) def.gate = gate_from_json(d["gate"]);
    if (d.contains("stab")) def.stab = stab_from_json(d["stab"]);
    have_default = true;
  }

  TreeSpec spec = TreeSpec::uniform(depth, def);
  std::vector<bool> assigned(spec.node_count(), have_default);

  auto apply_layer = [&](int layer, const NodeSpec& n) {
    if (layer < 0 || layer >= depth) throw std::runtime_error("layer out of range");
    std::size_t width = std::size_t{1} << layer;
    for (std::size_t i = 0; i < width; ++i) {
      spec.node(layer, i) = n;
      assigned[flat_index(layer, i)] = true;
    }
  };

  if (j.contains("layers")) {
    for (const auto& entry : j["layers"]) {
      NodeSpec n = def;
      if (entry.contains("gate")) n.gate = gate_from_json(entry["gate"]);
      if (entry.contains("stab")) n.stab = stab_from_json(entry["stab"]);
      apply_layer(entry.at("layer").get<int>(), n);
    }
  }
  if (j.contains("nodes")) {
    for (const auto& entry : j["nodes"]) {
      int layer = entry.at("layer").get<int>();
      std::size_t idx = entry.value("index", std::size_t{0});
      if (layer < 0 || layer >= depth || idx >= (std::size_t{1} << layer)) {
        throw std::runtime_error("node address out of range");
      }
      NodeSpec n = def;
      if (entry.contains("gate")) n.gate = gate_from_json(entry["gate"]);
      if (entry.contains("stab")) n.stab = stab_from_json(entry["stab"]);
      spec.node(layer, idx) = n;
      assigned[flat_index(layer, idx)] = true;
    }
  }
  for (std::size_t k = 0; k < spec.node_count(); ++k) {
    if (!assigned[k]) {
      throw std::runtime_error("tree spec leaves nodes unassigned and has no defaults");
    }
  }
  return spec;
}

TreeSpec TreeSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree spec file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

void TreeSpec::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tree spec file: " + path);
  out << to_json() << "\n";
}

}  // namespace treecode
