/*
 * Copyright 2026 The swin4d Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "swin4d/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "swin4d/error.hpp"

namespace swin4d {

namespace {

constexpr const char* kMagic = "swin4d-container";

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

std::string shape_field(const Shape& s) {
  if (s.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out;
}

Shape parse_shape(const std::string& text) {
  Shape s;
  if (text == "-") return s;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    const long long v = std::stoll(part, &used);
    if (used != part.size() || v < 0) throw RuntimeFailure("container: bad shape '" + text + "'");
    s.push_back(v);
  }
  return s;
}

bool has_space(const std::string& s) { return s.find_first_of(" \t\n\r") != std::string::npos; }

}  // namespace

const ContainerTensor* Container::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

std::optional<std::string> Container::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

void Container::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta)
    if (k == key) {
      v = value;
      return;
    }
  meta.emplace_back(key, value);
}

void write_container(const std::filesystem::path& path, const Container& c) {
  std::ostringstream header;
  header << kMagic << '\n' << "format_version " << kContainerFormatVersion << '\n';
  if (c.kind.empty() || has_space(c.kind)) throw ValidationError("container: kind must be a single word");
  header << "kind " << c.kind << '\n';
  for (const auto& [k, v] : c.config) {
    if (has_space(k) || has_space(v)) throw ValidationError("container: config entry '" + k + "' contains whitespace");
    header << "config " << k << ' ' << v << '\n';
  }
  for (const auto& [k, v] : c.meta) {
    if (has_space(k) || v.find('\n') != std::string::npos)
      throw ValidationError("container: bad meta entry '" + k + "'");
    header << "meta " << k << ' ' << v << '\n';
  }
  std::int64_t offset = 0;
  for (const auto& t : c.tensors) {
    if (t.name.empty() || has_space(t.name)) throw ValidationError("container: bad tensor name '" + t.name + "'");
    if (shape_numel(t.shape) != static_cast<Index>(t.values.size()))
      throw ShapeError("container: tensor " + t.name + " has " + std::to_string(t.values.size()) +
                       " values for shape " + shape_to_string(t.shape));
    header << "tensor " << t.name << ' ' << shape_field(t.shape) << ' ' << offset << '\n';
    offset += static_cast<std::int64_t>(t.values.size());
  }
  header << "end_header\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("container: cannot open " + path.string() + " for writing");
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  std::vector<std::uint32_t> buffer;
  for (const auto& t : c.tensors) {
    buffer.resize(t.values.size());
    for (std::size_t i = 0; i < t.values.size(); ++i)
      buffer[i] = to_little_endian(std::bit_cast<std::uint32_t>(t.values[i]));
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * 4));
  }
  if (!out) throw RuntimeFailure("container: write failed for " + path.string());
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("container: cannot open " + path.string());
  auto fail = [&](const std::string& why) { return RuntimeFailure("container " + path.string() + ": " + why); };
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw fail("missing magic line");
  if (!std::getline(in, line) || line != "format_version " + std::to_string(kContainerFormatVersion))
    throw fail("unsupported format version line '" + line + "'");
  Container c;
  struct Entry {
    std::string name;
    Shape shape;
    std::int64_t offset;
  };
  std::vector<Entry> entries;
  bool done = false;
  while (std::getline(in, line)) {
    if (line == "end_header") {
      done = true;
      break;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "kind") {
      ls >> c.kind;
    } else if (tag == "config") {
      std::string k, v;
      if (!(ls >> k >> v)) throw fail("bad config line '" + line + "'");
      c.config.emplace_back(k, v);
    } else if (tag == "meta") {
      std::string k;
      if (!(ls >> k)) throw fail("bad meta line '" + line + "'");
      std::string v;
      std::getline(ls, v);
      if (!v.empty() && v.front() == ' ') v.erase(0, 1);
      c.meta.emplace_back(k, v);
    } else if (tag == "tensor") {
      Entry e;
      std::string shape;
      if (!(ls >> e.name >> shape >> e.offset)) throw fail("bad tensor line '" + line + "'");
      e.shape = parse_shape(shape);
      entries.push_back(std::move(e));
    } else {
      throw fail("unknown header line '" + line + "'");
    }
  }
  if (!done) throw fail("header not terminated");
  const auto payload_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload_bytes = static_cast<std::int64_t>(in.tellg() - payload_start);
  for (const auto& e : entries) {
    const std::int64_t n = shape_numel(e.shape);
    if (e.offset < 0 || (e.offset + n) * 4 > payload_bytes) throw fail("tensor " + e.name + " exceeds payload");
    std::vector<std::uint32_t> raw(static_cast<std::size_t>(n));
    in.seekg(payload_start + static_cast<std::streamoff>(e.offset * 4));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 4));
    if (!in) throw fail("short read for tensor " + e.name);
    ContainerTensor t{e.name, e.shape, std::vector<float>(raw.size())};
    for (std::size_t i = 0; i < raw.size(); ++i) t.values[i] = std::bit_cast<float>(to_little_endian(raw[i]));
    c.tensors.push_back(std::move(t));
  }
  return c;
}

}  // namespace swin4d
