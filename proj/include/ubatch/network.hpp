// Copyright 2026 The ubatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ubatch/domain.hpp"

namespace ubatch {

struct LayerSpec {
  std::string name;
  std::int64_t in_channels = 1;   // C
  std::int64_t height = 1;        // H
  std::int64_t width = 1;         // W
  std::int64_t out_channels = 1;  // K
  std::int64_t kernel_h = 1;
  std::int64_t kernel_w = 1;
  std::int64_t pad = 0;
  std::int64_t stride = 1;
};

// A stack of convolutional layers plus the training mini-batch size. Each
// layer expands into the three kernels of one training step.
struct NetworkDescription {
  std::string name;
  std::int64_t mini_batch = 1;
  std::vector<LayerSpec> layers;
};

// Text format, one directive per line ('#' starts a comment):
//   network NAME
//   minibatch N
//   layer NAME channels=C size=HxW filters=K kernel=HxW [pad=P] [stride=S]
inline NetworkDescription parse_network(std::istream& in,
                                        std::string_view source_name) {
  NetworkDescription net;
  bool have_batch = false;
  std::set<std::string> names;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& message, std::size_t column = 0) {
    std::ostringstream os;
    os << source_name << ":" << line_no;
    if (column > 0) os << ":" << column;
    os << ": " << message;
    throw parse_error(os.str(), line_no, column);
  };
  auto parse_int = [&](const std::string& text, std::size_t column) {
    try {
      std::size_t used = 0;
      std::int64_t value = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return value;
    } catch (const std::exception&) {
      fail("expected an integer, got '" + text + "'", column);
      return std::int64_t{0};  // unreachable
    }
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);

    // Tokenize, remembering 1-based start columns for error messages.
    std::vector<std::pair<std::string, std::size_t>> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (std::isspace(static_cast<unsigned char>(line[pos])) != 0)) ++pos;
      std::size_t start = pos;
      while (pos < line.size() && (std::isspace(static_cast<unsigned char>(line[pos])) == 0)) ++pos;
      if (pos > start) tokens.emplace_back(line.substr(start, pos - start), start + 1);
    }
    if (tokens.empty()) continue;

    const std::string& directive = tokens[0].first;
    if (directive == "network") {
      if (tokens.size() != 2) fail("expected 'network NAME'");
      net.name = tokens[1].first;
    } else if (directive == "minibatch") {
      if (tokens.size() != 2) fail("expected 'minibatch N'");
      net.mini_batch = parse_int(tokens[1].first, tokens[1].second);
      if (net.mini_batch < 1) fail("minibatch must be >= 1", tokens[1].second);
      have_batch = true;
    } else if (directive == "layer") {
      if (tokens.size() < 2) fail("expected 'layer NAME key=value...'");
      LayerSpec layer;
      layer.name = tokens[1].first;
      if (!names.insert(layer.name).second) {
        fail("duplicate layer name '" + layer.name + "'", tokens[1].second);
      }
      bool have_channels = false, have_size = false, have_filters = false,
           have_kernel = false;
      for (std::size_t t = 2; t < tokens.size(); ++t) {
        const auto& [token, column] = tokens[t];
        auto eq = token.find('=');
        if (eq == std::string::npos) fail("expected 'key=value'", column);
        std::string key = token.substr(0, eq);
        std::string value = token.substr(eq + 1);
        std::size_t value_col = column + eq + 1;
        auto parse_pair = [&](std::int64_t& first, std::int64_t& second) {
          auto x = value.find('x');
          if (x == std::string::npos) fail("expected 'HxW'", value_col);
          first = parse_int(value.substr(0, x), value_col);
          second = parse_int(value.substr(x + 1), value_col + x + 1);
        };
        if (key == "channels") {
          layer.in_channels = parse_int(value, value_col);
          have_channels = true;
        } else if (key == "size") {
          parse_pair(layer.height, layer.width);
          have_size = true;
        } else if (key == "filters") {
          layer.out_channels = parse_int(value, value_col);
          have_filters = true;
        } else if (key == "kernel") {
          parse_pair(layer.kernel_h, layer.kernel_w);
          have_kernel = true;
        } else if (key == "pad") {
          layer.pad = parse_int(value, value_col);
        } else if (key == "stride") {
          layer.stride = parse_int(value, value_col);
        } else {
          fail("unknown layer key '" + key + "'", column);
        }
      }
      if (!have_channels || !have_size || !have_filters || !have_kernel) {
        fail("layer '" + layer.name +
             "' needs channels=, size=, filters= and kernel=");
      }
      if (layer.in_channels < 1 || layer.height < 1 || layer.width < 1 ||
          layer.out_channels < 1 || layer.kernel_h < 1 || layer.kernel_w < 1 ||
          layer.stride < 1 || layer.pad < 0) {
        fail("layer '" + layer.name + "' has a non-positive dimension");
      }
      net.layers.push_back(std::move(layer));
    } else {
      fail("unknown directive '" + directive + "'", tokens[0].second);
    }
  }

  ++line_no;
  if (net.layers.empty()) fail("network has no layers");
  if (!have_batch) fail("network is missing 'minibatch N'");
  if (net.name.empty()) net.name = "unnamed";
  return net;
}

inline NetworkDescription load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open network file: " + path.string());
  }
  NetworkDescription net = parse_network(in, path.filename().string());
  if (net.name == "unnamed") net.name = path.stem().string();
  return net;
}

// Expands every layer into its Forward, BackwardData and BackwardFilter
// kernels, in layer order. 3 * |layers| kernels total.
inline std::vector<KernelDescriptor> expand_kernels(
    const NetworkDescription& net,
    std::optional<std::int64_t> batch_override = std::nullopt) {
  const std::int64_t batch = batch_override.value_or(net.mini_batch);
  if (batch < 1) throw std::invalid_argument("batch must be >= 1");
  std::vector<KernelDescriptor> kernels;
  kernels.reserve(net.layers.size() * 3);
  for (const LayerSpec& layer : net.layers) {
    for (OpType op : {OpType::kForward, OpType::kBackwardData,
                      OpType::kBackwardFilter}) {
      KernelDescriptor k;
      k.op_type = op;
      k.batch = batch;
      k.in_channels = layer.in_channels;
      k.height = layer.height;
      k.width = layer.width;
      k.out_channels = layer.out_channels;
      k.kernel_h = layer.kernel_h;
      k.kernel_w = layer.kernel_w;
      k.pad_h = layer.pad;
      k.pad_w = layer.pad;
      k.stride_h = layer.stride;
      k.stride_w = layer.stride;
      k.layer_name = layer.name;
      k.validate();
      kernels.push_back(std::move(k));
    }
  }
  return kernels;
}

}  // namespace ubatch
