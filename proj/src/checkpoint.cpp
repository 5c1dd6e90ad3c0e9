// This file is part of the scribvos project, a scribble-initialized video
// object segmentation toolkit.
//
// Copyright 2026 the scribvos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scribvos/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "scribvos/common.hpp"

namespace scribvos {

namespace {

constexpr char kMagic[4] = {'S', 'V', 'C', 'P'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw MalformedData("truncated checkpoint");
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto len = read_pod<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw MalformedData("truncated checkpoint");
    return s;
}

} // namespace

void Checkpoint::put(const std::string& name, std::vector<std::int32_t> shape,
                     std::vector<double> data) {
    std::size_t n = 1;
    for (const auto d : shape) n *= static_cast<std::size_t>(d);
    if (n != data.size()) throw InvalidInput("checkpoint tensor '" + name + "' shape mismatch");
    shapes[name] = std::move(shape);
    tensors[name] = std::move(data);
}

const std::vector<double>& Checkpoint::tensor(const std::string& name) const {
    const auto it = tensors.find(name);
    if (it == tensors.end()) throw MalformedData("checkpoint has no tensor '" + name + "'");
    return it->second;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write checkpoint '" + path + "'");
    out.write(kMagic, 4);
    write_pod<std::uint32_t>(out, ckpt.version);
    write_pod<std::uint64_t>(out, ckpt.config_fingerprint);

    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, data] : ckpt.tensors) {
        write_string(out, name);
        const auto& shape = ckpt.shapes.at(name);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
        for (const auto d : shape) write_pod<std::int32_t>(out, d);
        write_pod<std::uint64_t>(out, data.size());
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(double)));
    }

    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.metadata.size()));
    for (const auto& [key, value] : ckpt.metadata) {
        write_string(out, key);
        write_string(out, value);
    }
    if (!out) throw IOError("failed while writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("checkpoint '" + path + "' not found");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw MalformedData("'" + path + "' is not a checkpoint file");

    Checkpoint ckpt;
    ckpt.version = read_pod<std::uint32_t>(in);
    if (ckpt.version != 1)
        throw MalformedData("unsupported checkpoint version " + std::to_string(ckpt.version));
    ckpt.config_fingerprint = read_pod<std::uint64_t>(in);

    const auto ntensors = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < ntensors; ++i) {
        const std::string name = read_string(in);
        const auto rank = read_pod<std::uint32_t>(in);
        std::vector<std::int32_t> shape(rank);
        for (auto& d : shape) d = read_pod<std::int32_t>(in);
        const auto count = read_pod<std::uint64_t>(in);
        std::vector<double> data(count);
        in.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
        if (!in) throw MalformedData("truncated checkpoint tensor '" + name + "'");
        ckpt.put(name, std::move(shape), std::move(data));
    }

    const auto nmeta = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nmeta; ++i) {
        const std::string key = read_string(in);
        ckpt.metadata[key] = read_string(in);
    }
    return ckpt;
}

} // namespace scribvos
