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

#include "scribvos/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "scribvos/common.hpp"

namespace scribvos {

namespace {

struct Field {
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    T out{};
    ss >> out;
    if (ss.fail() || !(ss >> std::ws).eof())
        throw InvalidInput("bad value '" + value + "' for config key '" + key + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw InvalidInput("bad boolean '" + value + "' for config key '" + key + "'");
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto add_str = [&t](const char* key, std::string Config::*p) {
            t[key] = {[key, p](Config& c, const std::string& v) { c.*p = v; },
                      [p](const Config& c) { return c.*p; }};
        };
        auto add_int = [&t](const char* key, int Config::*p) {
            t[key] = {[key, p](Config& c, const std::string& v) { c.*p = parse_number<int>(key, v); },
                      [p](const Config& c) { return std::to_string(c.*p); }};
        };
        auto add_double = [&t](const char* key, double Config::*p) {
            t[key] = {[key, p](Config& c, const std::string& v) { c.*p = parse_number<double>(key, v); },
                      [p](const Config& c) { return format_double(c.*p); }};
        };
        auto add_bool = [&t](const char* key, bool Config::*p) {
            t[key] = {[key, p](Config& c, const std::string& v) { c.*p = parse_bool(key, v); },
                      [p](const Config& c) { return (c.*p) ? "true" : "false"; }};
        };
        auto add_u64 = [&t](const char* key, std::uint64_t Config::*p) {
            t[key] = {[key, p](Config& c, const std::string& v) { c.*p = parse_number<std::uint64_t>(key, v); },
                      [p](const Config& c) { return std::to_string(c.*p); }};
        };

        add_str("backbone", &Config::backbone);
        add_int("feat_channels", &Config::feat_channels);
        add_int("attn_heads", &Config::attn_heads);
        add_int("patch_size", &Config::patch_size);
        add_bool("single_step", &Config::single_step);
        add_bool("shared_level_embedding", &Config::shared_level_embedding);
        add_double("lambda_fl", &Config::lambda_fl);
        add_double("lambda_pce", &Config::lambda_pce);
        add_double("lambda_sn", &Config::lambda_sn);
        add_double("lambda_bpc", &Config::lambda_bpc);
        add_double("focal_gamma", &Config::focal_gamma);
        add_double("focal_alpha", &Config::focal_alpha);
        add_double("smooth_alpha", &Config::smooth_alpha);
        add_int("ignore_radius", &Config::ignore_radius);
        add_int("memory_capacity", &Config::memory_capacity);
        add_int("update_period", &Config::update_period);
        add_int("scribble_stroke_width", &Config::scribble_stroke_width);
        add_double("scribble_subsample", &Config::scribble_subsample);
        add_int("scribble_jitter", &Config::scribble_jitter);
        add_str("stage", &Config::stage);
        add_int("clip_length", &Config::clip_length);
        add_int("batch_size", &Config::batch_size);
        add_int("epochs", &Config::epochs);
        add_double("lr", &Config::lr);
        add_double("weight_decay", &Config::weight_decay);
        add_double("grad_stop_prob", &Config::grad_stop_prob);
        add_int("static_lr_halve_every", &Config::static_lr_halve_every);
        add_double("poly_power", &Config::poly_power);
        add_int("crop", &Config::crop);
        add_u64("seed", &Config::seed);
        return t;
    }();
    return table;
}

} // namespace

void Config::validate() const {
    if (patch_size != 16) throw InvalidInput("patch_size is fixed at 16");
    // zero disables a term (ablation runs); negative weights are meaningless
    if (lambda_fl < 0 || lambda_pce < 0 || lambda_sn < 0 || lambda_bpc < 0)
        throw InvalidInput("loss weights must be non-negative");
    if (memory_capacity < 1) throw InvalidInput("memory_capacity must be >= 1");
    if (update_period < 1) throw InvalidInput("update_period must be >= 1");
    if (feat_channels < 8 || feat_channels % attn_heads != 0)
        throw InvalidInput("feat_channels must be >= 8 and divisible by attn_heads");
    if (backbone != "toy" && backbone != "resnet50")
        throw InvalidInput("backbone must be 'toy' or 'resnet50'");
    if (stage != "static" && stage != "video")
        throw InvalidInput("stage must be 'static' or 'video'");
    if (stage == "video" && clip_length < 2)
        throw InvalidInput("clip_length must be >= 2 in the video stage");
    if (scribble_subsample <= 0.0 || scribble_subsample > 1.0)
        throw InvalidInput("scribble_subsample must be in (0,1]");
    if (scribble_stroke_width < 1) throw InvalidInput("scribble_stroke_width must be >= 1");
    if (scribble_jitter < 0) throw InvalidInput("scribble_jitter must be >= 0");
    if (ignore_radius < 0) throw InvalidInput("ignore_radius must be >= 0");
    if (grad_stop_prob < 0.0 || grad_stop_prob > 1.0)
        throw InvalidInput("grad_stop_prob must be in [0,1]");
    if (focal_alpha <= 0.0 || focal_alpha >= 1.0)
        throw InvalidInput("focal_alpha must be in (0,1)");
    if (focal_gamma < 0.0) throw InvalidInput("focal_gamma must be >= 0");
    if (smooth_alpha <= 0.0) throw InvalidInput("smooth_alpha must be > 0");
    if (crop < 64 || crop % 16 != 0) throw InvalidInput("crop must be a multiple of 16, >= 64");
}

void apply_config_entry(Config& cfg, const std::string& key, const std::string& value) {
    const auto& table = field_table();
    const auto it = table.find(key);
    if (it == table.end()) throw InvalidInput("unknown config key '" + key + "'");
    it->second.set(cfg, value);
}

namespace {

Config parse_config_stream(std::istream& in, const std::string& origin) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw MalformedData(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

} // namespace

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("config file '" + path + "' not found");
    return parse_config_stream(in, path);
}

Config parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config_stream(in, "<config>");
}

std::string serialize_config(const Config& cfg) {
    std::ostringstream out;
    for (const auto& [key, field] : field_table())
        out << key << " = " << field.get(cfg) << "\n";
    return out.str();
}

std::uint64_t config_fingerprint(const Config& cfg) {
    // FNV-1a over the canonical text
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char ch : serialize_config(cfg)) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

} // namespace scribvos
