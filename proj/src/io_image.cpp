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

#include "scribvos/io_image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace scribvos {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IOError("cannot open '" + path + "'");
    return f;
}

bool has_suffix(const std::string& s, const char* suffix) {
    const size_t n = std::strlen(suffix);
    if (s.size() < n) return false;
    std::string tail = s.substr(s.size() - n);
    std::transform(tail.begin(), tail.end(), tail.begin(), ::tolower);
    return tail == suffix;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

// Decodes a PNG into 8-bit rows; `raw_palette` keeps palette indices
// unexpanded when requested (annotation files).
struct DecodedPng {
    int h = 0, w = 0, channels = 0;
    bool is_palette = false;
    std::vector<std::uint8_t> rows; // h * w * channels
};

DecodedPng decode_png(const std::string& path, bool keep_palette_indices) {
    FilePtr f = open_file(path, "rb");
    png_byte header[8];
    if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw MalformedData("'" + path + "' is not a PNG file");

    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw IOError("png_create_read_struct failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw IOError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(r.png)))
        throw MalformedData("failed to decode PNG '" + path + "'");

    png_init_io(r.png, f.get());
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    const png_byte color_type = png_get_color_type(r.png, r.info);
    const png_byte bit_depth = png_get_bit_depth(r.png, r.info);
    const bool palette = (color_type == PNG_COLOR_TYPE_PALETTE);

    if (palette && keep_palette_indices) {
        if (bit_depth < 8) png_set_packing(r.png); // one index per byte
    } else {
        if (palette) png_set_palette_to_rgb(r.png);
        if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
            png_set_expand_gray_1_2_4_to_8(r.png);
        if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
        if (bit_depth == 16) png_set_strip_16(r.png);
        png_set_strip_alpha(r.png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(r.png);
    }
    png_read_update_info(r.png, r.info);

    DecodedPng out;
    out.h = static_cast<int>(png_get_image_height(r.png, r.info));
    out.w = static_cast<int>(png_get_image_width(r.png, r.info));
    out.channels = static_cast<int>(png_get_channels(r.png, r.info));
    out.is_palette = palette;
    out.rows.resize(static_cast<size_t>(out.h) * out.w * out.channels);

    std::vector<png_bytep> row_ptrs(out.h);
    const size_t stride = static_cast<size_t>(out.w) * out.channels;
    for (int y = 0; y < out.h; ++y) row_ptrs[y] = out.rows.data() + y * stride;
    png_read_image(r.png, row_ptrs.data());
    png_read_end(r.png, nullptr);
    return out;
}

struct JpegErrorMgr {
    jpeg_error_mgr mgr;
    std::jmp_buf jmp;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(err->jmp, 1);
}

Image decode_jpeg(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.mgr);
    jerr.mgr.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jmp)) {
        jpeg_destroy_decompress(&cinfo);
        throw MalformedData("failed to decode JPEG '" + path + "'");
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    Image img(static_cast<int>(cinfo.output_height), static_cast<int>(cinfo.output_width));
    std::vector<std::uint8_t> row(static_cast<size_t>(img.w) * 3);
    JSAMPROW rows[1] = {row.data()};
    int y = 0;
    while (cinfo.output_scanline < cinfo.output_height) {
        jpeg_read_scanlines(&cinfo, rows, 1);
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) = row[x * 3 + c] / 255.0;
        ++y;
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

} // namespace

const std::array<std::uint8_t, 256 * 3>& label_palette() {
    static const std::array<std::uint8_t, 256 * 3> palette = [] {
        std::array<std::uint8_t, 256 * 3> p{};
        for (int i = 0; i < 256; ++i) {
            int id = i, r = 0, g = 0, b = 0;
            for (int shift = 7; shift >= 0 && id; --shift) {
                r |= ((id >> 0) & 1) << shift;
                g |= ((id >> 1) & 1) << shift;
                b |= ((id >> 2) & 1) << shift;
                id >>= 3;
            }
            p[i * 3 + 0] = static_cast<std::uint8_t>(r);
            p[i * 3 + 1] = static_cast<std::uint8_t>(g);
            p[i * 3 + 2] = static_cast<std::uint8_t>(b);
        }
        return p;
    }();
    return palette;
}

Image read_image(const std::string& path) {
    if (has_suffix(path, ".jpg") || has_suffix(path, ".jpeg")) return decode_jpeg(path);

    DecodedPng d = decode_png(path, /*keep_palette_indices=*/false);
    if (d.channels != 3) throw MalformedData("expected RGB data in '" + path + "'");
    Image img(d.h, d.w);
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = d.rows[i] / 255.0;
    return img;
}

void write_image_png(const std::string& path, const Image& img) {
    FilePtr f = open_file(path, "wb");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw IOError("png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw IOError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) throw IOError("failed to write PNG '" + path + "'");

    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, img.w, img.h, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    std::vector<std::uint8_t> row(static_cast<size_t>(img.w) * 3);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c) {
                const double v = std::clamp(img.at(y, x, c), 0.0, 1.0);
                row[x * 3 + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

LabelMask read_label_png(const std::string& path) {
    DecodedPng d = decode_png(path, /*keep_palette_indices=*/true);
    LabelMask mask(d.h, d.w);
    if (d.is_palette) {
        if (d.channels != 1) throw MalformedData("unexpected palette layout in '" + path + "'");
        std::copy(d.rows.begin(), d.rows.end(), mask.labels.begin());
        return mask;
    }
    // Gray fallback: raw index per pixel. Annotation files never carry large
    // gray values, so anything >= 64 indicates a non-index image.
    if (d.channels == 3) {
        for (size_t i = 0; i < mask.labels.size(); ++i) {
            const std::uint8_t r = d.rows[i * 3], g = d.rows[i * 3 + 1], b = d.rows[i * 3 + 2];
            if (r != g || g != b || r >= 64)
                throw MalformedData("'" + path + "' is not an index-palette annotation");
            mask.labels[i] = r;
        }
        return mask;
    }
    throw MalformedData("unsupported annotation format in '" + path + "'");
}

void write_label_png(const std::string& path, const LabelMask& mask) {
    FilePtr f = open_file(path, "wb");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw IOError("png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw IOError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) throw IOError("failed to write PNG '" + path + "'");

    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, mask.w, mask.h, 8, PNG_COLOR_TYPE_PALETTE,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

    const auto& pal = label_palette();
    std::vector<png_color> colors(256);
    for (int i = 0; i < 256; ++i)
        colors[i] = {pal[i * 3], pal[i * 3 + 1], pal[i * 3 + 2]};
    png_set_PLTE(w.png, w.info, colors.data(), 256);
    png_write_info(w.png, w.info);

    std::vector<std::uint8_t> row(mask.w);
    for (int y = 0; y < mask.h; ++y) {
        std::copy_n(mask.labels.data() + static_cast<size_t>(y) * mask.w, mask.w, row.data());
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

} // namespace scribvos
