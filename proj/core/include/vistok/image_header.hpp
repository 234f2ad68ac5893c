#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vistok {

struct image_dims {
    int64_t height = 0;
    int64_t width = 0;
    std::string format;  // "png" or "jpeg"
};

struct header_error : std::runtime_error {
    enum class kind { unsupported_format, corrupt_header, io };
    header_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
    kind which;
};

// Reads (height, width) from a PNG IHDR chunk or a JPEG SOF0/SOF2 segment
// without decoding pixel data. Intended for dimension-only resize planning.
image_dims read_image_header(const uint8_t* data, size_t size);
image_dims read_image_header_file(const std::string& path);

}  // namespace vistok
