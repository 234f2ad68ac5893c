#include "vistok/image_header.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace vistok {

namespace {

uint32_t be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

uint16_t be16(const uint8_t* p) { return uint16_t((uint16_t(p[0]) << 8) | p[1]); }

const uint8_t k_png_sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

image_dims read_png(const uint8_t* d, size_t n) {
    // 8-byte signature, IHDR length + tag, then width and height as
    // big-endian 32-bit values.
    if (n < 24 || std::memcmp(d + 12, "IHDR", 4) != 0)
        throw header_error(header_error::kind::corrupt_header, "png: missing IHDR");
    image_dims dims;
    dims.width = be32(d + 16);
    dims.height = be32(d + 20);
    dims.format = "png";
    if (dims.width < 1 || dims.height < 1)
        throw header_error(header_error::kind::corrupt_header, "png: zero dimension");
    return dims;
}

image_dims read_jpeg(const uint8_t* d, size_t n) {
    size_t pos = 2;
    while (pos + 1 < n) {
        if (d[pos] != 0xFF)
            throw header_error(header_error::kind::corrupt_header, "jpeg: lost marker sync");
        size_t m = pos + 1;
        while (m < n && d[m] == 0xFF) ++m;  // fill bytes
        if (m >= n) break;
        const uint8_t marker = d[m];
        pos = m + 1;
        if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) continue;  // standalone
        if (marker == 0xD9 || marker == 0xDA) break;  // EOI / start of scan: no SOF seen
        if (pos + 2 > n)
            throw header_error(header_error::kind::corrupt_header, "jpeg: truncated segment");
        const size_t seg_len = be16(d + pos);
        if (seg_len < 2 || pos + seg_len > n)
            throw header_error(header_error::kind::corrupt_header, "jpeg: bad segment length");
        if (marker == 0xC0 || marker == 0xC2) {  // baseline / progressive SOF
            if (seg_len < 7)
                throw header_error(header_error::kind::corrupt_header, "jpeg: short SOF");
            image_dims dims;
            dims.height = be16(d + pos + 3);
            dims.width = be16(d + pos + 5);
            dims.format = "jpeg";
            if (dims.width < 1 || dims.height < 1)
                throw header_error(header_error::kind::corrupt_header, "jpeg: zero dimension");
            return dims;
        }
        pos += seg_len;
    }
    throw header_error(header_error::kind::corrupt_header, "jpeg: no SOF0/SOF2 segment");
}

}  // namespace

image_dims read_image_header(const uint8_t* data, size_t size) {
    if (data == nullptr || size < 4)
        throw header_error(header_error::kind::unsupported_format, "not enough bytes");
    if (size >= 8 && std::memcmp(data, k_png_sig, 8) == 0) return read_png(data, size);
    if (data[0] == 0xFF && data[1] == 0xD8) return read_jpeg(data, size);
    throw header_error(header_error::kind::unsupported_format, "neither PNG nor JPEG");
}

image_dims read_image_header_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw header_error(header_error::kind::io, "cannot open " + path);
    // Headers live near the front; 64 KiB covers EXIF-laden JPEGs too.
    std::vector<uint8_t> buf(64 * 1024);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    buf.resize(static_cast<size_t>(in.gcount()));
    return read_image_header(buf.data(), buf.size());
}

}  // namespace vistok
