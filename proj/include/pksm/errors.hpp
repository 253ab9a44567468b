#pragma once

#include <stdexcept>
#include <string>

namespace pksm {

// Every error raised by the library derives from pksm::error so callers can
// catch the whole family in one place (the CLI maps it to exit code 2).
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class invalid_code_error : public error {
public:
    using error::error;
};

class out_of_range_error : public error {
public:
    using error::error;
};

class empty_pattern_error : public error {
public:
    empty_pattern_error() : error("pattern must contain at least one character") {}
};

class invalid_parameter_error : public error {
public:
    using error::error;
};

class no_forward_transition_error : public error {
public:
    using error::error;
};

class malformed_encoding_error : public error {
public:
    using error::error;
};

class encoding_overflow_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

class unmappable_byte_error : public error {
public:
    unmappable_byte_error(std::size_t offset, unsigned char byte)
        : error("unmappable byte 0x" + hex(byte) + " at offset " + std::to_string(offset)),
          offset_(offset), byte_(byte) {}

    std::size_t offset() const noexcept { return offset_; }
    unsigned char byte() const noexcept { return byte_; }

private:
    static std::string hex(unsigned char b) {
        static constexpr char digits[] = "0123456789abcdef";
        return {digits[b >> 4], digits[b & 0xf]};
    }

    std::size_t offset_;
    unsigned char byte_;
};

} // namespace pksm
