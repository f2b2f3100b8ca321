// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nrcba/error.hpp"

namespace nrcba {

// Fixed-length bit string, MSB-first within each byte. Field order and
// widths follow the overhead reports exactly, so size_bits of an encoded
// PMI equals OverheadReport::total_bits.
struct BitString {
    std::vector<uint8_t> bytes;
    size_t n_bits = 0;

    bool get(size_t i) const { return (bytes[i >> 3] >> (7 - (i & 7))) & 1; }

    std::string to_hex() const;

    bool operator==(const BitString&) const = default;
};

class BitWriter {
  public:
    // Appends the low `width` bits of `value`, most significant first.
    void put(uint64_t value, int width) {
        for (int b = width - 1; b >= 0; --b) {
            if (bits_.n_bits % 8 == 0) bits_.bytes.push_back(0);
            if ((value >> b) & 1) bits_.bytes.back() |= uint8_t(1u << (7 - bits_.n_bits % 8));
            ++bits_.n_bits;
        }
    }

    BitString take() { return std::move(bits_); }

  private:
    BitString bits_;
};

class BitReader {
  public:
    explicit BitReader(const BitString& bits) : bits_(bits) {}

    uint64_t get(int width) {
        if (pos_ + static_cast<size_t>(width) > bits_.n_bits)
            throw CodecError("bit string underrun");
        uint64_t v = 0;
        for (int b = 0; b < width; ++b) v = (v << 1) | uint64_t(bits_.get(pos_++));
        return v;
    }

    size_t remaining() const { return bits_.n_bits - pos_; }

  private:
    const BitString& bits_;
    size_t pos_ = 0;
};

}  // namespace nrcba
