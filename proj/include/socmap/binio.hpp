#ifndef SOCMAP_BINIO_HPP
#define SOCMAP_BINIO_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "socmap/error.hpp"

namespace socmap {

uint32_t crc32(const void* data, size_t len, uint32_t seed = 0);

// Little-endian append-only byte buffer.
class BinaryWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v) { raw(&v, 4); }
    void u64(uint64_t v) { raw(&v, 8); }
    void i64(int64_t v) { raw(&v, 8); }
    void f32(float v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }
    void str(const std::string& s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void f64_array(const std::vector<double>& v) {
        u64(v.size());
        raw(v.data(), v.size() * 8);
    }
    void f32_array(const std::vector<float>& v) {
        u64(v.size());
        raw(v.data(), v.size() * 4);
    }
    void u32_array(const std::vector<uint32_t>& v) {
        u64(v.size());
        raw(v.data(), v.size() * 4);
    }
    void raw(const void* p, size_t n) {
        const uint8_t* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }

    const std::vector<uint8_t>& bytes() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

private:
    std::vector<uint8_t> buf_;
};

class BinaryReader {
public:
    BinaryReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
    explicit BinaryReader(const std::vector<uint8_t>& v) : data_(v.data()), size_(v.size()) {}

    uint8_t u8() { return take<uint8_t>(); }
    uint32_t u32() { return take<uint32_t>(); }
    uint64_t u64() { return take<uint64_t>(); }
    int64_t i64() { return take<int64_t>(); }
    float f32() { return take<float>(); }
    double f64() { return take<double>(); }
    std::string str() {
        uint64_t n = u64();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    std::vector<double> f64_array() { return take_array<double>(); }
    std::vector<float> f32_array() { return take_array<float>(); }
    std::vector<uint32_t> u32_array() { return take_array<uint32_t>(); }

    size_t remaining() const { return size_ - pos_; }
    bool done() const { return pos_ == size_; }

private:
    template <typename T>
    T take() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_ + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    template <typename T>
    std::vector<T> take_array() {
        uint64_t n = u64();
        need(n * sizeof(T));
        std::vector<T> v(n);
        std::memcpy(v.data(), data_ + pos_, n * sizeof(T));
        pos_ += n * sizeof(T);
        return v;
    }
    void need(size_t n) {
        if (size_ - pos_ < n)
            throw IoError("binary payload truncated");
    }

    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<uint8_t>& bytes);

} // namespace socmap

#endif
