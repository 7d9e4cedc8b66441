#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <streambuf>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "autoviz/error.hpp"

namespace autoviz {

inline constexpr const char* kDigestAlgorithm = "sha256";

/// Incremental SHA-256 over a byte stream.
class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error(ErrorCode::internal, "sha256 initialisation failed");
        }
    }

    void update(std::string_view bytes) {
        if (!bytes.empty()) EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size());
    }

    void update(const char* data, std::size_t size) { update(std::string_view(data, size)); }

    /// Finalises and returns the lowercase hex digest. The object is reset afterwards.
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(len * 2);
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 0xF]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes);
    return h.hex();
}

/// Output stream buffer that hashes everything written to it.
class HashingStreambuf : public std::streambuf {
public:
    std::string hex() {
        sync();
        return hash_.hex();
    }

protected:
    int_type overflow(int_type ch) override {
        if (!traits_type::eq_int_type(ch, traits_type::eof())) {
            const char c = traits_type::to_char_type(ch);
            buffer_.push_back(c);
            if (buffer_.size() >= kFlushAt) sync();
        }
        return traits_type::not_eof(ch);
    }

    std::streamsize xsputn(const char* s, std::streamsize n) override {
        buffer_.append(s, static_cast<std::size_t>(n));
        if (buffer_.size() >= kFlushAt) sync();
        return n;
    }

    int sync() override {
        hash_.update(buffer_);
        buffer_.clear();
        return 0;
    }

private:
    static constexpr std::size_t kFlushAt = 64 * 1024;
    Sha256 hash_;
    std::string buffer_;
};

} // namespace autoviz
