#include "artifacts.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <memory>
#include <stdexcept>
#include <system_error>

namespace gsi::cli {

std::string sha256_hex(std::string_view data) {
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
        throw std::runtime_error("sha256: digest computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string text;
    text.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        text.push_back(hex[digest[i] >> 4]);
        text.push_back(hex[digest[i] & 0x0f]);
    }
    return text;
}

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return {buf.data(), end};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> columns)
    : out_(path, std::ios::binary), width_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::string header;
    for (std::string_view c : columns) {
        if (!header.empty()) header.push_back(',');
        header.append(c);
    }
    out_ << header << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != width_) throw std::logic_error("CsvWriter: row width does not match the header");
    line_.clear();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) line_.push_back(',');
        line_.append(format_double(values[i]));
    }
    line_.push_back('\n');
    out_ << line_;
    if (!out_) throw std::runtime_error("CsvWriter: write failed");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

} // namespace gsi::cli
