#include "catinsight/format.hpp"

#include "catinsight/error.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace catinsight {

std::string format_number(double value) {
    std::array<char, 64> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc{}) {
        throw InvariantError("format_number: conversion failed");
    }
    return std::string(buffer.data(), ptr);
}

double parse_number(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw DataError(std::string(what) + ": '" + std::string(text) + "' is not a number");
    }
    return value;
}

long long parse_integer(std::string_view text, std::string_view what) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError(std::string(what) + ": '" + std::string(text) + "' is not an integer");
    }
    return value;
}

} // namespace catinsight
