#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "varhardy/atomic.hpp"
#include "varhardy/mart_ops.hpp"
#include "varhardy/prob_core.hpp"
#include "varhardy/varlp.hpp"

namespace varhardy::io {

// All writers emit compact single-line JSON terminated by a newline, with
// every real printed as %.17g, so load(save(x)) re-serializes to the same
// bytes. +inf is written as the string "inf".

/// Number token as written in every format; "\"inf\"" for +inf.
std::string format_number(double v);

std::string serialize_space(const FiltrationSpace& space);
FiltrationSpace parse_space(std::string_view text);

/// {"values": [...]}; shared by exponent and random-variable files.
std::string serialize_values(const RandomVariable& x);
RandomVariable parse_values(std::string_view text);

std::string serialize_exponent(const Exponent& p);
Exponent parse_exponent(std::string_view text);

/// Writes {"levels": [[f_0], ..., [f_N]]}.
std::string serialize_martingale(const Martingale& f);
/// Accepts {"terminal": [...]} or {"levels": [[...], ...]}.
Martingale parse_martingale(const FiltrationSpace& space, std::string_view text);

std::string serialize_decomposition(const AtomicDecomposition& dec);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace varhardy::io
