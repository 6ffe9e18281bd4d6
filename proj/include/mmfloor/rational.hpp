#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <vector>

namespace mmfloor {

// Exact rational scalar. All model arithmetic in this library is exact;
// doubles appear only in report rendering as a courtesy approximation.
using Rat = mpq_class;

// Parses "p/q" or "p" (base 10, optional sign). Accepts non-canonical input
// such as "2/4" and canonicalizes. Throws std::invalid_argument on malformed
// text or a zero denominator.
Rat parse_rational(const std::string& text);

// Canonical "p/q" form; integers render without the "/q" part.
std::string to_fraction(const Rat& r);

// Decimal approximation with the given number of significant digits,
// e.g. "~1.06250". For reports only.
std::string to_decimal(const Rat& r, int significant = 6);

// Largest integer <= r, as a Rat with denominator 1.
Rat rat_floor(const Rat& r);

// 2^k for any integer k, exact.
Rat pow2(long k);

std::vector<std::string> to_fraction_vector(std::span<const Rat> v);

}  // namespace mmfloor
