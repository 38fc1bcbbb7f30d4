#!/usr/bin/env python3
"""Regenerates include/bertdetect/unicode_tables.hpp.

Letter ranges: contiguous codepoint ranges whose general category starts
with 'L'. Lowercase map: 1:1 mappings only; codepoints whose lowercase
form expands to more than one codepoint are left unmapped.
"""

import sys
import unicodedata

MAX_CP = 0x110000


def letter_ranges():
    ranges = []
    start = None
    for cp in range(MAX_CP):
        is_letter = unicodedata.category(chr(cp)).startswith("L")
        if is_letter and start is None:
            start = cp
        elif not is_letter and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP - 1))
    return ranges


def lower_pairs():
    pairs = []
    for cp in range(MAX_CP):
        lo = chr(cp).lower()
        if len(lo) == 1 and ord(lo) != cp:
            pairs.append((cp, ord(lo)))
    return pairs


def main(out_path):
    ranges = letter_ranges()
    pairs = lower_pairs()
    with open(out_path, "w", encoding="utf-8") as f:
        f.write("#pragma once\n\n")
        f.write("// Generated by scripts/gen_unicode_tables.py. Do not edit by hand.\n\n")
        f.write("#include <cstddef>\n#include <cstdint>\n\n")
        f.write("namespace bertdetect::detail {\n\n")
        f.write("struct CpRange { uint32_t lo; uint32_t hi; };\n")
        f.write("struct CpPair { uint32_t from; uint32_t to; };\n\n")
        f.write(f"inline constexpr std::size_t kLetterRangeCount = {len(ranges)};\n")
        f.write("inline constexpr CpRange kLetterRanges[] = {\n")
        for i in range(0, len(ranges), 6):
            row = ", ".join(f"{{{a:#x}, {b:#x}}}" for a, b in ranges[i : i + 6])
            f.write(f"    {row},\n")
        f.write("};\n\n")
        f.write(f"inline constexpr std::size_t kLowerPairCount = {len(pairs)};\n")
        f.write("inline constexpr CpPair kLowerPairs[] = {\n")
        for i in range(0, len(pairs), 6):
            row = ", ".join(f"{{{a:#x}, {b:#x}}}" for a, b in pairs[i : i + 6])
            f.write(f"    {row},\n")
        f.write("};\n\n")
        f.write("}  // namespace bertdetect::detail\n")
    print(f"{len(ranges)} letter ranges, {len(pairs)} lowercase pairs -> {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/bertdetect/unicode_tables.hpp")
