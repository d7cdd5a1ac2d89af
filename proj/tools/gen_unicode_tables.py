#!/usr/bin/env python3
"""Generate unicode_tables.inc from Python's unicodedata.

Emits simple lowercase mappings, full canonical/compatibility decompositions,
combining classes, and canonical composition pairs. Hangul syllables are
handled algorithmically at runtime and excluded here.

Usage: python3 tools/gen_unicode_tables.py > src/generated/unicode_tables.inc
"""

import sys
import unicodedata

HANGUL_BASE = 0xAC00
HANGUL_END = 0xD7A3
MAX_CP = 0x110000


def is_hangul_syllable(cp):
    return HANGUL_BASE <= cp <= HANGUL_END


def gen_lower():
    rows = []
    for cp in range(MAX_CP):
        c = chr(cp)
        lo = c.lower()
        if len(lo) == 1 and lo != c:
            rows.append((cp, ord(lo)))
    return rows


def gen_decomp(form):
    rows = []
    for cp in range(MAX_CP):
        if is_hangul_syllable(cp):
            continue
        c = chr(cp)
        d = unicodedata.normalize(form, c)
        if d != c:
            rows.append((cp, [ord(x) for x in d]))
    return rows


def gen_ccc():
    rows = []
    for cp in range(MAX_CP):
        ccc = unicodedata.combining(chr(cp))
        if ccc:
            rows.append((cp, ccc))
    return rows


def gen_comp(nfd_rows):
    rows = []
    for cp, d in nfd_rows:
        if len(d) != 2:
            continue
        a, b = d
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            rows.append((a, b, cp))
    rows.sort()
    return rows


def gen_punct_ranges():
    ranges = []
    lo = None
    prev = None
    for cp in range(MAX_CP):
        if unicodedata.category(chr(cp)).startswith("P"):
            if lo is None:
                lo = cp
            prev = cp
        elif lo is not None:
            ranges.append((lo, prev))
            lo = None
    if lo is not None:
        ranges.append((lo, prev))
    return ranges


def emit(out):
    lower = gen_lower()
    nfd = gen_decomp("NFD")
    nfkd_all = gen_decomp("NFKD")
    nfd_map = dict(nfd)
    # store only entries where NFKD differs from NFD
    nfkd = [(cp, d) for cp, d in nfkd_all if nfd_map.get(cp) != d]
    ccc = gen_ccc()
    comp = gen_comp(nfd)

    w = out.write
    w("// Generated by tools/gen_unicode_tables.py (unicodedata %s). Do not edit.\n"
      % unicodedata.unidata_version)
    w("// clang-format off\n\n")

    w("static const CaseMap kLowerTable[] = {\n")
    for cp, lo in lower:
        w("  {0x%X, 0x%X},\n" % (cp, lo))
    w("};\n\n")

    pool = []
    def pooled(rows):
        entries = []
        for cp, d in rows:
            entries.append((cp, len(pool), len(d)))
            pool.extend(d)
        return entries

    nfd_entries = pooled(nfd)
    nfkd_entries = pooled(nfkd)

    w("static const DecompEntry kNfdTable[] = {\n")
    for cp, off, n in nfd_entries:
        w("  {0x%X, %d, %d},\n" % (cp, off, n))
    w("};\n\n")

    w("static const DecompEntry kNfkdTable[] = {\n")
    for cp, off, n in nfkd_entries:
        w("  {0x%X, %d, %d},\n" % (cp, off, n))
    w("};\n\n")

    w("static const char32_t kDecompPool[] = {\n")
    for i in range(0, len(pool), 8):
        w("  " + ", ".join("0x%X" % c for c in pool[i:i + 8]) + ",\n")
    w("};\n\n")

    w("static const CccEntry kCccTable[] = {\n")
    for cp, k in ccc:
        w("  {0x%X, %d},\n" % (cp, k))
    w("};\n\n")

    w("static const CompPair kCompTable[] = {\n")
    for a, b, c in comp:
        w("  {0x%X, 0x%X, 0x%X},\n" % (a, b, c))
    w("};\n\n")

    w("static const PunctRange kPunctTable[] = {\n")
    for lo, hi in gen_punct_ranges():
        w("  {0x%X, 0x%X},\n" % (lo, hi))
    w("};\n")


if __name__ == "__main__":
    emit(sys.stdout)
