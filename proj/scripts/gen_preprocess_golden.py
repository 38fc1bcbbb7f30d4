#!/usr/bin/env python3
"""Generates tests/data/preprocess_golden.tsv.

Independent second implementation of the full preprocessing pipeline
(character cleaning via unicodedata, the shipped stopword list, and the
reference Porter stemmer), run over a hand-curated raw corpus.  Each output
line is `raw<TAB>space-joined tokens`.  The script refuses raws containing
tabs or newlines and verifies idempotence over the produced outputs.
"""

import pathlib
import sys
import unicodedata

sys.path.insert(0, str(pathlib.Path(__file__).parent))
import porter_ref

ROOT = pathlib.Path(__file__).parent.parent
ASCII_SPACE = set(" \t\n\r\f\v")


def load_stopwords():
    words = set()
    for line in (ROOT / "data/stopwords_en.txt").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return words


def is_letter(ch):
    return unicodedata.category(ch).startswith("L")


def simple_lower(ch):
    low = ch.lower()
    return low if len(low) == 1 else ch  # 1:1 mappings only


def clean(text):
    out = []
    for ch in text:
        if not (is_letter(ch) or ch.isdigit() and ch.isascii() or ch in ASCII_SPACE):
            ch = " "
        ch = simple_lower(ch)
        if ch.isascii() and ch.isdigit():
            ch = " "
        out.append(ch)
    # collapse whitespace
    words = "".join(out).split()
    return " ".join(words)


def pipeline(text, stopwords):
    tokens = clean(text).split()
    tokens = [t for t in tokens if t not in stopwords]
    stems = (porter_ref.stem(t) for t in tokens)
    return [s for s in stems if s]  # a bare "s" stems to the empty string


RAWS = [
    "The cats are Running!!",
    "America's love affair with it's automobile:",
    "Cars. Cars have been around since they became famous in the 1900s.",
    "12345 !!",
    "",
    "   ",
    "a  b",
    "ponies and caresses",
    "They concurred that the flies denied the oscillators.",
    "Conditional RATIONAL hesitancy;",
    "He was hopping, she was hoping.",
    "falling   failing,filing",
    "GENERALIZATIONS about vietnamization",
    "predication && operators",
    "The electrical engineer's triplicate formative work",
    "hopefulness and happiness",
    "sensitivity > sensibility?",
    "a replacement adjustment for the dependent",
    "adoption of communism was effective",
    "Don't stop believing",
    "e-mail me at test@example.com or call 555-0199 now",
    "weird spacing and   gaps",
    "naïve café déjà vu",
    "ÅNGSTRÖM units",
    "Ζεύς and Ωμέγα",
    "русский ТЕКСТ здесь",
    "日本語のテキスト mixed with English words",
    "emoji 🚗 between words",
    "C++ is not C#, nor is it C!",
    "x2 + y2 = z2 (Pythagoras, 3rd century B.C.)",
    "THE QUICK BROWN FOX JUMPS OVER THE LAZY DOG",
    "Itemized: firstly, secondly, thirdly.",
    "probate rate and rating",
    "controlling rolled troubles",
    "she sells seashells by the seashore",
    "An airliner's gyroscopic instruments are adjustable.",
    "Was it a car or a cat I saw?",
    "singing singers sang songs",
    "plastered walls bled paint",
    "motoring through the conflated maze",
    "a feudalism of digitizers",
    "radically different analogies",
    "vile vilely valency",
    "formalities and formalizations",
    "the allowance for inference is irritant-free",
    "hiss hissed hissing fizzled fizzing",
    "tanned skin, tanning salon",
    "sized sizing resize",
    "happy skies in the sky",
    "relational conditions",
    "angularity and homologous effects",
    "bowdlerized texts activate adjustable instincts",
    "good goodness goods",
    "quick-thinking, well-meaning folks",
    "  leading and trailing whitespace   ",
    "word",
]


def main():
    stopwords = load_stopwords()
    lines = []
    for raw in RAWS:
        if "\t" in raw or "\n" in raw:
            raise SystemExit(f"raw contains tab/newline: {raw!r}")
        tokens = pipeline(raw, stopwords)
        # Idempotence check: the pipeline over its own re-joined output must
        # reproduce the token list (keeps the golden corpus self-consistent).
        again = pipeline(" ".join(tokens), stopwords)
        if again != tokens:
            raise SystemExit(f"not idempotent for {raw!r}: {tokens} -> {again}")
        lines.append(raw + "\t" + " ".join(tokens))
    out = ROOT / "tests/data/preprocess_golden.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} with {len(lines)} pairs")


if __name__ == "__main__":
    main()
