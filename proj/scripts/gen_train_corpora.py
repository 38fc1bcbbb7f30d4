#!/usr/bin/env python3
"""Generate the synthetic training corpora committed under tests/data/.

Three corpora, all CSV with header text,generated:
  smoke_corpus.csv    32 docs, two trivially separable word distributions.
  gap_corpus.csv      400 docs, separable with a small shared-word overlap.
  pretrain_corpus.csv 50 docs x 4 sentences for NSP/MLM smoke runs.

Word pools avoid stopwords and CSV metacharacters, so the files never need
quoting and every word survives the cleaning pipeline.
"""

import random

NATURE = [
    "mountain", "river", "forest", "valley", "stone", "meadow", "cloud",
    "breeze", "pebble", "willow", "cedar", "slope", "summit", "boulder",
    "stream", "canyon", "ridge", "alder", "fern", "thicket",
]
TECH = [
    "network", "server", "packet", "router", "buffer", "kernel", "cache",
    "socket", "thread", "daemon", "compiler", "registry", "protocol",
    "firmware", "latency", "queue", "cluster", "binary", "payload", "script",
]
SHARED = ["window", "garden", "table", "corner", "signal", "margin"]


def make_doc(rng, pool, n_lo, n_hi, shared_rate=0.0):
    n = rng.randint(n_lo, n_hi)
    words = []
    for _ in range(n):
        if shared_rate > 0.0 and rng.random() < shared_rate:
            words.append(rng.choice(SHARED))
        else:
            words.append(rng.choice(pool))
    return " ".join(words)


def write_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("text,generated\n")
        for text, label in rows:
            assert "," not in text and '"' not in text and "\n" not in text
            f.write(f"{text},{label}\n")
    print(f"wrote {path}: {len(rows)} rows")


def main():
    rng = random.Random(42)
    rows = []
    for _ in range(16):
        rows.append((make_doc(rng, NATURE, 8, 14), 0))
        rows.append((make_doc(rng, TECH, 8, 14), 1))
    write_csv("tests/data/smoke_corpus.csv", rows)

    rng = random.Random(43)
    rows = []
    for _ in range(200):
        rows.append((make_doc(rng, NATURE, 6, 12, shared_rate=0.10), 0))
        rows.append((make_doc(rng, TECH, 6, 12, shared_rate=0.10), 1))
    write_csv("tests/data/gap_corpus.csv", rows)

    rng = random.Random(44)
    rows = []
    for d in range(50):
        pool = NATURE if d % 2 == 0 else TECH
        sentences = [make_doc(rng, pool, 5, 8) for _ in range(4)]
        text = ". ".join(sentences) + "."
        rows.append((text, d % 2))
    write_csv("tests/data/pretrain_corpus.csv", rows)


if __name__ == "__main__":
    main()
