#!/usr/bin/env python3
"""Builds data/lexicon.json from a WordNet 3.0 database directory.

Keeps the most frequent single-word lemmas (by summed sense-tag counts) that
are not stopwords and maps each to the single-word lemmas of all its synsets,
in WordNet's sense order.

    python3 tools/build_lexicon.py /path/to/wordnet-3.0 data/lexicon.json
"""

import argparse
import json
import pathlib
import re

POS = ["noun", "verb", "adj", "adv"]
WORD = re.compile(r"^[a-z]+$")


def read_stopwords(path):
    return {line.strip() for line in open(path) if line.strip() and not line.startswith("#")}


def synset_lemmas(data_dir, pos):
    lemmas = {}
    for line in open(data_dir / f"data.{pos}", encoding="latin-1"):
        if line.startswith("  "):
            continue
        fields = line.split()
        offset, count = fields[0], int(fields[3], 16)
        words = [fields[4 + 2 * i].lower() for i in range(count)]
        # Adjective markers such as "(a)" are attached to the lemma.
        words = [re.sub(r"\(.*\)$", "", w) for w in words]
        lemmas[offset] = words
    return lemmas


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("wordnet_dir", type=pathlib.Path)
    parser.add_argument("out", type=pathlib.Path)
    parser.add_argument("--size", type=int, default=2000)
    parser.add_argument("--max-synonyms", type=int, default=10)
    parser.add_argument("--stopwords", type=pathlib.Path,
                        default=pathlib.Path(__file__).parent.parent / "data" / "stopwords_en.txt")
    args = parser.parse_args()

    stopwords = read_stopwords(args.stopwords)
    frequency, synsets = {}, {}
    for pos in POS:
        lemmas = synset_lemmas(args.wordnet_dir, pos)
        for line in open(args.wordnet_dir / f"index.{pos}", encoding="latin-1"):
            if line.startswith("  "):
                continue
            fields = line.split()
            lemma = fields[0]
            if not WORD.match(lemma) or lemma in stopwords or len(lemma) < 3:
                continue
            synset_count, pointer_count = int(fields[2]), int(fields[3])
            tagged = int(fields[5 + pointer_count])
            offsets = fields[6 + pointer_count:6 + pointer_count + synset_count]
            frequency[lemma] = frequency.get(lemma, 0) + tagged
            bucket = synsets.setdefault(lemma, [])
            for offset in offsets:
                for word in lemmas[offset]:
                    if WORD.match(word) and word != lemma and word not in bucket:
                        bucket.append(word)

    ranked = sorted((w for w in synsets if synsets[w]), key=lambda w: (-frequency[w], w))
    lexicon = {w: synsets[w][:args.max_synonyms] for w in sorted(ranked[:args.size])}
    args.out.write_text(json.dumps(lexicon, indent=0, sort_keys=True) + "\n")
    print(f"wrote {len(lexicon)} entries to {args.out}")


if __name__ == "__main__":
    main()
