#!/usr/bin/env python3
"""Convert public tokenizer dumps to the toolkit model format.

Supported inputs:
  wordpiece:  a vocab.txt (one token per line, id = line number), the layout
              used by BERT-family checkpoints.
  byte_bpe:   a vocab.json (token -> id) plus a merges.txt (one "left right"
              pair per line, optional "#version" header), the GPT-2-style
              layout. Token strings must already be in remapped printable
              form, which is how these files store them.

Conversion fidelity is the caller's responsibility: pretokenization details
of the source model are not carried over.

Examples:
  python3 tools/convert_hf_vocab.py wordpiece vocab.txt mbert.json \
      --unk "[UNK]" --specials "[CLS]" "[SEP]" "[PAD]" "[MASK]"
  python3 tools/convert_hf_vocab.py byte_bpe vocab.json merges.txt gpt2.json
"""

import argparse
import json
import sys


def convert_wordpiece(args):
    vocab = {}
    with open(args.inputs[0], encoding="utf-8") as f:
        for i, line in enumerate(f):
            token = line.rstrip("\n")
            if token:
                vocab[token] = i
    return {
        "kind": "wordpiece",
        "vocab": vocab,
        "unk_token": args.unk,
        "continuation_prefix": args.prefix,
        "specials": [s for s in args.specials if s in vocab],
        "lowercase": args.lowercase,
        "split_punctuation": not args.no_split_punct,
    }


def convert_byte_bpe(args):
    if len(args.inputs) != 2:
        sys.exit("byte_bpe needs vocab.json and merges.txt")
    with open(args.inputs[0], encoding="utf-8") as f:
        vocab = json.load(f)
    merges = []
    with open(args.inputs[1], encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                sys.exit(f"bad merge line: {line!r}")
            merges.append(parts)
    return {
        "kind": "byte_bpe",
        "vocab": vocab,
        "merges": merges,
        "specials": [s for s in args.specials if s in vocab],
        "lowercase": args.lowercase,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("kind", choices=["wordpiece", "byte_bpe"])
    ap.add_argument("inputs", nargs="+", help="input file(s) then the output path")
    ap.add_argument("--unk", default="[UNK]")
    ap.add_argument("--prefix", default="##")
    ap.add_argument("--specials", nargs="*", default=[])
    ap.add_argument("--lowercase", action="store_true")
    ap.add_argument("--no-split-punct", action="store_true",
                    help="wordpiece: keep punctuation attached to words")
    args = ap.parse_args()

    out_path = args.inputs.pop()
    model = convert_wordpiece(args) if args.kind == "wordpiece" else convert_byte_bpe(args)
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(model, f, ensure_ascii=False)
        f.write("\n")
    print(f"wrote {out_path}: {len(model['vocab'])} vocabulary entries")


if __name__ == "__main__":
    main()
