#!/usr/bin/env python3
"""Convert a pixels-then-label MNIST CSV (e.g. mlxtend's mnist_5k.csv.gz) to gzipped IDX files."""
import argparse
import csv
import gzip
import struct
from pathlib import Path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", type=Path, help="input CSV, optionally .gz; 784 pixel columns then a label")
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--prefix", default="mnist5k")
    args = ap.parse_args()

    opener = gzip.open if args.csv.suffix == ".gz" else open
    pixels, labels = bytearray(), bytearray()
    with opener(args.csv, "rt") as f:
        for row in csv.reader(f):
            if len(row) != 785:
                raise SystemExit(f"expected 785 columns, got {len(row)}")
            pixels.extend(int(float(v)) for v in row[:784])
            labels.append(int(float(row[784])))
    n = len(labels)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    # mtime=0 keeps the gzip bytes reproducible.
    with gzip.GzipFile(args.out_dir / f"{args.prefix}-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, n, 28, 28) + bytes(pixels))
    with gzip.GzipFile(args.out_dir / f"{args.prefix}-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, n) + bytes(labels))
    print(f"wrote {n} images to {args.out_dir}")


if __name__ == "__main__":
    main()
