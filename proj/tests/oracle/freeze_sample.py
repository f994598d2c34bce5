"""Freeze reference verdicts for data/reflexive3d_sample.txt.

Usage: python3 freeze_sample.py data/reflexive3d_sample.txt > tests/data/sample_expected.json
"""
import json
import sys

from polytope_oracle import analyse_full


def read_records(path):
    lines = [l.split() for l in open(path) if l.strip() and not l.startswith("#")]
    i = 0
    while i < len(lines):
        r, c = int(lines[i][0]), int(lines[i][1])
        rows = [list(map(int, l)) for l in lines[i + 1:i + 1 + r]]
        i += 1 + r
        yield [tuple(row) for row in rows] if r >= c else [tuple(rows[k][j] for k in range(r)) for j in range(c)]


def main():
    out = []
    for pid, pts in enumerate(read_records(sys.argv[1])):
        out.append(dict(id=pid, **analyse_full(pts)))
    json.dump(out, sys.stdout, indent=1)
    print()


if __name__ == "__main__":
    main()
