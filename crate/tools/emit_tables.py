#!/usr/bin/env python3
"""Emit the Rust EMBEDDED table entries from tools/ca_found.json."""

import json
import sys

from ca_search import verify


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "tools/ca_found.json"
    with open(path) as f:
        found = json.load(f)

    def key(item):
        t, k, v = map(int, item[0].split(","))
        return (t, v, k)

    entries = []
    for name, data in sorted(found.items(), key=key):
        t, k, v = map(int, name.split(","))
        rows = data["rows"]
        n = data["N"]
        assert len(rows) == n and verify(rows, t, k, v), f"bad array {name}"
        body = "|".join("".join(str(s) for s in r) for r in rows)
        entries.append(f'    ({t}, {k}, {v}, {n}, "{body}"),')

    print("static EMBEDDED: &[(usize, usize, usize, usize, &str)] = &[")
    print("\n".join(entries))
    print("];")


if __name__ == "__main__":
    main()
