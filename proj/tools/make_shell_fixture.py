#!/usr/bin/env python3
"""Writes fixtures/shell.mask: 6 < |x|_2 < 10 on a 33^3 grid, spacing 1, origin -16."""
import json
import pathlib
import struct

out = pathlib.Path(__file__).resolve().parent / "fixtures" / "shell.mask"
n = 33
bits = bytearray()
for z in range(n):
    for y in range(n):
        for x in range(n):
            r2 = (x - 16) ** 2 + (y - 16) ** 2 + (z - 16) ** 2
            bits.append(1 if 36 < r2 < 100 else 0)
out.write_bytes(struct.pack("<4I", 3, n, n, n) + bytes(bits))
side = {"dimension": 3, "origin": [-16.0, -16.0, -16.0], "spacing": 1.0, "extents": [n, n, n]}
out.with_name("shell.mask.json").write_text(json.dumps(side, indent=2) + "\n")
