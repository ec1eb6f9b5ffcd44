#!/usr/bin/env python3
# Copyright 2026-present the anpr project
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerate assets/atlas/*.pbm.

Each of the 36 real symbols is drawn on a 7x12 cell grid and scaled by 2
to a 14x24 bitmap. Strokes are one cell wide and enclosed counters keep
at least two cells of clearance, so a single 3x3 dilation (the bold
augmentation, and the recognition pipeline's own dilation) cannot close
them. Easily-confused pairs get deliberate tells: 0 is slashed, 1 has a
flag and a base, I has serifs, B has a flat spine while 8 is waisted,
5 has square corners while S is rounded, Z is straight-diagonal while 2
is bowed.

The two out-of-alphabet probes are drawn at pixel resolution:
SPECIAL_A is a scatter of isolated dots (almost no ink), SPECIAL_B a
cross-hatched diamond emblem (plenty of ink, letter-like nowhere).
"""

import argparse
import os

CELL_W, CELL_H = 7, 12
SCALE = 2

GLYPHS = {
    "0": [
        ".#####.",
        "#.....#",
        "#.....#",
        "#....##",
        "#...#.#",
        "#..#..#",
        "#.#...#",
        "##....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#####.",
    ],
    "1": [
        "...#...",
        "..##...",
        ".#.#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        ".#####.",
    ],
    "2": [
        ".####..",
        "#....#.",
        ".....#.",
        ".....#.",
        "....#..",
        "...#...",
        "..#....",
        ".#.....",
        "#......",
        "#......",
        "#......",
        "######.",
    ],
    "3": [
        ".####..",
        "#....#.",
        ".....#.",
        ".....#.",
        "..###..",
        ".....#.",
        "......#",
        "......#",
        "......#",
        "......#",
        "#....#.",
        ".####..",
    ],
    "4": [
        "#...#..",
        "#...#..",
        "#...#..",
        "#...#..",
        "#...#..",
        "######.",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
    ],
    "5": [
        "######.",
        "#......",
        "#......",
        "#......",
        "#......",
        "#####..",
        ".....#.",
        "......#",
        "......#",
        "......#",
        "#....#.",
        ".####..",
    ],
    "6": [
        "..####.",
        ".#.....",
        "#......",
        "#......",
        "#......",
        "######.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#####.",
    ],
    "7": [
        "######.",
        ".....#.",
        "....#..",
        "....#..",
        "...#...",
        "...#...",
        "..#....",
        "..#....",
        "..#....",
        ".#.....",
        ".#.....",
        ".#.....",
    ],
    "8": [
        ".#####.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#####.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#####.",
    ],
    "9": [
        ".#####.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".######",
        "......#",
        "......#",
        "......#",
        "......#",
        ".....#.",
        ".####..",
    ],
    "A": [
        "..###..",
        ".#...#.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#######",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
    ],
    "B": [
        "#####..",
        "#....#.",
        "#.....#",
        "#.....#",
        "#....#.",
        "#####..",
        "#....#.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#....#.",
        "#####..",
    ],
    "C": [
        ".#####.",
        "#.....#",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#.....#",
        ".#####.",
    ],
    "D": [
        "#####..",
        "#....#.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#....#.",
        "#####..",
    ],
    "E": [
        "######.",
        "#......",
        "#......",
        "#......",
        "#......",
        "#####..",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "######.",
    ],
    "F": [
        "######.",
        "#......",
        "#......",
        "#......",
        "#......",
        "#####..",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
    ],
    "G": [
        ".#####.",
        "#.....#",
        "#......",
        "#......",
        "#......",
        "#......",
        "#...###",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#####.",
    ],
    "H": [
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#######",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
    ],
    "I": [
        ".#####.",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        ".#####.",
    ],
    "J": [
        ".#####.",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "....#..",
        "#...#..",
        ".###...",
    ],
    "K": [
        "#...#..",
        "#..#...",
        "#..#...",
        "#.#....",
        "#.#....",
        "##.....",
        "#.#....",
        "#.#....",
        "#..#...",
        "#..#...",
        "#...#..",
        "#....#.",
    ],
    "L": [
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "######.",
    ],
    "M": [
        "#.....#",
        "##...##",
        "#.#.#.#",
        "#..#..#",
        "#..#..#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
    ],
    "N": [
        "#.....#",
        "##....#",
        "##....#",
        "#.#...#",
        "#.#...#",
        "#..#..#",
        "#..#..#",
        "#...#.#",
        "#...#.#",
        "#....##",
        "#....##",
        "#.....#",
    ],
    "O": [
        ".#####.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#####.",
    ],
    "P": [
        "#####..",
        "#....#.",
        "#.....#",
        "#.....#",
        "#....#.",
        "#####..",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
        "#......",
    ],
    "Q": [
        ".#####.",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#..#..#",
        "#...#.#",
        "#....##",
        ".#####.",
    ],
    "R": [
        "#####..",
        "#....#.",
        "#.....#",
        "#.....#",
        "#....#.",
        "#####..",
        "#.#....",
        "#..#...",
        "#..#...",
        "#...#..",
        "#....#.",
        "#....#.",
    ],
    "S": [
        ".####..",
        "#....#.",
        "#......",
        "#......",
        ".#.....",
        "..###..",
        ".....#.",
        "......#",
        "......#",
        "......#",
        "#....#.",
        ".####..",
    ],
    "T": [
        "#######",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
    ],
    "U": [
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#####.",
    ],
    "V": [
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        ".#...#.",
        ".#...#.",
        ".#...#.",
        "..#.#..",
        "..#.#..",
        "..#.#..",
        "...#...",
        "...#...",
    ],
    "W": [
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#.....#",
        "#..#..#",
        "#..#..#",
        "#.#.#.#",
        "##...##",
        "#.....#",
    ],
    "X": [
        "#.....#",
        ".#...#.",
        ".#...#.",
        "..#.#..",
        "..#.#..",
        "...#...",
        "...#...",
        "..#.#..",
        "..#.#..",
        ".#...#.",
        ".#...#.",
        "#.....#",
    ],
    "Y": [
        "#.....#",
        ".#...#.",
        ".#...#.",
        "..#.#..",
        "..#.#..",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
        "...#...",
    ],
    "Z": [
        "######.",
        ".....#.",
        "....#..",
        "....#..",
        "...#...",
        "...#...",
        "..#....",
        "..#....",
        ".#.....",
        ".#.....",
        "#......",
        "######.",
    ],
}

# Isolated single pixels, pairwise Chebyshev distance >= 5 so even the
# bold augmentation keeps them as separate 3x3 specks. (row, col) in the
# native 14x24 frame.
SPECIAL_A_DOTS = [
    (1, 1),
    (3, 9),
    (7, 4),
    (11, 12),
    (13, 0),
    (16, 7),
    (21, 2),
    (22, 12),
]


def render_real(cells):
    assert len(cells) == CELL_H and all(len(r) == CELL_W for r in cells)
    w, h = CELL_W * SCALE, CELL_H * SCALE
    px = [[0] * w for _ in range(h)]
    for cy, row in enumerate(cells):
        for cx, c in enumerate(row):
            if c == "#":
                for dy in range(SCALE):
                    for dx in range(SCALE):
                        px[cy * SCALE + dy][cx * SCALE + dx] = 1
    return px


def render_special_a():
    w, h = CELL_W * SCALE, CELL_H * SCALE
    px = [[0] * w for _ in range(h)]
    for r, c in SPECIAL_A_DOTS:
        px[r][c] = 1
    return px


def render_special_b():
    """Diamond outline plus a diagonal cross-hatch. Hatch period 6 with
    2px strokes leaves 4px voids, which one dilation narrows but never
    closes."""
    w, h = CELL_W * SCALE, CELL_H * SCALE
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    px = [[0] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            d = abs(x - cx) / (w / 2.0) + abs(y - cy) / (h / 2.0)
            if d > 1.0:
                continue
            on_outline = d > 0.82
            on_hatch = (x + y) % 6 < 2 or (x - y) % 6 < 2
            if on_outline or on_hatch:
                px[y][x] = 1
    return px


def write_pbm(path, px):
    h, w = len(px), len(px[0])
    lines = ["P1", f"{w} {h}"]
    lines += ["".join(str(v) for v in row) for row in px]
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="assets/atlas", help="output directory")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for sym, cells in sorted(GLYPHS.items()):
        write_pbm(os.path.join(args.out, sym + ".pbm"), render_real(cells))
    write_pbm(os.path.join(args.out, "SPECIAL_A.pbm"), render_special_a())
    write_pbm(os.path.join(args.out, "SPECIAL_B.pbm"), render_special_b())
    print(f"wrote {len(GLYPHS) + 2} bitmaps under {args.out}")


if __name__ == "__main__":
    main()
