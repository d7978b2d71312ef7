"""Fixed 5x7 bitmap glyph font shared by the corpus renderer and mock OCR.

Each glyph is 7 rows of 5 cells ('#' = ink).  Rendering scales a cell to
``unit`` pixels and advances 6 units per glyph (5 for the glyph, 1 gap).
The font deliberately avoids solid ink regions larger than 2x2 cells so that
adaptive thresholding with an 11-pixel block never hollows a stroke at the
default unit size.
"""

from __future__ import annotations

import numpy as np

GLYPH_ROWS = 7
GLYPH_COLS = 5
ADVANCE = 6  # cells, including the 1-cell gap

_RAW = {
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("###..", "#..#.", "#...#", "#...#", "#...#", "#..#.", "###.."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
    ".": (".....", ".....", ".....", ".....", ".....", "..##.", "..##."),
    "-": (".....", ".....", ".....", ".###.", ".....", ".....", "....."),
    "/": ("....#", "....#", "...#.", "..#..", ".#...", "#....", "#...."),
}


def _to_bitmap(rows: tuple[str, ...]) -> np.ndarray:
    return np.array([[c == "#" for c in row] for row in rows], dtype=bool)


GLYPHS: dict[str, np.ndarray] = {ch: _to_bitmap(rows) for ch, rows in _RAW.items()}
ALPHABET = "".join(sorted(GLYPHS))


def _trim(bitmap: np.ndarray) -> tuple[np.ndarray, int]:
    """Drop blank leading/trailing columns; return (trimmed, left offset)."""
    cols = bitmap.any(axis=0)
    idx = np.nonzero(cols)[0]
    return bitmap[:, idx[0] : idx[-1] + 1], int(idx[0])


# Trimmed glyphs are what segmentation actually sees: ink-bearing columns only.
TRIMMED: dict[str, np.ndarray] = {ch: _trim(bm)[0] for ch, bm in GLYPHS.items()}


def text_width_cells(text: str) -> int:
    """Width of the rendered text in cells (no trailing gap)."""
    if not text:
        return 0
    return len(text) * ADVANCE - 1


def render_text_mask(text: str, unit: int) -> np.ndarray:
    """Render text to a boolean ink mask of shape (7*unit, width*unit)."""
    for ch in text:
        if ch != " " and ch not in GLYPHS:
            raise KeyError(f"glyph font has no character {ch!r}")
    width = text_width_cells(text)
    mask = np.zeros((GLYPH_ROWS * unit, max(1, width * unit)), dtype=bool)
    for i, ch in enumerate(text):
        if ch == " ":
            continue
        bm = GLYPHS[ch]
        x0 = i * ADVANCE * unit
        cell = np.kron(bm, np.ones((unit, unit), dtype=bool))
        mask[:, x0 : x0 + GLYPH_COLS * unit] = cell
    return mask


def stamp_text(arr: np.ndarray, x: int, y: int, text: str, unit: int, color=(0, 0, 0)) -> None:
    """Stamp text ink onto an HxWx3 uint8 array in place, top-left at (x, y)."""
    mask = render_text_mask(text, unit)
    h, w = mask.shape
    region = arr[y : y + h, x : x + w]
    region[mask[: region.shape[0], : region.shape[1]]] = color
