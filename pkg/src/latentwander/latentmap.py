"""2D projection of clip embeddings and the walkable grid map built from it.

The map is a lattice over the padded bounding box of the projected points;
a cell is positive iff at least one point lands in it. Positive cells carry
their clip ids sorted ascending, and built maps are immutable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import Embedding
from .errors import DegenerateInput, InvalidConfig, InvalidPoint, OutOfBounds, ParseError

DEFAULT_CELL_COUNT = 64


@dataclass(frozen=True)
class LatentPoint:
    clip_id: str
    x: float
    y: float

    def __post_init__(self):
        if not self.clip_id:
            raise InvalidPoint("point must carry a clip id")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidPoint(f"{self.clip_id}: non-finite coordinate ({self.x}, {self.y})")


@dataclass(frozen=True)
class ProjectionConfig:
    """Projection method plus grid sizing. Give cell_size or cell_count, not
    both; with neither, the longer padded edge spans DEFAULT_CELL_COUNT cells."""

    method: str = "pca"  # "pca" or "imported"
    pad_fraction: float = 0.05
    cell_size: float | None = None
    cell_count: int | None = None

    def __post_init__(self):
        if self.method not in ("pca", "imported"):
            raise InvalidConfig(f"method must be 'pca' or 'imported', got {self.method!r}")
        if self.pad_fraction < 0:
            raise InvalidConfig("pad_fraction must be >= 0")
        if self.cell_size is not None and self.cell_count is not None:
            raise InvalidConfig("give cell_size or cell_count, not both")
        if self.cell_size is not None and self.cell_size <= 0:
            raise InvalidConfig("cell_size must be positive")
        if self.cell_count is not None and self.cell_count < 1:
            raise InvalidConfig("cell_count must be >= 1")


@dataclass(frozen=True)
class GridMap:
    origin_x: float
    origin_y: float
    cell_size: float
    width: int
    height: int
    cells: dict[tuple[int, int], tuple[str, ...]]

    def __post_init__(self):
        if self.cell_size <= 0:
            raise InvalidConfig("cell_size must be positive")
        if self.width < 1 or self.height < 1:
            raise InvalidConfig("grid must be at least 1x1")
        for (i, j), clips in self.cells.items():
            if not (0 <= i < self.width and 0 <= j < self.height):
                raise InvalidConfig(f"cell ({i}, {j}) outside {self.width}x{self.height} grid")
            if not clips:
                raise InvalidConfig(f"positive cell ({i}, {j}) has no clips")

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.width and 0 <= j < self.height

    def is_positive(self, i: int, j: int) -> bool:
        return (i, j) in self.cells

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """Cell containing the point; the max edge clamps to the last cell."""
        i = int(math.floor((x - self.origin_x) / self.cell_size))
        j = int(math.floor((y - self.origin_y) / self.cell_size))
        return min(i, self.width - 1), min(j, self.height - 1)

    def to_document(self) -> dict:
        return {
            "origin_x": self.origin_x,
            "origin_y": self.origin_y,
            "cell_size": self.cell_size,
            "width": self.width,
            "height": self.height,
            "positive_cells": [
                {"i": i, "j": j, "clips": list(self.cells[(i, j)])}
                for i, j in sorted(self.cells)
            ],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "GridMap":
        try:
            cells = {
                (int(c["i"]), int(c["j"])): tuple(c["clips"])
                for c in doc["positive_cells"]
            }
            return cls(
                origin_x=float(doc["origin_x"]),
                origin_y=float(doc["origin_y"]),
                cell_size=float(doc["cell_size"]),
                width=int(doc["width"]),
                height=int(doc["height"]),
                cells=cells,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad grid map document: {exc}") from exc

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_document(), fh, ensure_ascii=False, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "GridMap":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_document(json.load(fh))


def project_pca(embeddings: Sequence[Embedding]) -> list[LatentPoint]:
    """Deterministic 2-component PCA projection of the embeddings.

    Sign convention: each component's largest-magnitude entry is positive
    (first such entry on ties), so reruns and input permutations agree.
    Raises DegenerateInput for fewer than 3 points or zero total variance.
    """
    if len(embeddings) < 3:
        raise DegenerateInput(f"need at least 3 embeddings, got {len(embeddings)}")
    matrix = np.stack([e.values.astype(np.float64) for e in embeddings])
    centered = matrix - matrix.mean(axis=0)
    cov = (centered.T @ centered) / (len(embeddings) - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    if eigenvalues.sum() <= 0.0:
        raise DegenerateInput("all points identical (zero total variance)")
    components = eigenvectors[:, [-1, -2]]  # two largest, descending
    for c in range(2):
        pivot = int(np.argmax(np.abs(components[:, c])))
        if components[pivot, c] < 0:
            components[:, c] = -components[:, c]
    projected = centered @ components
    return [
        LatentPoint(emb.id, float(projected[i, 0]), float(projected[i, 1]))
        for i, emb in enumerate(embeddings)
    ]


def build_grid_map(
    points: Sequence[LatentPoint], cfg: ProjectionConfig = ProjectionConfig()
) -> GridMap:
    """Bin points into a lattice over their padded bounding box.

    Each point maps to floor((p - origin) / cell_size), with the max edge
    clamping into the last cell, so every point lands in exactly one cell.
    """
    if not points:
        raise InvalidConfig("cannot build a map from zero points")
    xs = np.asarray([p.x for p in points])
    ys = np.asarray([p.y for p in points])
    min_x, max_x = float(xs.min()), float(xs.max())
    min_y, max_y = float(ys.min()), float(ys.max())
    pad_x = cfg.pad_fraction * (max_x - min_x)
    pad_y = cfg.pad_fraction * (max_y - min_y)
    origin_x, origin_y = min_x - pad_x, min_y - pad_y
    span_x = (max_x - min_x) + 2 * pad_x
    span_y = (max_y - min_y) + 2 * pad_y

    if cfg.cell_size is not None:
        cell_size = cfg.cell_size
    else:
        target = cfg.cell_count if cfg.cell_count is not None else DEFAULT_CELL_COUNT
        longer = max(span_x, span_y)
        cell_size = longer / target if longer > 0 else 1.0

    width = max(1, math.ceil(span_x / cell_size - 1e-9))
    height = max(1, math.ceil(span_y / cell_size - 1e-9))

    binned: dict[tuple[int, int], list[str]] = {}
    for p in points:
        i = min(int(math.floor((p.x - origin_x) / cell_size)), width - 1)
        j = min(int(math.floor((p.y - origin_y) / cell_size)), height - 1)
        binned.setdefault((i, j), []).append(p.clip_id)
    cells = {cell: tuple(sorted(clips)) for cell, clips in binned.items()}
    return GridMap(origin_x, origin_y, cell_size, width, height, cells)


def grid_lookup(grid: GridMap, i: int, j: int) -> list[str]:
    """Clip ids in the cell; empty for negative cells, OutOfBounds otherwise."""
    if not grid.in_bounds(i, j):
        raise OutOfBounds(f"cell ({i}, {j}) outside {grid.width}x{grid.height} grid")
    return list(grid.cells.get((i, j), ()))


def neighbors(
    grid: GridMap, i: int, j: int, connectivity: int = 8
) -> list[tuple[int, int, bool]]:
    """In-bounds adjacent cells as (i, j, positive), sorted by coordinate."""
    if connectivity not in (4, 8):
        raise InvalidConfig(f"connectivity must be 4 or 8, got {connectivity}")
    if not grid.in_bounds(i, j):
        raise OutOfBounds(f"cell ({i}, {j}) outside {grid.width}x{grid.height} grid")
    out = []
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if (di, dj) == (0, 0):
                continue
            if connectivity == 4 and di != 0 and dj != 0:
                continue
            ni, nj = i + di, j + dj
            if grid.in_bounds(ni, nj):
                out.append((ni, nj, grid.is_positive(ni, nj)))
    return sorted(out)


# --- points file: "clip_id,x,y" per line ---

def save_points(points: Iterable[LatentPoint], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in points:
            if "," in p.clip_id:
                raise ValueError(f"points file needs comma-free ids, got {p.clip_id!r}")
            fh.write(f"{p.clip_id},{p.x!r},{p.y!r}\n")


def import_points(path: str | Path) -> list[LatentPoint]:
    """Parse a points file; ParseError names the offending line, InvalidPoint
    flags non-finite coordinates."""
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError("expected: clip_id,x,y", line=lineno)
            try:
                x, y = float(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ParseError(f"bad coordinate: {exc}", line=lineno) from exc
            points.append(LatentPoint(parts[0], x, y))
    return points
