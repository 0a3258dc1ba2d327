#!/usr/bin/env python3
"""Project a synthetic archive to 2D, bin it into the walkable grid map,
and print an ASCII rendering with a short neighbor walk.
"""

from latentwander import (
    EncoderConfig,
    ProjectionConfig,
    SynthConfig,
    build_grid_map,
    generate_synthetic_dataset,
    grid_lookup,
    neighbors,
    project_pca,
)

ENC = EncoderConfig(dimension=64, mode="emotional", hash_seed=2)


def render_ascii(grid, avatar=None):
    for j in reversed(range(grid.height)):
        row = []
        for i in range(grid.width):
            if avatar == (i, j):
                row.append("@")
            elif grid.is_positive(i, j):
                row.append("#")
            else:
                row.append(".")
        print(" ".join(row))


def main():
    data = generate_synthetic_dataset(SynthConfig(clip_count=400, rng_seed=11), ENC)
    points = project_pca(data.embeddings)
    grid = build_grid_map(points, ProjectionConfig(cell_count=24, pad_fraction=0.05))
    positive = len(grid.cells)
    print(
        f"{len(points)} clips -> {grid.width}x{grid.height} map, "
        f"{positive} positive cells ({positive / (grid.width * grid.height):.0%})\n"
    )

    start = max(grid.cells, key=lambda cell: len(grid.cells[cell]))
    render_ascii(grid, avatar=start)

    print(f"\nstanding on {start}: {len(grid_lookup(grid, *start))} clips play around you")
    for cid in grid_lookup(grid, *start)[:4]:
        clip = next(c for c in data.clips if c.id == cid)
        print(f"  {cid}  [{clip.emotion.value:9s}]  {clip.naive_captions[0][:60]}")

    print("\nneighbouring cells (8-connected):")
    for i, j, positive_flag in neighbors(grid, *start):
        marker = "videos here" if positive_flag else "empty"
        print(f"  ({i:2d},{j:2d})  {marker}")


if __name__ == "__main__":
    main()
