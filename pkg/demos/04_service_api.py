#!/usr/bin/env python3
"""Assemble the full service in-process and walk its HTTP contract.

For a real deployment run the CLI instead:
    latentwander synth --out ds && latentwander build-index --dataset ds \
      && latentwander project --dataset ds \
      && latentwander build-map --points ds/points.csv --out ds/map.json \
      && latentwander serve --dataset ds
"""

import json

from fastapi.testclient import TestClient

from latentwander import (
    EncoderConfig,
    ProjectionConfig,
    SynthConfig,
    build_grid_map,
    build_index,
    compute_stats,
    generate_synthetic_dataset,
    project_pca,
)
from latentwander.service import AppState, create_app

ENC = EncoderConfig(dimension=128, mode="emotional", hash_seed=4)


def main():
    data = generate_synthetic_dataset(SynthConfig(clip_count=300, rng_seed=5), ENC)
    index = build_index(data.embeddings, {c.id: c.emotion for c in data.clips})
    points = project_pca(data.embeddings)
    grid = build_grid_map(points, ProjectionConfig(cell_count=20))

    state = AppState(
        clips={c.id: c for c in data.clips},
        stats={kind: compute_stats(data.clips, kind) for kind in ("naive", "emotional")},
        enc_cfg=ENC,
        index=index,
    )
    state.attach_grid(grid)
    state.attach_points(points)
    client = TestClient(create_app(state))

    print("GET /healthz ->", client.get("/healthz").json())

    doc = client.get("/api/map").json()
    print(f"GET /api/map -> {doc['width']}x{doc['height']}, "
          f"{len(doc['positive_cells'])} positive cells")

    cell = doc["positive_cells"][0]
    payload = client.get(f"/api/grid/{cell['i']}/{cell['j']}").json()
    print(f"GET /api/grid/{cell['i']}/{cell['j']} -> {len(payload['clips'])} clips")

    query = {"text": data.ground_truth[0][0], "strategy": "full", "k": 3}
    out = client.post("/api/query", json=query).json()
    print(f"POST /api/query ({query['strategy']}) -> "
          f"{[r['clip']['id'] for r in out['results']]}, "
          f"comparisons={out['comparisons']}")

    query["strategy"] = "filter"
    out = client.post("/api/query", json=query).json()
    print(f"POST /api/query ({query['strategy']}) -> "
          f"{[r['clip']['id'] for r in out['results']]}, "
          f"comparisons={out['comparisons']}, fallback={out['fallback_used']}")

    stats = client.get("/api/stats").json()
    print("GET /api/stats ->", json.dumps(stats["naive"], indent=None))

    bad = client.post("/api/query", json={"text": ""})
    print(f"POST /api/query with empty text -> {bad.status_code} {bad.json()}")


if __name__ == "__main__":
    main()
