#!/usr/bin/env python3
"""Regenerate the frontend test fixtures by capturing real service payloads.

Run from this directory: python3 generate.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from latentwander.core import EMOTION_ORDER, ClipRecord, Embedding, compute_stats
from latentwander.encoder import EncoderConfig, encode_vector
from latentwander.latentmap import LatentPoint, ProjectionConfig, build_grid_map
from latentwander.retrieval import build_index
from latentwander.service import AppState, create_app

ENC = EncoderConfig(dimension=32, mode="emotional", hash_seed=5)

CAPTIONS = {
    "happiness": ("a child plays in the garden", "a child plays in the garden happily"),
    "sadness": ("an old man sits alone", "an old man sits alone sadly"),
    "anger": ("two drivers argue on the road", "two drivers argue on the road in anger"),
    "disgust": ("a chef inspects rotten fruit", "a chef inspects rotten fruit in disgust"),
    "surprise": ("a man is talking to the camera", "a man is talking to the camera in surprise"),
    "fear": ("a crowd runs from the storm", "a crowd runs from the storm in fear"),
}

POINTS = [
    ("c0", 0.10, 0.10),
    ("c1", 0.15, 0.12),
    ("c2", 3.50, 0.10),
    ("c3", 0.10, 3.50),
    ("c4", 3.50, 3.50),
    ("c5", 1.80, 1.80),
]


def main():
    clips, embeddings = [], []
    for i, emotion in enumerate(EMOTION_ORDER):
        naive, emotional = CAPTIONS[emotion.value]
        clips.append(
            ClipRecord(
                id=f"c{i}",
                video_id=f"v{i}",
                start_s=0.0,
                end_s=20.0 + i,
                naive_captions=(naive,),
                emotional_captions=(emotional,),
                emotion=emotion,
                media_url=f"http://media/c{i}.mp4" if i % 2 == 0 else None,
            )
        )
        embeddings.append(Embedding(id=f"c{i}", values=encode_vector(emotional, ENC)))
    points = [LatentPoint(cid, x, y) for cid, x, y in POINTS]
    grid = build_grid_map(points, ProjectionConfig(cell_size=1.0, pad_fraction=0.0))
    state = AppState(
        clips={c.id: c for c in clips},
        stats={kind: compute_stats(clips, kind) for kind in ("naive", "emotional")},
        enc_cfg=ENC,
        index=build_index(embeddings, {c.id: c.emotion for c in clips}),
    )
    state.attach_grid(grid)
    state.attach_points(points)
    client = TestClient(create_app(state))

    here = Path(__file__).parent
    map_doc = client.get("/api/map").json()
    (here / "map.json").write_text(json.dumps(map_doc, indent=2) + "\n")

    grid_payloads = {
        f"{i},{j}": client.get(f"/api/grid/{i}/{j}").json()
        for i in range(map_doc["width"])
        for j in range(map_doc["height"])
    }
    (here / "grid.json").write_text(json.dumps(grid_payloads, indent=2) + "\n")

    surprise = client.post(
        "/api/query",
        json={"text": "A man is talking to the camera in surprise", "strategy": "filter", "k": 3},
    ).json()
    (here / "query_filter_surprise.json").write_text(json.dumps(surprise, indent=2) + "\n")

    full = client.post(
        "/api/query",
        json={"text": "A man is talking to the camera in surprise", "strategy": "full", "k": 3},
    ).json()
    (here / "query_full.json").write_text(json.dumps(full, indent=2) + "\n")

    print(f"fixtures written to {here}")


if __name__ == "__main__":
    main()
