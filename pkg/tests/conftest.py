import numpy as np
import pytest

from latentwander.core import ClipRecord, Emotion


def build_stats_fixture() -> list[ClipRecord]:
    """500 clips engineered to average 13.11 naive captions per video,
    exactly 9.60 words per caption, and 26.01 s duration.

    6555 captions over 500 videos = 13.11; 62928 words over 6555 captions
    = 9.60 (3933 ten-word + 2622 nine-word captions); every clip runs
    26.01 s.
    """
    caption_counts = [14] * 55 + [13] * 445  # sums to 6555
    word_counts = [10] * 3933 + [9] * 2622  # sums to 62928
    assert sum(caption_counts) == 6555 and sum(word_counts) == 62928
    word_iter = iter(word_counts)
    clips = []
    for v, count in enumerate(caption_counts):
        captions = tuple(
            " ".join(f"w{v}x{c}x{w}" for w in range(next(word_iter))) for c in range(count)
        )
        clips.append(
            ClipRecord(
                id=f"clip{v:04d}",
                video_id=f"video{v:04d}",
                start_s=0.0,
                end_s=26.01,
                naive_captions=captions,
                emotional_captions=("placeholder caption",),
                emotion=Emotion.HAPPINESS,
            )
        )
    return clips


@pytest.fixture
def stats_fixture_clips() -> list[ClipRecord]:
    return build_stats_fixture()


def reference_top_k(entries, query, k, emotion_filter=None):
    """Brute-force ranking oracle: python-loop dot products, full sort."""
    query = np.asarray(query, dtype=np.float64).ravel()
    scored = []
    for clip_id, vector, emotion in entries:
        if emotion_filter is not None and emotion != emotion_filter:
            continue
        score = float(np.dot(np.asarray(vector, dtype=np.float64).ravel(), query))
        scored.append((clip_id, min(1.0, max(-1.0, score))))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def reference_merge(boundaries, minimum):
    """Group shots greedily until each group's total duration reaches the
    minimum; a short trailing group joins the previous one."""
    shots = list(zip(boundaries, boundaries[1:]))
    groups, current, total = [], [], 0.0
    for shot in shots:
        current.append(shot)
        total += shot[1] - shot[0]
        if total >= minimum:
            groups.append(current)
            current, total = [], 0.0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    return [(group[0][0], group[-1][1]) for group in groups]


def reference_rebalance(scores_by_emotion):
    """Direct transcription of the three re-assignment rules."""
    order = list(Emotion)
    ranked = sorted(
        scores_by_emotion.items(), key=lambda kv: (-kv[1], order.index(kv[0]))
    )
    top, second = ranked[0][0], ranked[1][0]
    if top != Emotion.HAPPINESS:
        return top
    if second == Emotion.SADNESS:
        return Emotion.HAPPINESS
    return second


def reference_bins(points, grid):
    """Independently re-bin points into the grid's geometry."""
    import math

    cells = {}
    for p in points:
        i = min(int(math.floor((p.x - grid.origin_x) / grid.cell_size)), grid.width - 1)
        j = min(int(math.floor((p.y - grid.origin_y) / grid.cell_size)), grid.height - 1)
        cells.setdefault((i, j), []).append(p.clip_id)
    return {cell: tuple(sorted(ids)) for cell, ids in cells.items()}
