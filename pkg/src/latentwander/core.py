"""Domain types shared by the whole engine: clips, emotions, embeddings, stats.

All types are immutable after construction and safe to share across threads.
Clip ids are opaque non-empty strings; their lexicographic order is the
engine-wide deterministic tie-break.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyDataset, ParseError

SCORE_SUM_TOL = 1e-6
NORM_TOL = 1e-6


class Emotion(str, Enum):
    """The six basic emotion categories used throughout the engine.

    Declaration order is the canonical order: ties in score comparisons are
    always broken by the earlier member.
    """

    HAPPINESS = "happiness"
    SADNESS = "sadness"
    ANGER = "anger"
    DISGUST = "disgust"
    SURPRISE = "surprise"
    FEAR = "fear"


EMOTION_ORDER: tuple[Emotion, ...] = tuple(Emotion)


@dataclass(frozen=True)
class EmotionScores:
    """Probability over the six emotions; must sum to 1 within 1e-6."""

    happiness: float
    sadness: float
    anger: float
    disgust: float
    surprise: float
    fear: float

    def __post_init__(self):
        from .errors import InvalidScores

        total = 0.0
        for emotion in EMOTION_ORDER:
            value = getattr(self, emotion.value)
            if not (0.0 <= value <= 1.0):
                raise InvalidScores(f"{emotion.value} score {value} outside [0, 1]")
            total += value
        if abs(total - 1.0) > SCORE_SUM_TOL:
            raise InvalidScores(f"scores sum to {total}, expected 1.0")

    def __getitem__(self, emotion: Emotion) -> float:
        return getattr(self, emotion.value)

    def ranked(self) -> list[Emotion]:
        """Emotions from highest to lowest score, ties broken by canonical order."""
        order = {e: i for i, e in enumerate(EMOTION_ORDER)}
        return sorted(EMOTION_ORDER, key=lambda e: (-self[e], order[e]))

    def as_dict(self) -> dict[str, float]:
        return {e.value: self[e] for e in EMOTION_ORDER}


@dataclass(frozen=True)
class ClipRecord:
    """One segmented video clip with its captions and (optional) emotion tag."""

    id: str
    video_id: str
    start_s: float
    end_s: float
    naive_captions: tuple[str, ...] = ()
    emotional_captions: tuple[str, ...] = ()
    emotion: Emotion | None = None
    media_url: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("clip id must be a non-empty string")
        if self.start_s < 0:
            raise ValueError(f"start_s must be >= 0, got {self.start_s}")
        if self.end_s <= self.start_s:
            raise ValueError(f"end_s ({self.end_s}) must exceed start_s ({self.start_s})")
        object.__setattr__(self, "naive_captions", tuple(self.naive_captions))
        object.__setattr__(self, "emotional_captions", tuple(self.emotional_captions))
        for caption in (*self.naive_captions, *self.emotional_captions):
            if not caption:
                raise ValueError(f"clip {self.id}: captions must be non-empty")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    def captions(self, kind: str) -> tuple[str, ...]:
        if kind == "naive":
            return self.naive_captions
        if kind == "emotional":
            return self.emotional_captions
        raise ValueError(f"unknown caption kind {kind!r}")

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "video_id": self.video_id,
            "start_s": self.start_s,
            "end_s": self.end_s,
            "naive_captions": list(self.naive_captions),
            "emotional_captions": list(self.emotional_captions),
            "emotion": self.emotion.value if self.emotion else None,
            "media_url": self.media_url,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ClipRecord":
        return cls(
            id=data["id"],
            video_id=data["video_id"],
            start_s=float(data["start_s"]),
            end_s=float(data["end_s"]),
            naive_captions=tuple(data.get("naive_captions") or ()),
            emotional_captions=tuple(data.get("emotional_captions") or ()),
            emotion=Emotion(data["emotion"]) if data.get("emotion") else None,
            media_url=data.get("media_url"),
        )


@dataclass(frozen=True)
class Embedding:
    """A vector housing one clip or query in the joint latent space."""

    id: str
    values: np.ndarray = field(repr=False)
    normalized: bool = True

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 1:
            raise ValueError("embedding values must be a 1-D vector")
        object.__setattr__(self, "values", values)
        values.setflags(write=False)
        if self.normalized:
            norm = float(np.linalg.norm(values.astype(np.float64)))
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"embedding {self.id!r} flagged normalized but |v| = {norm}")

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return (
            self.id == other.id
            and self.normalized == other.normalized
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class DatasetStats:
    """Aggregate caption/duration statistics over a clip collection."""

    captions_per_video: float
    words_per_caption: float
    avg_duration_s: float
    clip_count: int
    total_runtime_s: float

    def as_dict(self) -> dict:
        return {
            "captions_per_video": self.captions_per_video,
            "words_per_caption": self.words_per_caption,
            "avg_duration_s": self.avg_duration_s,
            "clip_count": self.clip_count,
            "total_runtime_s": self.total_runtime_s,
        }


def compute_stats(clips: Sequence[ClipRecord], caption_kind: str = "naive") -> DatasetStats:
    """Compute dataset statistics over the given caption kind.

    ``captions_per_video`` divides by the number of distinct video ids, and
    word counts split on Unicode whitespace (punctuation stays attached).
    Raises EmptyDataset on an empty clip list.
    """
    if not clips:
        raise EmptyDataset("cannot compute statistics over zero clips")
    captions = [c for clip in clips for c in clip.captions(caption_kind)]
    videos = {clip.video_id for clip in clips}
    total_words = sum(len(c.split()) for c in captions)
    total_runtime = sum(clip.duration_s for clip in clips)
    return DatasetStats(
        captions_per_video=len(captions) / len(videos),
        words_per_caption=total_words / len(captions) if captions else 0.0,
        avg_duration_s=total_runtime / len(clips),
        clip_count=len(clips),
        total_runtime_s=total_runtime,
    )


def save_clips(clips: Iterable[ClipRecord], path: str | Path) -> None:
    """Write clips as UTF-8 JSON lines (one record per line, LF endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for clip in clips:
            fh.write(json.dumps(clip.to_json_dict(), ensure_ascii=False))
            fh.write("\n")


def load_clips(path: str | Path) -> list[ClipRecord]:
    """Read a JSON-lines clip file; raises ParseError with the failing line."""
    clips = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                clips.append(ClipRecord.from_json_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad clip record: {exc}", line=lineno) from exc
    return clips


def is_finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)
