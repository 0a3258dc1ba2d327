"""Deterministic preprocessing: shot merging, emotion re-balancing, caption
augmentation, and the inverse suffix extraction used by the filter strategy.

Everything here is a pure function of its arguments (including seeds), so
callers may parallelize over clips freely.
"""

from __future__ import annotations

import random
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .core import EMOTION_ORDER, Emotion, EmotionScores, is_finite
from .errors import (
    EmptyDataset,
    InvalidBoundaries,
    InvalidConfig,
    MissingSuffixes,
    NoEmotionFound,
    ParseError,
)

TERMINAL_MARKS = ".!?"


@dataclass(frozen=True)
class ShotBoundaryList:
    """Shot cut timestamps for one video, as produced by an external detector."""

    video_id: str
    boundaries: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(float(b) for b in self.boundaries))
        if len(self.boundaries) < 2:
            raise InvalidBoundaries(
                f"video {self.video_id!r}: need at least 2 boundaries, got {len(self.boundaries)}"
            )
        if not is_finite(*self.boundaries):
            raise InvalidBoundaries(f"video {self.video_id!r}: non-finite boundary")
        for a, b in zip(self.boundaries, self.boundaries[1:]):
            if b <= a:
                raise InvalidBoundaries(
                    f"video {self.video_id!r}: boundaries must be strictly increasing"
                )


@dataclass(frozen=True)
class SegmentationConfig:
    min_clip_duration_s: float = 12.0

    def __post_init__(self):
        if self.min_clip_duration_s <= 0:
            raise InvalidConfig("min_clip_duration_s must be positive")


def merge_short_shots(
    shots: ShotBoundaryList, cfg: SegmentationConfig = SegmentationConfig()
) -> list[tuple[float, float]]:
    """Merge consecutive shots until each emitted clip meets the minimum duration.

    Scans left to right accumulating shots; a clip is emitted as soon as the
    accumulated duration reaches ``min_clip_duration_s``. A trailing
    accumulation shorter than the minimum is folded into the previously
    emitted clip, or emitted alone if it is the only one. The output
    partitions [first, last] exactly.
    """
    boundaries = shots.boundaries
    minimum = cfg.min_clip_duration_s
    clips: list[tuple[float, float]] = []
    start = boundaries[0]
    for cut in boundaries[1:]:
        if cut - start >= minimum:
            clips.append((start, cut))
            start = cut
    if start < boundaries[-1]:
        # trailing remainder: shorter than the minimum by construction
        if clips:
            head, _ = clips.pop()
            clips.append((head, boundaries[-1]))
        else:
            clips.append((start, boundaries[-1]))
    return clips


def rebalance_emotion(scores: EmotionScores) -> Emotion:
    """Re-assign a clip's emotion, compensating for the happiness bias.

    The highest-probability emotion wins unless it is happiness, in which
    case happiness is kept only when sadness is the runner-up; otherwise the
    runner-up wins. Ties are broken by the canonical emotion order.
    """
    ranked = scores.ranked()
    top, second = ranked[0], ranked[1]
    if top is not Emotion.HAPPINESS:
        return top
    if second is Emotion.SADNESS:
        return Emotion.HAPPINESS
    return second


@dataclass(frozen=True)
class RebalanceReport:
    labels: dict[str, Emotion]
    before_happiness_share: float
    after_happiness_share: float


def rebalance_batch(
    scored_clips: Sequence[tuple[str, EmotionScores]],
) -> RebalanceReport:
    """Apply rebalance_emotion per clip and report the happiness share shift."""
    if not scored_clips:
        raise EmptyDataset("cannot rebalance an empty batch")
    labels: dict[str, Emotion] = {}
    raw_happy = 0
    rebalanced_happy = 0
    for clip_id, scores in scored_clips:
        if scores.ranked()[0] is Emotion.HAPPINESS:
            raw_happy += 1
        label = rebalance_emotion(scores)
        labels[clip_id] = label
        if label is Emotion.HAPPINESS:
            rebalanced_happy += 1
    n = len(scored_clips)
    return RebalanceReport(labels, raw_happy / n, rebalanced_happy / n)


@dataclass(frozen=True)
class SuffixLexicon:
    """Emotion-keyed suffix phrases used to augment captions and parse queries."""

    by_emotion: Mapping[Emotion, tuple[str, ...]]

    def __post_init__(self):
        cleaned = {}
        for emotion in EMOTION_ORDER:
            entries = tuple(self.by_emotion.get(emotion, ()))
            if not entries:
                raise MissingSuffixes(f"no suffixes for {emotion.value}")
            if any(not s or s != s.strip() for s in entries):
                raise MissingSuffixes(f"blank or unstripped suffix under {emotion.value}")
            cleaned[emotion] = entries
        object.__setattr__(self, "by_emotion", cleaned)

    def suffixes(self, emotion: Emotion) -> tuple[str, ...]:
        return self.by_emotion[emotion]

    def entries(self) -> list[tuple[Emotion, str]]:
        return [(e, s) for e in EMOTION_ORDER for s in self.by_emotion[e]]


DEFAULT_LEXICON = SuffixLexicon(
    {
        Emotion.ANGER: (
            "in anger",
            "with anger",
            "angrily",
            "in annoyance",
            "with annoyance",
            "with hate",
            "in disapproval",
        ),
        Emotion.DISGUST: ("in disgust", "with disgust", "disgustedly"),
        Emotion.HAPPINESS: (
            "with joy",
            "joyously",
            "joyfully",
            "in amusement",
            "with amusement",
            "with excitement",
            "in excitement",
            "excitedly",
            "with relief",
            "with happiness",
            "happily",
            "with enthusiasm",
            "enthusiastically",
        ),
        Emotion.SADNESS: (
            "with sadness",
            "sadly",
            "in disappointment",
            "disappointedly",
            "with grief",
            "in grief",
            "pessimistically",
        ),
        Emotion.FEAR: (
            "in fear",
            "with fear",
            "out of fear",
            "fearfully",
            "from nervousness",
            "out of nervousness",
            "nervously",
            "with worry",
            "worriedly",
            "confusedly",
        ),
        Emotion.SURPRISE: (
            "in surprise",
            "with surprise",
            "surprisedly",
            "with curiosity",
            "curiously",
        ),
    }
)


def augment_caption(
    caption: str,
    emotion: Emotion,
    lexicon: SuffixLexicon = DEFAULT_LEXICON,
    seed: int = 0,
) -> str:
    """Append one seed-selected suffix for the emotion to the caption.

    If the caption ends with a terminal mark the suffix slips in before it
    (", <suffix>."), otherwise it is appended after a space. The suffix
    choice depends only on (seed, lexicon entry count), so the same seed
    reproduces the same augmentation.
    """
    if not caption:
        raise ValueError("caption must be non-empty")
    suffixes = lexicon.suffixes(emotion)
    suffix = suffixes[random.Random(seed).randrange(len(suffixes))]
    if caption[-1] in TERMINAL_MARKS:
        return f"{caption[:-1]}, {suffix}{caption[-1]}"
    return f"{caption} {suffix}"


def strip_emotion_suffix(
    query: str, lexicon: SuffixLexicon = DEFAULT_LEXICON
) -> tuple[str, Emotion]:
    """Split an emotional query into (plain query, emotion).

    Matches the longest lexicon suffix occurring as a trailing phrase,
    case-insensitively, ignoring trailing punctuation and an optional comma
    before the phrase. Raises NoEmotionFound when nothing matches (or when
    the query is nothing but an emotion phrase).
    """
    if not query:
        raise ValueError("query must be non-empty")
    text = query.rstrip()
    trailing = ""
    while text and text[-1] in TERMINAL_MARKS:
        trailing = text[-1] + trailing
        text = text[:-1]
    text = text.rstrip()
    lowered = text.lower()

    best: tuple[int, Emotion, str] | None = None
    for emotion, suffix in lexicon.entries():
        phrase = suffix.lower()
        if not lowered.endswith(phrase):
            continue
        head = lowered[: -len(phrase)]
        if not head or not head[-1].isspace():
            continue  # require a word boundary before the phrase
        if best is None or len(phrase) > best[0]:
            best = (len(phrase), emotion, phrase)
    if best is None:
        raise NoEmotionFound(f"no emotion phrase at the end of {query!r}")

    length, emotion, _ = best
    head = text[:-length].rstrip()
    if head.endswith(","):
        head = head[:-1].rstrip()
    if not head:
        raise NoEmotionFound(f"query {query!r} is only an emotion phrase")
    return head + trailing, emotion


# --- lexicon file format: emotion header line, then one suffix per line ---

def save_lexicon(lexicon: SuffixLexicon, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, emotion in enumerate(EMOTION_ORDER):
            if i:
                fh.write("\n")
            fh.write(emotion.value + "\n")
            for suffix in lexicon.suffixes(emotion):
                fh.write(suffix + "\n")


def load_lexicon(path: str | Path) -> SuffixLexicon:
    names = {e.value: e for e in EMOTION_ORDER}
    by_emotion: dict[Emotion, list[str]] = {}
    current: Emotion | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.lower() in names:
                current = names[line.lower()]
                by_emotion.setdefault(current, [])
            elif current is None:
                raise ParseError(f"suffix {line!r} before any emotion header", line=lineno)
            else:
                by_emotion[current].append(line)
    return SuffixLexicon({e: tuple(v) for e, v in by_emotion.items()})


# --- shot boundary file: video_id then ascending boundary seconds per line ---

def save_shot_boundaries(shot_lists: Iterable[ShotBoundaryList], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for shots in shot_lists:
            fh.write(shots.video_id + " " + " ".join(f"{b:g}" for b in shots.boundaries))
            fh.write("\n")


def load_shot_boundaries(path: str | Path) -> list[ShotBoundaryList]:
    shot_lists = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ParseError("expected: video_id followed by >= 2 boundaries", line=lineno)
            try:
                boundaries = tuple(float(p) for p in parts[1:])
            except ValueError as exc:
                raise ParseError(f"bad boundary value: {exc}", line=lineno) from exc
            try:
                shot_lists.append(ShotBoundaryList(parts[0], boundaries))
            except InvalidBoundaries as exc:
                raise ParseError(str(exc), line=lineno) from exc
    return shot_lists


# --- paraphrase hook: pluggable caption -> [paraphrases] expansion ---

ParaphraseHook = Callable[[str], list[str]]


def paraphrase_command_hook(command: Sequence[str], timeout_s: float = 30.0) -> ParaphraseHook:
    """Hook that pipes the caption to an external command, one paraphrase per
    output line."""

    def hook(caption: str) -> list[str]:
        proc = subprocess.run(
            list(command),
            input=caption,
            capture_output=True,
            text=True,
            timeout=timeout_s,
            check=True,
        )
        return [line.strip() for line in proc.stdout.splitlines() if line.strip()]

    return hook


def paraphrase_http_hook(url: str, timeout_s: float = 30.0) -> ParaphraseHook:
    """Hook that posts {"caption": ...} and expects {"paraphrases": [...]}."""

    def hook(caption: str) -> list[str]:
        import httpx

        response = httpx.post(url, json={"caption": caption}, timeout=timeout_s)
        response.raise_for_status()
        return [p for p in response.json().get("paraphrases", []) if p]

    return hook


def expand_captions(captions: Sequence[str], hook: ParaphraseHook | None) -> list[str]:
    """Captions plus any hook-returned paraphrases, deduplicated in order."""
    out: list[str] = []
    seen = set()
    for caption in captions:
        for candidate in [caption, *(hook(caption) if hook else [])]:
            if candidate and candidate not in seen:
                seen.add(candidate)
                out.append(candidate)
    return out
