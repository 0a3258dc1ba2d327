"""Exact cosine top-K search over clip embeddings, the two emotion-aware
query strategies, and the R@K evaluation harness.

The index is a flat float32 matrix scanned exactly; entries are stored
sorted by clip id so that a stable sort on descending score yields the
engine-wide deterministic ranking (score desc, then clip id asc).
"""

from __future__ import annotations

import statistics
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import EMOTION_ORDER, Embedding, Emotion
from .encoder import EncoderConfig, encode_vector
from .errors import (
    DimensionMismatch,
    DuplicateId,
    MissingEmotion,
    MissingGroundTruth,
    NoEmotionFound,
    ParseError,
)
from .pipeline import DEFAULT_LEXICON, SuffixLexicon, strip_emotion_suffix

_MAGIC = b"LWIX"
_VERSION = 1
_EMOTION_CODE = {e: i for i, e in enumerate(EMOTION_ORDER)}

# Signature for pluggable query encoders: (text, mode) -> vector.
EncodeFn = Callable[[str, str], np.ndarray]


@dataclass(frozen=True)
class RetrievalResult:
    """Ranked (clip id, cosine score) pairs plus the number of entries scored."""

    ranked: tuple[tuple[str, float], ...]
    comparisons_made: int


@dataclass(frozen=True)
class EvalReport:
    r_at: dict[int, float]
    median_rank: float | None
    query_count: int
    not_found: int


class VectorIndex:
    """Immutable flat index of unit embeddings with emotion tags."""

    def __init__(self, ids: Sequence[str], vectors: np.ndarray, emotions: Sequence[Emotion]):
        self.ids: tuple[str, ...] = tuple(ids)
        self.vectors: np.ndarray = vectors  # (n, D) float32, unit rows, id-sorted
        self.emotions: tuple[Emotion, ...] = tuple(emotions)
        self.vectors.setflags(write=False)
        self._emotion_codes = np.asarray([_EMOTION_CODE[e] for e in self.emotions], dtype=np.uint8)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    @classmethod
    def build(
        cls,
        embeddings: Sequence[Embedding],
        emotions: Mapping[str, Emotion],
        dimension: int | None = None,
    ) -> "VectorIndex":
        """Validate, normalize, and freeze the entries, sorted by clip id.

        Raises DuplicateId for repeated ids, DimensionMismatch for ragged
        dimensions, and MissingEmotion when an embedding has no label.
        """
        if dimension is None:
            dimension = embeddings[0].dimension if embeddings else 0
        seen: set[str] = set()
        entries = []
        for emb in embeddings:
            if emb.id in seen:
                raise DuplicateId(f"clip id {emb.id!r} appears twice")
            seen.add(emb.id)
            if emb.dimension != dimension:
                raise DimensionMismatch(
                    f"{emb.id!r}: dimension {emb.dimension}, index is {dimension}"
                )
            if emb.id not in emotions:
                raise MissingEmotion(f"no emotion label for clip {emb.id!r}")
            entries.append((emb.id, emb.values, emotions[emb.id]))
        entries.sort(key=lambda item: item[0])
        if entries:
            matrix = np.stack([values.astype(np.float64) for _, values, _ in entries])
            norms = np.linalg.norm(matrix, axis=1, keepdims=True)
            if np.any(norms == 0.0):
                bad = entries[int(np.argmin(norms))][0]
                raise DimensionMismatch(f"clip {bad!r} has a zero vector")
            matrix = (matrix / norms).astype(np.float32)
        else:
            matrix = np.zeros((0, dimension), dtype=np.float32)
        return cls(
            [e[0] for e in entries],
            matrix,
            [e[2] for e in entries],
        )

    def top_k(
        self,
        query_vector: np.ndarray,
        k: int,
        emotion_filter: Emotion | None = None,
    ) -> RetrievalResult:
        """Exact cosine top-k; ties broken by ascending clip id."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        query = np.asarray(query_vector, dtype=np.float64).reshape(-1)
        if query.shape[0] != self.dimension:
            raise DimensionMismatch(
                f"query has {query.shape[0]} dims, index has {self.dimension}"
            )
        if emotion_filter is None:
            candidates = np.arange(len(self.ids))
        else:
            candidates = np.flatnonzero(self._emotion_codes == _EMOTION_CODE[emotion_filter])
        if candidates.size == 0:
            return RetrievalResult(ranked=(), comparisons_made=0)
        scores = self.vectors[candidates].astype(np.float64) @ query
        scores = np.clip(scores, -1.0, 1.0)
        # entries are id-sorted, so a stable sort keeps ties in ascending-id order
        order = np.argsort(-scores, kind="stable")[: min(k, candidates.size)]
        ranked = tuple(
            (self.ids[int(candidates[j])], float(scores[j])) for j in order
        )
        return RetrievalResult(ranked=ranked, comparisons_made=int(candidates.size))

    def save(self, path: str | Path) -> None:
        """Persist as LWIX v1; load() restores rankings bit-exactly."""
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(bytes([_VERSION]))
            fh.write(struct.pack("<I", self.dimension))
            fh.write(struct.pack("<Q", len(self.ids)))
            for i, clip_id in enumerate(self.ids):
                encoded = clip_id.encode("utf-8")
                if not encoded or len(encoded) > 0xFFFF:
                    raise ValueError(f"id {clip_id!r} not encodable in 1..65535 bytes")
                fh.write(struct.pack("<H", len(encoded)))
                fh.write(encoded)
                fh.write(bytes([int(self._emotion_codes[i])]))
                fh.write(self.vectors[i].astype("<f4").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        with open(path, "rb") as fh:
            header = fh.read(len(_MAGIC) + 1 + 4 + 8)
            if len(header) < len(_MAGIC) + 13 or header[: len(_MAGIC)] != _MAGIC:
                raise ParseError(f"{path}: not an index file (bad magic)")
            if header[len(_MAGIC)] != _VERSION:
                raise ParseError(f"{path}: unsupported version {header[len(_MAGIC)]}")
            dim = struct.unpack_from("<I", header, len(_MAGIC) + 1)[0]
            count = struct.unpack_from("<Q", header, len(_MAGIC) + 5)[0]
            ids: list[str] = []
            emotions: list[Emotion] = []
            rows = []
            for _ in range(count):
                (id_len,) = struct.unpack("<H", fh.read(2))
                ids.append(fh.read(id_len).decode("utf-8"))
                code = fh.read(1)[0]
                if code >= len(EMOTION_ORDER):
                    raise ParseError(f"{path}: bad emotion code {code} for {ids[-1]!r}")
                emotions.append(EMOTION_ORDER[code])
                raw = fh.read(4 * dim)
                if len(raw) != 4 * dim:
                    raise ParseError(f"{path}: truncated record for {ids[-1]!r}")
                rows.append(np.frombuffer(raw, dtype="<f4").astype(np.float32))
            matrix = np.stack(rows) if rows else np.zeros((0, dim), dtype=np.float32)
        return cls(ids, matrix, emotions)


def build_index(
    embeddings: Sequence[Embedding],
    emotions: Mapping[str, Emotion],
    dimension: int | None = None,
) -> VectorIndex:
    return VectorIndex.build(embeddings, emotions, dimension)


def _default_encode_fn(enc_cfg: EncoderConfig, lexicon: SuffixLexicon) -> EncodeFn:
    def encode(text: str, mode: str) -> np.ndarray:
        return encode_vector(text, enc_cfg.with_mode(mode), lexicon)

    return encode


def query_strategy_filter(
    index: VectorIndex,
    query_text: str,
    k: int,
    enc_cfg: EncoderConfig,
    lexicon: SuffixLexicon = DEFAULT_LEXICON,
    encode_fn: EncodeFn | None = None,
) -> RetrievalResult:
    """Strategy 1: split off the trailing emotion phrase, encode the plain
    remainder in naive mode, and search only clips tagged with that emotion.

    Propagates NoEmotionFound when the query carries no emotion phrase;
    callers decide whether to fall back to the full strategy.
    """
    naive_query, emotion = strip_emotion_suffix(query_text, lexicon)
    encode = encode_fn or _default_encode_fn(enc_cfg, lexicon)
    return index.top_k(encode(naive_query, "naive"), k, emotion_filter=emotion)


def query_strategy_full(
    index: VectorIndex,
    query_text: str,
    k: int,
    enc_cfg: EncoderConfig,
    lexicon: SuffixLexicon = DEFAULT_LEXICON,
    encode_fn: EncodeFn | None = None,
) -> RetrievalResult:
    """Strategy 2: encode the whole query in emotional mode and scan every
    entry (comparisons_made always equals the index size)."""
    encode = encode_fn or _default_encode_fn(enc_cfg, lexicon)
    return index.top_k(encode(query_text, "emotional"), k, emotion_filter=None)


# --- ground truth file: "clip_id<TAB>query caption" per line ---

def save_ground_truth(pairs: Sequence[tuple[str, str]], path: str | Path) -> None:
    """Write (query caption, correct clip id) pairs, one per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for caption, clip_id in pairs:
            if "\t" in clip_id or "\n" in caption or "\t" in caption:
                raise ValueError(f"unencodable ground-truth pair for {clip_id!r}")
            fh.write(f"{clip_id}\t{caption}\n")


def load_ground_truth(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            clip_id, sep, caption = line.partition("\t")
            if not sep or not clip_id or not caption:
                raise ParseError("expected: clip_id<TAB>caption", line=lineno)
            pairs.append((caption, clip_id))
    return pairs


def evaluate(
    index: VectorIndex,
    ground_truth_pairs: Sequence[tuple[str, str]],
    strategy: str,
    ks: Sequence[int] = (1, 5, 10),
    enc_cfg: EncoderConfig = EncoderConfig(),
    lexicon: SuffixLexicon = DEFAULT_LEXICON,
    encode_fn: EncodeFn | None = None,
) -> EvalReport:
    """Run every (query caption, correct clip) pair through the strategy and
    report R@K for each K plus the median found rank.

    Queries whose correct clip does not appear within max(ks) results are
    excluded from the median and counted in ``not_found``. Under the filter
    strategy, queries without an emotion phrase fall back to the full scan
    (mirroring the serving behavior).
    """
    if strategy not in ("filter", "full"):
        raise ValueError(f"strategy must be 'filter' or 'full', got {strategy!r}")
    if not ks or any(k < 1 for k in ks):
        raise ValueError("ks must be positive")
    known = set(index.ids)
    for _, clip_id in ground_truth_pairs:
        if clip_id not in known:
            raise MissingGroundTruth(f"ground-truth clip {clip_id!r} not in index")

    k_max = max(ks)
    hits_at = {k: 0 for k in ks}
    found_ranks: list[int] = []
    for caption, clip_id in ground_truth_pairs:
        if strategy == "filter":
            try:
                result = query_strategy_filter(index, caption, k_max, enc_cfg, lexicon, encode_fn)
            except NoEmotionFound:
                result = query_strategy_full(index, caption, k_max, enc_cfg, lexicon, encode_fn)
        else:
            result = query_strategy_full(index, caption, k_max, enc_cfg, lexicon, encode_fn)
        rank = None
        for position, (hit_id, _) in enumerate(result.ranked, start=1):
            if hit_id == clip_id:
                rank = position
                break
        if rank is not None:
            found_ranks.append(rank)
            for k in ks:
                if rank <= k:
                    hits_at[k] += 1
    n = len(ground_truth_pairs)
    return EvalReport(
        r_at={k: hits_at[k] / n for k in sorted(ks)} if n else {k: 0.0 for k in ks},
        median_rank=float(statistics.median(found_ranks)) if found_ranks else None,
        query_count=n,
        not_found=n - len(found_ranks),
    )
