"""Deterministic feature-hashing text encoder, the remote-encoder client, and
the synthetic co-embedded dataset generator used for desk-scale evaluation.

The hashing encoder maps each token to a signed coordinate of a D-dimensional
vector via keyed blake2b, which makes text/clip co-embedding reproducible
across processes and platforms with no learned weights. Its two modes mirror
the plain/emotional model pair: naive mode drops a trailing emotion phrase
before hashing, emotional mode hashes everything.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from hashlib import blake2b
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import EMOTION_ORDER, ClipRecord, Embedding
from .errors import DimensionMismatch, EncoderUnavailable, InvalidConfig, ParseError
from .pipeline import DEFAULT_LEXICON, SuffixLexicon, augment_caption

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_SEED_MASK = (1 << 64) - 1

MODES = ("naive", "emotional")


@dataclass(frozen=True)
class EncoderConfig:
    dimension: int = 256
    mode: str = "emotional"
    hash_seed: int = 0

    def __post_init__(self):
        if self.dimension < 2:
            raise InvalidConfig(f"dimension must be >= 2, got {self.dimension}")
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {self.mode!r}")

    def with_mode(self, mode: str) -> "EncoderConfig":
        return EncoderConfig(self.dimension, mode, self.hash_seed)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs (underscore included)."""
    return _TOKEN_RE.findall(text.lower())


def _hash64(token: str, seed: int, domain: bytes) -> int:
    digest = blake2b(
        token.encode("utf-8"),
        digest_size=8,
        key=(seed & _SEED_MASK).to_bytes(8, "little"),
        person=domain,
    ).digest()
    return int.from_bytes(digest, "little")


def drop_trailing_emotion_tokens(
    tokens: list[str], lexicon: SuffixLexicon = DEFAULT_LEXICON
) -> list[str]:
    """Remove the longest trailing token run that matches a lexicon suffix."""
    best = 0
    for _, suffix in lexicon.entries():
        suffix_tokens = tokenize(suffix)
        n = len(suffix_tokens)
        if best < n <= len(tokens) and tokens[-n:] == suffix_tokens:
            best = n
    return tokens[:-best] if best else tokens


def encode_vector(
    text: str, cfg: EncoderConfig, lexicon: SuffixLexicon = DEFAULT_LEXICON
) -> np.ndarray:
    """Unit-norm float32 hash embedding of the text under the given config."""
    tokens = tokenize(text)
    if cfg.mode == "naive":
        tokens = drop_trailing_emotion_tokens(tokens, lexicon)
    acc = np.zeros(cfg.dimension, dtype=np.float64)
    for token in tokens:
        index = _hash64(token, cfg.hash_seed, b"lw-index") % cfg.dimension
        sign = 1.0 if _hash64(token, cfg.hash_seed, b"lw-sign") & 1 else -1.0
        acc[index] += sign
    norm = np.linalg.norm(acc)
    if norm == 0.0:
        acc[0] = 1.0  # fixed fallback basis vector, avoids 0/0
        norm = 1.0
    return (acc / norm).astype(np.float32)


def encode_text(
    text: str, cfg: EncoderConfig, lexicon: SuffixLexicon = DEFAULT_LEXICON
) -> Embedding:
    if not text:
        raise ValueError("text must be non-empty")
    return Embedding(id=text, values=encode_vector(text, cfg, lexicon))


def remote_encode(
    text: str,
    endpoint: str,
    mode: str = "emotional",
    expected_dim: int | None = None,
    timeout_s: float = 10.0,
) -> Embedding:
    """Encode via an external encoder service speaking {text, mode} -> {vector}.

    Raises EncoderUnavailable on any transport or payload failure and
    DimensionMismatch when the returned vector length differs from
    ``expected_dim``.
    """
    import httpx

    try:
        response = httpx.post(endpoint, json={"text": text, "mode": mode}, timeout=timeout_s)
        response.raise_for_status()
        payload = response.json()
    except httpx.HTTPError as exc:
        raise EncoderUnavailable(f"encoder endpoint {endpoint} failed: {exc}") from exc
    except ValueError as exc:
        raise EncoderUnavailable(f"encoder endpoint {endpoint} returned non-JSON") from exc

    vector = payload.get("vector") if isinstance(payload, dict) else None
    if not isinstance(vector, list):
        raise EncoderUnavailable(f"encoder endpoint {endpoint} returned no vector")
    if expected_dim is not None and len(vector) != expected_dim:
        raise DimensionMismatch(f"expected {expected_dim} values, got {len(vector)}")
    values = np.asarray(vector, dtype=np.float64)
    norm = np.linalg.norm(values)
    if not np.isfinite(norm) or norm == 0.0:
        raise EncoderUnavailable(f"encoder endpoint {endpoint} returned a degenerate vector")
    return Embedding(id=text, values=(values / norm).astype(np.float32))


# A small emotion-free vocabulary: none of these words (or word pairs) can
# form a lexicon suffix, so random captions never end in an emotion phrase.
DEFAULT_VOCABULARY: tuple[str, ...] = (
    "man", "woman", "child", "dog", "cat", "horse", "crowd", "singer", "dancer",
    "chef", "teacher", "soldier", "doctor", "artist", "farmer", "driver",
    "runner", "player", "band", "group", "camera", "mirror", "guitar", "piano",
    "ball", "table", "chair", "window", "door", "car", "train", "boat", "plane",
    "bicycle", "street", "beach", "forest", "mountain", "river", "kitchen",
    "garden", "stage", "field", "market", "museum", "library", "office",
    "school", "church", "bridge", "tower", "castle", "village", "city", "park",
    "road", "room", "house", "wall", "roof", "floor", "lamp", "candle", "book",
    "letter", "phone", "radio", "screen", "clock", "hat", "coat", "dress",
    "shirt", "shoes", "flag", "flower", "tree", "grass", "snow", "rain",
    "storm", "cloud", "sun", "moon", "star", "fire", "smoke", "water", "sand",
    "stone", "glass", "paper", "bread", "cake", "fruit", "apple", "fish",
    "bird", "lion", "tiger", "bear", "rabbit", "sheep", "cow", "talks",
    "walks", "runs", "jumps", "sings", "dances", "plays", "reads", "writes",
    "draws", "paints", "cooks", "eats", "drinks", "sleeps", "waves", "smiles",
    "laughs", "cries", "shouts", "whispers", "watches", "looks", "points",
    "holds", "carries", "throws", "catches", "kicks", "rides", "drives",
    "climbs", "swims", "flies", "falls", "stands", "sits", "opens", "closes",
    "builds", "breaks", "cleans", "washes", "cuts", "mixes", "pours", "lifts",
    "pulls", "pushes", "red", "blue", "green", "yellow", "white", "black",
    "gray", "brown", "golden", "silver", "old", "young", "tall", "short",
    "big", "small", "bright", "dark", "fast", "slow", "quiet", "loud",
    "empty", "full", "round", "square", "wooden", "metal", "plastic", "wet",
    "dry", "warm", "cold",
)


@dataclass(frozen=True)
class SynthConfig:
    clip_count: int
    captions_per_clip: int = 1
    noise_sigma: float = 0.0
    emotion_distribution: tuple[float, ...] = (1 / 6,) * 6
    rng_seed: int = 0
    vocabulary: tuple[str, ...] = DEFAULT_VOCABULARY

    def __post_init__(self):
        object.__setattr__(self, "emotion_distribution", tuple(self.emotion_distribution))
        object.__setattr__(self, "vocabulary", tuple(self.vocabulary))
        if self.clip_count < 1:
            raise InvalidConfig("clip_count must be positive")
        if self.captions_per_clip < 1:
            raise InvalidConfig("captions_per_clip must be positive")
        if self.noise_sigma < 0:
            raise InvalidConfig("noise_sigma must be >= 0")
        if len(self.emotion_distribution) != len(EMOTION_ORDER):
            raise InvalidConfig("emotion_distribution needs one weight per emotion")
        if any(w < 0 for w in self.emotion_distribution):
            raise InvalidConfig("emotion_distribution weights must be >= 0")
        if abs(sum(self.emotion_distribution) - 1.0) > 1e-6:
            raise InvalidConfig("emotion_distribution must sum to 1")
        if not self.vocabulary:
            raise InvalidConfig("vocabulary must be non-empty")


@dataclass(frozen=True)
class SyntheticDataset:
    clips: list[ClipRecord]
    embeddings: list[Embedding]
    ground_truth: list[tuple[str, str]]  # (query caption, correct clip id)


def generate_synthetic_dataset(
    cfg: SynthConfig,
    enc: EncoderConfig = EncoderConfig(),
    lexicon: SuffixLexicon = DEFAULT_LEXICON,
) -> SyntheticDataset:
    """Build a seeded dataset of clips whose embeddings are noisy encodings of
    their own (emotional) captions.

    The designated true caption per clip is its first emotional caption; the
    clip embedding is normalize(encode(true caption) + sigma * g) with g drawn
    from the dataset generator. Ground truth pairs that caption with the clip.
    The caption stream does not depend on sigma, so datasets generated from
    the same seed differ only in noise magnitude.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    weights = np.asarray(cfg.emotion_distribution, dtype=np.float64)
    weights = weights / weights.sum()
    vocab = list(cfg.vocabulary)

    def sample_caption() -> str:
        length = int(rng.integers(5, 13))
        return " ".join(vocab[int(i)] for i in rng.integers(0, len(vocab), size=length))

    clips: list[ClipRecord] = []
    embeddings: list[Embedding] = []
    ground_truth: list[tuple[str, str]] = []
    seen_true_captions: set[str] = set()
    for i in range(cfg.clip_count):
        clip_id = f"c{i:05d}"
        emotion = EMOTION_ORDER[int(rng.choice(len(EMOTION_ORDER), p=weights))]
        duration = float(np.round(rng.uniform(12.0, 40.0), 2))
        naive = []
        for j in range(cfg.captions_per_clip):
            caption = sample_caption()
            if j == 0:
                while caption in seen_true_captions:
                    caption = sample_caption()
                seen_true_captions.add(caption)
            naive.append(caption)
        emotional = [
            augment_caption(c, emotion, lexicon, seed=int(rng.integers(0, 2**63)))
            for c in naive
        ]
        noise = rng.standard_normal(enc.dimension)
        base = encode_vector(emotional[0], enc, lexicon)
        if cfg.noise_sigma > 0:
            noisy = base.astype(np.float64) + cfg.noise_sigma * noise
            vector = (noisy / np.linalg.norm(noisy)).astype(np.float32)
        else:
            vector = base
        clips.append(
            ClipRecord(
                id=clip_id,
                video_id=f"v{i:05d}",
                start_s=0.0,
                end_s=duration,
                naive_captions=tuple(naive),
                emotional_captions=tuple(emotional),
                emotion=emotion,
            )
        )
        embeddings.append(Embedding(id=clip_id, values=vector))
        ground_truth.append((emotional[0], clip_id))
    return SyntheticDataset(clips, embeddings, ground_truth)


def save_encoder_config(cfg: EncoderConfig, path: str | Path) -> None:
    import json

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            {"dimension": cfg.dimension, "mode": cfg.mode, "hash_seed": cfg.hash_seed},
            fh,
        )
        fh.write("\n")


def load_encoder_config(path: str | Path) -> EncoderConfig:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        return EncoderConfig(
            dimension=int(data["dimension"]),
            mode=data.get("mode", "emotional"),
            hash_seed=int(data.get("hash_seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad encoder config {path}: {exc}") from exc


# --- embedding interchange: text (id + decimals per line) and binary LWEM ---

_MAGIC = b"LWEM"
_VERSION = 1


def save_embeddings_text(embeddings: Sequence[Embedding], path: str | Path) -> None:
    """One record per line: id then the vector values. Ids must be
    whitespace-free in this format; use the binary format otherwise."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for emb in embeddings:
            if any(ch.isspace() for ch in emb.id) or not emb.id:
                raise ValueError(f"text format needs whitespace-free ids, got {emb.id!r}")
            fh.write(emb.id + " " + " ".join(f"{float(v):.9g}" for v in emb.values))
            fh.write("\n")


def load_embeddings_text(path: str | Path) -> list[Embedding]:
    embeddings = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 3:
                raise ParseError("expected: id followed by >= 2 values", line=lineno)
            try:
                values = np.asarray([float(p) for p in parts[1:]], dtype=np.float32)
            except ValueError as exc:
                raise ParseError(f"bad value: {exc}", line=lineno) from exc
            if dim is None:
                dim = values.shape[0]
            elif values.shape[0] != dim:
                raise DimensionMismatch(
                    f"line {lineno}: expected {dim} values, got {values.shape[0]}"
                )
            embeddings.append(_as_embedding(parts[0], values))
    return embeddings


def _as_embedding(record_id: str, values: np.ndarray) -> Embedding:
    norm = float(np.linalg.norm(values.astype(np.float64)))
    return Embedding(id=record_id, values=values, normalized=abs(norm - 1.0) <= 1e-6)


def save_embeddings_binary(embeddings: Sequence[Embedding], path: str | Path) -> None:
    """Binary layout: magic LWEM, version byte, u32 dimension, u64 count, then
    per record a u16-length-prefixed UTF-8 id and little-endian float32s."""
    if not embeddings:
        raise ValueError("refusing to write an empty embedding file")
    dim = embeddings[0].dimension
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(bytes([_VERSION]))
        fh.write(struct.pack("<I", dim))
        fh.write(struct.pack("<Q", len(embeddings)))
        for emb in embeddings:
            if emb.dimension != dim:
                raise DimensionMismatch(f"{emb.id!r}: dimension {emb.dimension} != {dim}")
            encoded = emb.id.encode("utf-8")
            if not encoded or len(encoded) > 0xFFFF:
                raise ValueError(f"id {emb.id!r} not encodable in 1..65535 bytes")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(emb.values.astype("<f4").tobytes())


def load_embeddings_binary(path: str | Path) -> list[Embedding]:
    with open(path, "rb") as fh:
        header = fh.read(len(_MAGIC) + 1 + 4 + 8)
        if len(header) < len(_MAGIC) + 13 or header[: len(_MAGIC)] != _MAGIC:
            raise ParseError(f"{path}: not an embedding file (bad magic)")
        if header[len(_MAGIC)] != _VERSION:
            raise ParseError(f"{path}: unsupported version {header[len(_MAGIC)]}")
        dim = struct.unpack_from("<I", header, len(_MAGIC) + 1)[0]
        count = struct.unpack_from("<Q", header, len(_MAGIC) + 5)[0]
        embeddings = []
        for _ in range(count):
            (id_len,) = struct.unpack("<H", fh.read(2))
            record_id = fh.read(id_len).decode("utf-8")
            raw = fh.read(4 * dim)
            if len(raw) != 4 * dim:
                raise ParseError(f"{path}: truncated record for {record_id!r}")
            values = np.frombuffer(raw, dtype="<f4").astype(np.float32)
            embeddings.append(_as_embedding(record_id, values))
    return embeddings
