import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from latentwander.core import Emotion, compute_stats
from latentwander.encoder import (
    EncoderConfig,
    SynthConfig,
    encode_text,
    encode_vector,
    generate_synthetic_dataset,
    load_embeddings_binary,
    load_embeddings_text,
    load_encoder_config,
    remote_encode,
    save_embeddings_binary,
    save_embeddings_text,
    save_encoder_config,
    tokenize,
)
from latentwander.errors import (
    DimensionMismatch,
    EncoderUnavailable,
    InvalidConfig,
    ParseError,
)
from latentwander.pipeline import strip_emotion_suffix

NAIVE = EncoderConfig(dimension=64, mode="naive", hash_seed=7)
EMOTIONAL = EncoderConfig(dimension=64, mode="emotional", hash_seed=7)


class TestEncodeText:
    def test_deterministic(self):
        a = encode_vector("a man talks", EMOTIONAL)
        b = encode_vector("a man talks", EMOTIONAL)
        assert np.array_equal(a, b)

    def test_unit_norm(self):
        for text in ("a", "a man talks", "x y z w " * 10):
            vec = encode_vector(text, EMOTIONAL)
            assert abs(np.linalg.norm(vec.astype(np.float64)) - 1.0) < 1e-6

    def test_naive_mode_drops_trailing_emotion_phrase(self):
        plain = encode_vector("a man talks", NAIVE)
        suffixed = encode_vector("a man talks in surprise", NAIVE)
        assert np.array_equal(plain, suffixed)

    def test_emotional_mode_keeps_suffix(self):
        plain = encode_vector("a man talks", EMOTIONAL)
        suffixed = encode_vector("a man talks in surprise", EMOTIONAL)
        assert not np.array_equal(plain, suffixed)

    def test_self_similarity_is_one(self):
        vec = encode_vector("x", EMOTIONAL)
        assert float(vec @ vec) == pytest.approx(1.0, abs=1e-6)

    def test_token_order_does_not_matter(self):
        assert np.array_equal(
            encode_vector("red dog runs", EMOTIONAL), encode_vector("runs dog red", EMOTIONAL)
        )

    def test_token_multiplicity_matters(self):
        assert not np.array_equal(
            encode_vector("a a b", EMOTIONAL), encode_vector("a b", EMOTIONAL)
        )

    def test_zero_token_text_falls_back_to_basis_vector(self):
        vec = encode_vector("...", EMOTIONAL)
        expected = np.zeros(64, dtype=np.float32)
        expected[0] = 1.0
        assert np.array_equal(vec, expected)

    def test_tokenize_splits_non_alphanumeric(self):
        assert tokenize("A man, talking-to camera!") == ["a", "man", "talking", "to", "camera"]

    def test_embedding_wrapper(self):
        emb = encode_text("a man talks", EMOTIONAL)
        assert emb.normalized and emb.dimension == 64

    def test_dimension_validation(self):
        with pytest.raises(InvalidConfig):
            EncoderConfig(dimension=1)


class TestSynthDataset:
    def test_zero_sigma_embeddings_equal_caption_encodings(self):
        cfg = SynthConfig(clip_count=20, rng_seed=3)
        data = generate_synthetic_dataset(cfg, EMOTIONAL)
        for clip, emb in zip(data.clips, data.embeddings):
            expected = encode_vector(clip.emotional_captions[0], EMOTIONAL)
            assert np.array_equal(emb.values, expected)

    def test_same_seed_is_bit_identical(self):
        cfg = SynthConfig(clip_count=15, captions_per_clip=2, noise_sigma=0.5, rng_seed=11)
        a = generate_synthetic_dataset(cfg, EMOTIONAL)
        b = generate_synthetic_dataset(cfg, EMOTIONAL)
        assert a.clips == b.clips
        assert a.ground_truth == b.ground_truth
        for e1, e2 in zip(a.embeddings, b.embeddings):
            assert e1 == e2

    def test_sigma_does_not_change_captions(self):
        low = generate_synthetic_dataset(SynthConfig(clip_count=10, noise_sigma=0.2, rng_seed=5))
        high = generate_synthetic_dataset(SynthConfig(clip_count=10, noise_sigma=0.8, rng_seed=5))
        assert [c.naive_captions for c in low.clips] == [c.naive_captions for c in high.clips]
        assert [c.emotion for c in low.clips] == [c.emotion for c in high.clips]

    def test_captions_per_video_statistic(self):
        cfg = SynthConfig(clip_count=50, captions_per_clip=13, rng_seed=1)
        data = generate_synthetic_dataset(cfg)
        stats = compute_stats(data.clips, "naive")
        assert stats.captions_per_video == 13.0

    def test_ground_truth_captions_carry_the_clip_emotion(self):
        data = generate_synthetic_dataset(SynthConfig(clip_count=30, rng_seed=9))
        by_id = {c.id: c for c in data.clips}
        for caption, clip_id in data.ground_truth:
            _, emotion = strip_emotion_suffix(caption)
            assert emotion is by_id[clip_id].emotion

    def test_emotion_distribution_respected(self):
        dist = (0.0, 0.0, 1.0, 0.0, 0.0, 0.0)  # all anger
        data = generate_synthetic_dataset(
            SynthConfig(clip_count=25, emotion_distribution=dist, rng_seed=2)
        )
        assert {c.emotion for c in data.clips} == {Emotion.ANGER}

    def test_bad_distribution_rejected(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(clip_count=1, emotion_distribution=(0.5, 0.5, 0.5, 0, 0, 0))

    def test_empty_vocabulary_rejected(self):
        with pytest.raises(InvalidConfig):
            SynthConfig(clip_count=1, vocabulary=())


class _EncoderHandler(BaseHTTPRequestHandler):
    vector = [3.0, 0.0, 4.0, 0.0]
    status = 200

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        self.rfile.read(length)
        body = json.dumps({"vector": self.vector}).encode()
        self.send_response(self.status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def encoder_server():
    server = HTTPServer(("127.0.0.1", 0), _EncoderHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/encode"
    server.shutdown()


class TestRemoteEncode:
    def test_fixed_vector_is_normalized(self, encoder_server):
        emb = remote_encode("hello", encoder_server, expected_dim=4)
        assert np.allclose(emb.values, [0.6, 0.0, 0.8, 0.0])

    def test_dimension_mismatch(self, encoder_server):
        with pytest.raises(DimensionMismatch):
            remote_encode("hello", encoder_server, expected_dim=5)

    def test_endpoint_down(self):
        with pytest.raises(EncoderUnavailable):
            remote_encode("hello", "http://127.0.0.1:1/encode", timeout_s=0.5)

    def test_http_error_maps_to_unavailable(self, encoder_server):
        _EncoderHandler.status = 500
        try:
            with pytest.raises(EncoderUnavailable):
                remote_encode("hello", encoder_server)
        finally:
            _EncoderHandler.status = 200


class TestEmbeddingFiles:
    def make_embeddings(self, n=6, dim=16, seed=0):
        rng = np.random.default_rng(seed)
        out = []
        for i in range(n):
            v = rng.standard_normal(dim)
            v = (v / np.linalg.norm(v)).astype(np.float32)
            from latentwander.core import Embedding

            out.append(Embedding(id=f"c{i:03d}", values=v))
        return out

    def test_binary_round_trip(self, tmp_path):
        embeddings = self.make_embeddings()
        path = tmp_path / "emb.lwem"
        save_embeddings_binary(embeddings, path)
        assert load_embeddings_binary(path) == embeddings

    def test_binary_magic_and_layout(self, tmp_path):
        embeddings = self.make_embeddings(n=2, dim=4)
        path = tmp_path / "emb.lwem"
        save_embeddings_binary(embeddings, path)
        raw = path.read_bytes()
        assert raw[:4] == b"LWEM"
        assert raw[4] == 1
        assert int.from_bytes(raw[5:9], "little") == 4
        assert int.from_bytes(raw[9:17], "little") == 2

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "emb.lwem"
        path.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(ParseError):
            load_embeddings_binary(path)

    def test_text_round_trip(self, tmp_path):
        embeddings = self.make_embeddings()
        path = tmp_path / "emb.txt"
        save_embeddings_text(embeddings, path)
        assert load_embeddings_text(path) == embeddings

    def test_text_ragged_dimensions_rejected(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("a 0.1 0.2 0.3\nb 0.1 0.2\n")
        with pytest.raises(DimensionMismatch):
            load_embeddings_text(path)

    def test_encoder_config_round_trip(self, tmp_path):
        cfg = EncoderConfig(dimension=128, mode="naive", hash_seed=99)
        path = tmp_path / "encoder.json"
        save_encoder_config(cfg, path)
        assert load_encoder_config(path) == cfg
