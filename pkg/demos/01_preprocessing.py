#!/usr/bin/env python3
"""Walk through the three preprocessing stages on hand-made data:
minimum-duration shot merging, emotion re-balancing, and emotional
caption augmentation with its inverse.
"""

import random

from latentwander import (
    DEFAULT_LEXICON,
    Emotion,
    EmotionScores,
    SegmentationConfig,
    ShotBoundaryList,
    augment_caption,
    merge_short_shots,
    rebalance_batch,
    rebalance_emotion,
    strip_emotion_suffix,
)


def demo_shot_merging():
    print("=== 1. Shot merging (12 s minimum) ===")
    # a detector found cuts at 6 s (a jump cut), 10 s, 15 s, and 30 s
    shots = ShotBoundaryList("ZB-demo", (0, 6, 10, 15, 30))
    clips = merge_short_shots(shots, SegmentationConfig(min_clip_duration_s=12))
    print(f"boundaries {shots.boundaries} ->")
    for start, end in clips:
        print(f"  clip {start:5.1f}..{end:5.1f}  ({end - start:.1f} s)")
    print("the 6 s jump-cut fragment was absorbed instead of becoming a clip\n")

    trailing = merge_short_shots(ShotBoundaryList("ZB-short", (0, 6, 11)))
    print(f"a video shorter than the minimum collapses to one clip: {trailing}\n")


def demo_emotion_rebalancing():
    print("=== 2. Emotion re-balancing ===")
    cases = [
        ("anger dominates", EmotionScores(0.2, 0.05, 0.6, 0.05, 0.05, 0.05)),
        ("happiness over sadness", EmotionScores(0.5, 0.3, 0.05, 0.05, 0.05, 0.05)),
        ("happiness over fear", EmotionScores(0.5, 0.05, 0.05, 0.05, 0.05, 0.3)),
    ]
    for label, scores in cases:
        print(f"  {label:26s} -> {rebalance_emotion(scores).value}")

    # a batch where the detector called almost everything happiness
    rng = random.Random(1)
    batch = []
    for i in range(1000):
        if i < 874:
            second = rng.choice([e for e in Emotion if e is not Emotion.HAPPINESS])
            values = {e: 0.025 for e in Emotion}
            values[Emotion.HAPPINESS], values[second] = 0.6, 0.3
        else:
            top = rng.choice([e for e in Emotion if e is not Emotion.HAPPINESS])
            values = {e: 0.08 for e in Emotion}
            values[top] = 0.6
        batch.append((f"clip{i}", EmotionScores(**{e.value: round(v, 3) for e, v in values.items()})))
    report = rebalance_batch(batch)
    print(
        f"\n  happiness share: {report.before_happiness_share:.1%} raw "
        f"-> {report.after_happiness_share:.1%} after the rules\n"
    )


def demo_caption_augmentation():
    print("=== 3. Caption augmentation and its inverse ===")
    caption = "a man is talking to the camera"
    for seed in (0, 1, 2):
        emotional = augment_caption(caption, Emotion.SURPRISE, DEFAULT_LEXICON, seed=seed)
        recovered = strip_emotion_suffix(emotional)
        print(f"  seed {seed}: {emotional!r}")
        assert recovered == (caption, Emotion.SURPRISE)
    punctuated = augment_caption("a woman sings.", Emotion.DISGUST, seed=0)
    print(f"  punctuation-aware: {punctuated!r}")
    print(f"  stripped back: {strip_emotion_suffix(punctuated)!r}")


if __name__ == "__main__":
    demo_shot_merging()
    demo_emotion_rebalancing()
    demo_caption_augmentation()
