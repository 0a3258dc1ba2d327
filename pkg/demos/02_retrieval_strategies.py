#!/usr/bin/env python3
"""Compare the two emotional query strategies on a synthetic archive and
sweep the noise knob to show how R@K degrades.
"""

from latentwander import (
    EncoderConfig,
    SynthConfig,
    build_index,
    evaluate,
    generate_synthetic_dataset,
    query_strategy_filter,
    query_strategy_full,
)

ENC = EncoderConfig(dimension=256, mode="emotional", hash_seed=0)


def build(sigma: float):
    data = generate_synthetic_dataset(
        SynthConfig(clip_count=1000, noise_sigma=sigma, rng_seed=7), ENC
    )
    index = build_index(data.embeddings, {c.id: c.emotion for c in data.clips})
    return index, data


def demo_side_by_side():
    index, data = build(sigma=0.0)
    emotions = {c.id: c.emotion for c in data.clips}
    query, wanted = data.ground_truth[0]
    print(f"query: {query!r}  (true clip {wanted})\n")

    filtered = query_strategy_filter(index, query, 3, ENC)
    full = query_strategy_full(index, query, 3, ENC)
    print(f"strategy 1 (filter): scored {filtered.comparisons_made} clips")
    for rank, (cid, score) in enumerate(filtered.ranked, 1):
        print(f"  {rank}. {cid}  {score:+.4f}  [{emotions[cid].value}]")
    print(f"strategy 2 (full):   scored {full.comparisons_made} clips")
    for rank, (cid, score) in enumerate(full.ranked, 1):
        print(f"  {rank}. {cid}  {score:+.4f}  [{emotions[cid].value}]")
    print()


def demo_noise_sweep():
    print("noise    R@1     R@5     R@10    MedR   not_found")
    for sigma in (0.0, 0.2, 0.4, 0.8):
        index, data = build(sigma)
        report = evaluate(index, data.ground_truth, "full", (1, 5, 10), ENC)
        median = f"{report.median_rank:.1f}" if report.median_rank else "-"
        print(
            f"{sigma:4.1f}    {report.r_at[1]:.3f}   {report.r_at[5]:.3f}   "
            f"{report.r_at[10]:.3f}   {median:5s}  {report.not_found}"
        )


if __name__ == "__main__":
    demo_side_by_side()
    demo_noise_sweep()
