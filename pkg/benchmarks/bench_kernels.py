"""Throughput comparison of the compiled and pure kernel backends.

Two views are reported. End to end: the backend is fixed when ripwire is
imported, so the driver runs one worker subprocess per backend with
RIPWIRE_BACKEND set, each on identical seeded workloads (name matching
over a 10,000-entry index, one epoch of embedding training). Kernel
level: the raw trie-walk kernels are loaded side by side in the driver
and timed on the same pre-encoded anchor batch, which isolates them from
the shared Python-side text preparation that dominates the end-to-end
matching time. Matcher outputs must agree bit for bit across backends;
the trainers agree statistically, so only their losses are shown.

Usage: python3 benchmarks/bench_kernels.py [--tweets N] [--sentences N]
"""

import argparse
import hashlib
import json
import os
import random
import subprocess
import sys
import time

SEED = 99


def build_match_workload(n_tweets):
    from ripwire.kb import KBDate, PersonEntry

    people = []
    for i in range(100):
        for j in range(100):
            people.append(
                PersonEntry(
                    id=f"q{i * 100 + j:05d}",
                    name=f"Fn{i:02d} Ln{j:02d}",
                    birth=KBDate("1950-01-01", 11),
                )
            )
    rng = random.Random(SEED)
    words = [f"w{i}" for i in range(500)]
    leads = ["RIP", "rip", "R.I.P.", "#RIP", "So sad RIP"]
    texts = []
    for _ in range(n_tweets):
        u = rng.random()
        tail = " ".join(rng.choice(words) for _ in range(3))
        if u < 0.30:
            person = rng.choice(people)
            name = person.name.upper() if rng.random() < 0.3 else person.name
            texts.append(f"{rng.choice(leads)} {name} {tail}")
        elif u < 0.45:
            texts.append(f"RIP {rng.choice(words)} {tail}")
        else:
            texts.append(f"{tail} {rng.choice(words)}")
    return people, texts


def build_sentences(n_sentences):
    rng = random.Random(SEED + 1)
    vocab = [f"t{i}" for i in range(2000)]
    weights = [1.0 / (i + 1) for i in range(len(vocab))]
    return [
        rng.choices(vocab, weights=weights, k=rng.randint(8, 16))
        for _ in range(n_sentences)
    ]


def run_worker(args):
    from ripwire import BACKEND_NAME
    from ripwire.embeddings import SGNSParams, train_sgns
    from ripwire.kb import build_name_index, match_texts

    people, texts = build_match_workload(args.tweets)
    index = build_name_index(people)
    started = time.perf_counter()
    matches = match_texts(texts, index)
    match_seconds = time.perf_counter() - started
    digest = hashlib.sha256()
    for i, ids in enumerate(matches):
        if ids:
            digest.update(f"{i}:{','.join(sorted(ids))}\n".encode())

    sentences = build_sentences(args.sentences)
    n_tokens = sum(len(s) for s in sentences)
    params = SGNSParams(
        dimension=args.dimension, window=5, negatives=5, epochs=1, min_count=1
    )
    started = time.perf_counter()
    model = train_sgns(sentences, params, SEED)
    sgns_seconds = time.perf_counter() - started

    print(
        json.dumps(
            {
                "backend": BACKEND_NAME,
                "match_seconds": match_seconds,
                "match_tweets": len(texts),
                "match_digest": digest.hexdigest(),
                "matched": sum(1 for ids in matches if ids),
                "sgns_seconds": sgns_seconds,
                "sgns_tokens": n_tokens,
                "sgns_loss": model.epoch_losses[-1],
            }
        )
    )


def bench_match_kernels(args, backends):
    """Time the raw match kernels on one shared pre-encoded anchor batch."""
    import numpy as np

    from ripwire._kernels import get_backend
    from ripwire.kb import _anchor_suffixes, _encode_buffer, build_name_index

    people, texts = build_match_workload(args.tweets)
    index = build_name_index(people)
    auto = index.automaton()
    suffixes = []
    for text in texts:
        if "RIP" in text:
            suffixes.extend(_anchor_suffixes(text, index.strip_diacritics))
    lengths = np.fromiter((len(s) for s in suffixes), dtype=np.int64)
    ends = np.cumsum(lengths)
    starts = ends - lengths
    cp, mask = _encode_buffer("".join(suffixes))

    print(f"\nkernel-level matching, {len(suffixes):,} anchors per pass:")
    outputs = {}
    for name in backends:
        kernel = get_backend(name)
        out = np.empty(len(suffixes), dtype=np.int32)
        passes = 0
        started = time.perf_counter()
        while True:
            kernel.match_batch(
                cp, mask, starts, ends,
                auto.node_ptr, auto.trans_char, auto.trans_child, auto.terminal,
                out,
            )
            passes += 1
            elapsed = time.perf_counter() - started
            if elapsed > 1.0 or passes >= 50:
                break
        outputs[name] = out.copy()
        rate = passes * len(suffixes) / elapsed
        print(f"  {name:<8} {rate:>12,.0f} anchors/s ({passes} passes)")
    if len(outputs) == 2:
        first, second = outputs.values()
        if not np.array_equal(first, second):
            raise SystemExit("backend mismatch: kernel outputs differ")


def run_driver(args):
    from ripwire._kernels import available_backends

    backends = available_backends()
    rows = []
    for name in backends:
        env = dict(os.environ, RIPWIRE_BACKEND=name)
        cmd = [
            sys.executable,
            os.path.abspath(__file__),
            "--run-one",
            "--tweets", str(args.tweets),
            "--sentences", str(args.sentences),
            "--dimension", str(args.dimension),
        ]
        proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            raise SystemExit(f"worker for backend {name!r} failed")
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))

    print(
        f"{'backend':<8} {'match s':>9} {'tweets/s':>11}"
        f" {'sgns s':>9} {'tokens/s':>10} {'epoch loss':>12}"
    )
    for row in rows:
        print(
            f"{row['backend']:<8}"
            f" {row['match_seconds']:>9.2f}"
            f" {row['match_tweets'] / row['match_seconds']:>11,.0f}"
            f" {row['sgns_seconds']:>9.2f}"
            f" {row['sgns_tokens'] / row['sgns_seconds']:>10,.0f}"
            f" {row['sgns_loss']:>12.4f}"
        )

    if len(rows) == 2:
        match_speedup = rows[1]["match_seconds"] / rows[0]["match_seconds"]
        sgns_speedup = rows[1]["sgns_seconds"] / rows[0]["sgns_seconds"]
        print(
            f"\n{rows[0]['backend']} speedup over {rows[1]['backend']}:"
            f" match {match_speedup:.1f}x, sgns {sgns_speedup:.1f}x"
        )
        agree = rows[0]["match_digest"] == rows[1]["match_digest"]
        print(f"match results bit-identical across backends: {'yes' if agree else 'NO'}")
        if not agree:
            raise SystemExit("backend mismatch: matcher outputs differ")
    else:
        print(f"\nonly the {rows[0]['backend']} backend is available on this install")

    bench_match_kernels(args, backends)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tweets", type=int, default=50_000,
                        help="matching workload size (default 50,000)")
    parser.add_argument("--sentences", type=int, default=3_000,
                        help="training workload size (default 3,000)")
    parser.add_argument("--dimension", type=int, default=64,
                        help="embedding dimension (default 64)")
    parser.add_argument("--run-one", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.run_one:
        run_worker(args)
    else:
        run_driver(args)


if __name__ == "__main__":
    main()
