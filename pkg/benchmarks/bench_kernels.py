"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --utterances 200000 --repeat 5

Reports the best of ``--repeat`` runs for each kernel on one long encoded
session, and for the corpus-level scans that sit on top of them.
"""
import argparse
import random
import sys
import timeit
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from discourse_lens import _backend, sequence  # noqa: E402
from discourse_lens.vocab import DEFAULT_VOCABULARY, T_NONE, is_none  # noqa: E402


def synthetic_codes(n, seed):
    rng = random.Random(seed)
    index = DEFAULT_VOCABULARY.move_index()
    pool = list(DEFAULT_VOCABULARY.talk_moves) + [T_NONE] * 6
    return np.array([index[rng.choice(pool)] for _ in range(n)], dtype=np.int32)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(kernels, codes, repeat):
    n = len(DEFAULT_VOCABULARY.talk_moves)
    mask = np.array([is_none(m) for m in DEFAULT_VOCABULARY.talk_moves], dtype=np.uint8)
    tnone = DEFAULT_VOCABULARY.move_index()[T_NONE]

    def bigrams():
        kernels.add_bigrams(codes, np.zeros((n, n), dtype=np.int64))

    return {
        "add_bigrams": best(bigrams, repeat),
        "gap_instances": best(lambda: kernels.gap_instances(codes, mask, tnone), repeat),
    }


def bench_corpus(name, corpus, repeat, threads):
    sequence._backend.kernels = _backend.load(name)
    try:
        return {
            "transition_counts": best(lambda: sequence.transition_counts(corpus, threads=threads), repeat),
            "gap_histograms": best(lambda: sequence.gap_histograms(corpus, threads=threads), repeat),
        }
    finally:
        sequence._backend.kernels = _backend.load()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--utterances", type=int, default=200_000)
    ap.add_argument("--sessions", type=int, default=200, help="sessions in the corpus-level run")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    names = ["python"]
    try:
        _backend.load("cython")
        names.insert(0, "cython")
    except ImportError:
        print("compiled kernels not built; timing the fallback only", file=sys.stderr)

    codes = synthetic_codes(args.utterances, args.seed)
    from corpora import random_corpus
    rng = random.Random(args.seed)
    corpus = random_corpus(rng, max_utterances=args.utterances, max_sessions=args.sessions, edges=False)

    rows = {}
    for name in names:
        rows[name] = {**bench_kernels(_backend.load(name), codes, args.repeat),
                      **bench_corpus(name, corpus, args.repeat, args.threads)}

    print(f"{args.utterances} utterances, corpus of {corpus.n_utterances} utterances in "
          f"{len(corpus.sessions)} sessions, best of {args.repeat}")
    header = f"{'step':<20}" + "".join(f"{n:>12}" for n in names) + ("   speedup" if len(names) > 1 else "")
    print(header)
    for step in rows[names[0]]:
        line = f"{step:<20}" + "".join(f"{rows[n][step] * 1000:>10.2f}ms" for n in names)
        if len(names) > 1:
            line += f"{rows['python'][step] / rows['cython'][step]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
