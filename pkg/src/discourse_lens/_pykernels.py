"""Pure-Python kernels; same contract as the compiled ``_ckernels``."""
import numpy as np

NAME = "python"


def add_bigrams(codes, counts):
    """Accumulate consecutive-pair counts of ``codes`` into ``counts`` in place."""
    seq = codes.tolist()
    for a, b in zip(seq, seq[1:]):
        counts[a, b] += 1


def gap_instances(codes, none_mask, tnone):
    """Rows ``(from_code, to_code, gap)`` for every non-None move followed by
    zero or more ``tnone`` codes and then a non-None move."""
    seq = codes.tolist()
    mask = none_mask.tolist()
    n = len(seq)
    out = []
    for a in range(n):
        j = seq[a]
        if mask[j]:
            continue
        b = a + 1
        while b < n and seq[b] == tnone:
            b += 1
        if b < n and not mask[seq[b]]:
            out.append((j, seq[b], b - a - 1))
    if not out:
        return np.empty((0, 3), dtype=np.int64)
    return np.array(out, dtype=np.int64)
