"""Naive reference computations kept apart from the library's search code."""

import itertools

import numpy as np


def _box(dim: int, top: int) -> np.ndarray:
    return np.array(list(itertools.product(range(top + 1), repeat=dim)), dtype=np.int64).reshape(-1, dim)


def elementary_oracle(A, B) -> bool:
    """Whether A = RS and SR = B has a solution over the naturals.

    Every entry of a solution is either at most max(A, B) or multiplies only
    zeros and can be set to 0, so it is enough to search the box [0, M].
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    n, k = A.shape[0], B.shape[0]
    M = int(max(A.max(initial=0), B.max(initial=0)))
    cols = _box(k, M)
    for r in _box(n * k, M):
        R = r.reshape(n, k)
        img = cols @ R.T
        options = []
        for l in range(n):
            hit = np.where((img == A[:, l]).all(axis=1))[0]
            if not len(hit):
                break
            options.append(cols[hit])
        else:
            for combo in itertools.product(*options):
                S = np.stack(combo, axis=1)
                if (S @ R == B).all():
                    return True
    return False


def se_oracle_invertible(A, B, m: int, top: int):
    """All lag-m witnesses with R entries <= top, for invertible A.

    A^m = RS forces R invertible and S = R^{-1} A^m, so only R is enumerated.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    assert A.shape == (2, 2) and B.shape == (2, 2)
    Am, Bm = np.linalg.matrix_power(A, m), np.linalg.matrix_power(B, m)
    R = _box(4, top).reshape(-1, 2, 2)
    det = R[:, 0, 0] * R[:, 1, 1] - R[:, 0, 1] * R[:, 1, 0]
    R, det = R[det != 0], det[det != 0]
    adj = np.stack([np.stack([R[:, 1, 1], -R[:, 0, 1]], -1), np.stack([-R[:, 1, 0], R[:, 0, 0]], -1)], 1)
    num = adj @ Am
    ok = (num % det[:, None, None] == 0).all(axis=(1, 2))
    S = num // det[:, None, None]
    ok &= (S >= 0).all(axis=(1, 2))
    R, S = R[ok], S[ok]
    ok = ((A @ R == R @ B).all(axis=(1, 2)) & (B @ S == S @ A).all(axis=(1, 2))
          & (S @ R == Bm).all(axis=(1, 2)))
    return [(R[i].tolist(), S[i].tolist()) for i in np.where(ok)[0]]
