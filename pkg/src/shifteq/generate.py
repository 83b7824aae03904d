"""Seeded instance generators used by the property suites and the CLI.

Concrete shifts of lag m > 1 are obtained from a lag-1 compatible shift
(R0, S0) by taking R = A^{m-1} R0 and S = S0 and transporting the maps along
the lexicographic identification E_R ≅ E_A^{m-1} × E_R0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .matrices import OMEGA, CardMatrix, IndexSet, NatMatrix, is_essential, mat_mul, mat_pow
from .pathspace import PathIso, endpoints, invert, lexicographic_matching, path_space
from .search import SSEChain
from .shifts import ConcreteShift, build_lag1_compatible

# bound on sum(A^{2m}) + sum(B^{2m}), the number of points the validators visit
WORKLOAD_LIMIT = 20_000


def random_matrix(rng: random.Random, rows: IndexSet, cols: IndexSet, max_entry: int,
                  zero_prob: float = 0.4) -> NatMatrix:
    return NatMatrix(rows, cols, tuple(
        tuple(0 if rng.random() < zero_prob else rng.randint(1, max_entry) for _ in range(cols.size))
        for _ in range(rows.size)))


def raise_lag(cs: ConcreteShift, m: int) -> ConcreteShift:
    """Lag-m shift from a lag-1 one; alignment is preserved."""
    if cs.m != 1:
        raise ValueError("raise_lag starts from a lag-1 shift")
    if m == 1:
        return cs
    A, B, R0, S = cs.A, cs.B, cs.R, cs.S
    R = mat_mul(mat_pow(A, m - 1), R0)
    # (a_1..a_{m-1}, r0) -> (r,) and back
    kappa_inv = lexicographic_matching(path_space((A,) * (m - 1) + (R0,)), path_space((R,)))
    kappa = {v[0]: k for k, v in kappa_inv.items()}
    qA0, qB0 = cs.psi_A.table, cs.psi_B.table
    pR0 = cs.phi_R.table
    pS0_inv = invert(cs.phi_S).table

    psi_A = {}
    for r, s in path_space((R, S)):
        *a, r0 = kappa[r]
        psi_A[(r, s)] = tuple(a) + qA0[(r0, s)]

    psi_B = {}
    for s0, r in path_space((S, R)):
        *a, r0 = kappa[r]
        s = s0
        bs = []
        for ai in a:
            b, s = pS0_inv[(s, ai)]
            bs.append(b)
        psi_B[(s0, r)] = tuple(bs) + qB0[(s, r0)]

    phi_R = {}
    for a, r in path_space((A, R)):
        *a_rest, r0 = kappa[r]
        r0p, b = pR0[(a_rest[-1], r0)]
        phi_R[(a, r)] = (kappa_inv[(a,) + tuple(a_rest[:-1]) + (r0p,)][0], b)

    return ConcreteShift(A, B, R, S, m,
                         PathIso((A, R), (R, B), phi_R), cs.phi_S,
                         PathIso((R, S), (A,) * m, psi_A), PathIso((S, R), (B,) * m, psi_B))


def mutate(cs: ConcreteShift, rng: random.Random, k: int = 1) -> ConcreteShift:
    """Apply ``k`` random transpositions inside endpoint classes of the four maps."""
    for _ in range(k):
        names = list(cs.MAPS)
        rng.shuffle(names)
        for name in names:
            iso = getattr(cs, name)
            classes: dict = {}
            for p in sorted(iso.table, key=lambda p: tuple((e.v, e.w, e.alpha) for e in p)):
                classes.setdefault(endpoints(iso.table[p]), []).append(p)
            big = [c for c in sorted(classes) if len(classes[c]) >= 2]
            if not big:
                continue
            cls = classes[rng.choice(big)]
            p, q = rng.sample(cls, 2)
            table = dict(iso.table)
            table[p], table[q] = table[q], table[p]
            cs = cs.with_map(name, PathIso(iso.domain, iso.codomain, table))
            break
    return cs


def random_elementary_pair(rng: random.Random, max_size: int = 4, factor_entry: int = 2,
                           max_entry: int = 3, essential: bool = True):
    """(A, B, R, S) with A = RS and B = SR."""
    while True:
        V = IndexSet("V", rng.randint(1, max_size))
        W = IndexSet("W", rng.randint(1, max_size))
        R = random_matrix(rng, V, W, factor_entry)
        S = random_matrix(rng, W, V, factor_entry)
        A, B = mat_mul(R, S), mat_mul(S, R)
        if A.max_entry() > max_entry or B.max_entry() > max_entry:
            continue
        if essential and not (is_essential(A) and is_essential(B)):
            continue
        return A, B, R, S


def workload(A: NatMatrix, B: NatMatrix, m: int) -> int:
    return mat_pow(A, 2 * m).total() + mat_pow(B, 2 * m).total()


@dataclass(frozen=True)
class GeneratedShift:
    shift: ConcreteShift
    mutated: bool
    transpositions: int


def random_concrete_shift(rng: random.Random, mutated: bool = False, max_size: int = 4,
                          max_entry: int = 3, max_lag: int = 3,
                          workload_limit: int = WORKLOAD_LIMIT) -> GeneratedShift:
    """Essential instance built by the lag-1 builder, lifted and optionally mutated."""
    while True:
        A, B, R, S = random_elementary_pair(rng, max_size=max_size, max_entry=max_entry)
        m = rng.randint(1, max_lag)
        if workload(A, B, m) > workload_limit:
            continue
        cs = raise_lag(build_lag1_compatible(A, B, R, S), m)
        if not mutated:
            return GeneratedShift(cs, False, 0)
        k = rng.randint(1, 3)
        out = mutate(cs, rng, k)
        if out is cs:
            continue
        return GeneratedShift(out, True, k)


def theorem_suite(seed: int, count: int = 200, **kw) -> list[GeneratedShift]:
    """``count`` instances, alternating unmutated and mutated."""
    rng = random.Random(seed)
    return [random_concrete_shift(rng, mutated=bool(i % 2), **kw) for i in range(count)]


def planted_pair(rng: random.Random, max_size: int = 4, factor_entry: int = 2):
    """(A, B, R, S) with A = RS, B = SR and deliberately zeroed rows/columns."""
    V = IndexSet("V", rng.randint(1, max_size))
    W = IndexSet("W", rng.randint(1, max_size))
    R = [list(r) for r in random_matrix(rng, V, W, factor_entry, 0.3).data]
    S = [list(r) for r in random_matrix(rng, W, V, factor_entry, 0.3).data]
    for _ in range(rng.randint(1, 3)):
        kind = rng.randrange(4)
        if kind == 0:
            i = rng.randrange(V.size)
            R[i] = [0] * W.size
        elif kind == 1:
            j = rng.randrange(V.size)
            for r in S:
                r[j] = 0
        elif kind == 2:
            j = rng.randrange(W.size)
            S[j] = [0] * V.size
        else:
            j = rng.randrange(W.size)
            for r in R:
                r[j] = 0
    Rm = NatMatrix(V, W, tuple(map(tuple, R)))
    Sm = NatMatrix(W, V, tuple(map(tuple, S)))
    return mat_mul(Rm, Sm), mat_mul(Sm, Rm), Rm, Sm


def cyclic_chain(factors: list[NatMatrix], steps: int | None = None) -> SSEChain:
    """Chain from ``F_1 ⋯ F_L`` through its cyclic rotations.

    Step i uses R_i = F_i and S_i = F_{i+1} ⋯ F_L F_1 ⋯ F_{i-1}.
    """
    L = len(factors)
    steps = L - 1 if steps is None else steps

    def prod(fs):
        out = fs[0]
        for F in fs[1:]:
            out = mat_mul(out, F)
        return out

    A = prod(factors)
    out = []
    for i in range(steps):
        rest = factors[i + 1:] + factors[:i]
        out.append((factors[i], prod(rest)))
    R, S = out[-1]
    return SSEChain(A, mat_mul(S, R), tuple(out))


def random_cyclic_chain(rng: random.Random, length: int = 3, max_size: int = 3,
                        factor_entry: int = 2, planted: bool = False,
                        essential_factors: bool = False, max_tries: int = 10_000) -> SSEChain:
    """Chain with essential endpoints.

    ``planted`` forces zero rows/columns in intermediates; ``essential_factors``
    makes every R_i and S_i essential instead.
    """
    if planted and length < 3:
        raise ValueError("planted chains need length >= 3")
    for _ in range(max_tries):
        sizes = [rng.randint(1, max_size) for _ in range(length)]
        sets = [IndexSet("V" if i == 0 else f"U{i}", n) for i, n in enumerate(sizes)]
        factors = []
        for i in range(length):
            rows, cols = sets[i], sets[(i + 1) % length]
            factors.append(random_matrix(rng, rows, cols, factor_entry, 0.35))
        if essential_factors and not all(is_essential(F) for F in factors):
            continue
        if planted:
            # X_i starts with F_i and X_{i+1} ends with F_i
            zero_row = rng.random() < 0.5
            i = rng.randrange(1, length - 1) if zero_row else rng.randrange(0, length - 2)
            F = [list(r) for r in factors[i].data]
            if zero_row:
                F[rng.randrange(len(F))] = [0] * len(F[0])
            else:
                j = rng.randrange(len(F[0]))
                for r in F:
                    r[j] = 0
            factors[i] = NatMatrix(factors[i].rows, factors[i].cols, tuple(map(tuple, F)))
        chain = cyclic_chain(factors)
        W = IndexSet("W", chain.B.rows.size)
        R, S = chain.steps[-1]
        chain = SSEChain(chain.A, chain.B.relabel(W, W),
                         chain.steps[:-1] + ((R.relabel(cols=W), S.relabel(rows=W)),))
        if not (is_essential(chain.A) and is_essential(chain.B)):
            continue
        if max(chain.A.max_entry(), chain.B.max_entry()) > 8:
            continue
        if planted and all(is_essential(X) for X in chain.levels()):
            continue
        return chain
    raise RuntimeError("no chain found within max_tries")


def pad_chain(chain: SSEChain, junk: dict[int, int]) -> SSEChain:
    """Append ``junk[i]`` unused indices to intermediate level ``i``.

    A junk index k at level i gets an ω column in R_i and a zero row in S_i,
    a zero row in R_{i+1} and an ω column in S_{i+1} on non-junk rows.  When
    no R_i or S_i has a zero row or column every product is unchanged under
    cardinal arithmetic; the padded chain is checked either way.
    """
    m = chain.lag
    if any(not 1 <= i < m for i in junk):
        raise ValueError("junk indices go on intermediate levels only")
    old = [chain.A.rows] + [R.cols for R, _ in chain.steps]
    sizes = [s.size for s in old]
    new = [s if junk.get(i, 0) == 0 else IndexSet(s.name + "+", s.size + junk[i])
           for i, s in enumerate(old)]
    steps = []
    for i, (R, S) in enumerate(chain.steps):
        lo, hi = i, i + 1
        Rd = [[R.data[u][k] if (u < sizes[lo] and k < sizes[hi]) else None
               for k in range(new[hi].size)] for u in range(new[lo].size)]
        Sd = [[S.data[k][u] if (k < sizes[hi] and u < sizes[lo]) else None
               for u in range(new[lo].size)] for k in range(new[hi].size)]
        for u in range(new[lo].size):
            for k in range(new[hi].size):
                if Rd[u][k] is None:
                    # junk column of R_i (level hi) is ω on genuine rows; junk rows are zero
                    Rd[u][k] = OMEGA if (k >= sizes[hi] and u < sizes[lo]) else 0
                if Sd[k][u] is None:
                    Sd[k][u] = OMEGA if (u >= sizes[lo] and k < sizes[hi]) else 0
        steps.append((CardMatrix(new[lo], new[hi], tuple(map(tuple, Rd))),
                      CardMatrix(new[hi], new[lo], tuple(map(tuple, Sd)))))
    out = SSEChain(chain.A, chain.B, tuple(steps))
    if not out.verify():
        raise ValueError(f"padding broke the chain: {out.failures()}")
    return out
