"""Block-diagonal + small decompositions along quasidiagonalizing subsequences.

Given an operator T whose commutators with a projection family shrink, pick
ranks n_1 < n_2 < ... with ||[T, P_{n_i}]||_u < eps / 2^{i+1}.  Cutting T at
those boundaries splits a window into B + K where B is exactly block diagonal
and K collects the boundary-crossing entries; the geometric budget makes
||K||_u < eps.  Keeping only some blocks of B yields coordinate projections
with small Foelner ratios on very sparse index sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import norms, ops
from .errors import InvalidSpec, NotQuasidiagonalAlongFamily, SelectorOutOfRange, WindowTooSmall

_OFFBLOCK_TOL = 1e-12


def select_subsequence(spec: ops.OperatorSpec, fam: ops.ProjectionFamily,
                       epsilon: float, search_limit: int = 10_000) -> list[int]:
    """Greedy admissible ranks: first n with ||[T, P_n]||_u < eps/2^(i+1).

    Position i counts from 1, so the thresholds eps/4, eps/8, ... sum to a
    ||K|| budget strictly below eps for the decomposition built on top.
    Raises NotQuasidiagonalAlongFamily when no first rank is admissible
    within the search limit.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if search_limit < 1:
        raise ValueError("search_limit must be >= 1")
    picked: list[int] = []
    n = 1
    i = 1
    while n <= search_limit:
        threshold = epsilon / 2 ** (i + 1)
        found = None
        while n <= search_limit:
            if norms.u_norm(spec, fam, n) < threshold:
                found = n
                break
            n += 1
        if found is None:
            break
        picked.append(found)
        i += 1
        n = found + 1
    if not picked:
        raise NotQuasidiagonalAlongFamily(
            f"no rank n <= {search_limit} has ||[T, P_n]||_u < {epsilon / 4}")
    return picked


@dataclass(frozen=True)
class Decomposition:
    """Result of a window split T|_N = B + K along boundary ranks."""

    boundaries: tuple[int, ...]
    window: ops.Window            # the compression the split was taken from
    block_diagonal: ops.Window    # B
    perturbation: ops.Window      # K
    epsilon: float
    k_norm: float                 # ||K||_u
    offblock_residual: float      # max |B_ij| over entries linking distinct blocks
    ok: bool                      # k_norm < epsilon and offblock_residual <= 1e-12


def halmos_decompose(spec: ops.OperatorSpec, boundaries: Sequence[int], N: int,
                     epsilon: float) -> Decomposition:
    """Split the N-window of T into block diagonal B plus boundary residue K.

    K = sum_i (Q_{i+1} T P_{b_i} + P_{b_i} T Q_{i+1}) where Q_{i+1} covers
    (b_i, b_{i+1}] and the final stretch (b_k, N] acts as the last block.
    Boundaries at or beyond N are dropped (their blocks fall outside the
    window).  The decomposition always reconstructs exactly: B + K = T|_N.
    """
    bs = sorted({int(b) for b in boundaries})
    if not bs or bs[0] < 1:
        raise InvalidSpec("boundaries must be positive ranks")
    if N < 1:
        raise ValueError("N must be >= 1")
    bs = [b for b in bs if b < N]
    if not bs:
        raise WindowTooSmall(f"no boundary lies inside the window of dimension {N}")

    W = ops.compress(spec, N).entries
    K = np.zeros_like(W)
    edges = bs + [N]
    for t, b in enumerate(bs):
        q_lo, q_hi = b, edges[t + 1]          # Q_{t+1} covers rows (b, q_hi]
        K[q_lo:q_hi, :b] = W[q_lo:q_hi, :b]
        K[:b, q_lo:q_hi] = W[:b, q_lo:q_hi]
    B = W - K

    # residual coupling between distinct blocks of B (should vanish identically)
    blocks = [(0, edges[0])] + [(edges[t], edges[t + 1]) for t in range(len(edges) - 1)]
    resid = 0.0
    for a0, a1 in blocks:
        for b0, b1 in blocks:
            if (a0, a1) == (b0, b1):
                continue
            piece = B[a0:a1, b0:b1]
            if piece.size:
                resid = max(resid, float(np.max(np.abs(piece))))

    k_norm = norms.seminorm(K, "u")
    return Decomposition(
        boundaries=tuple(bs),
        window=ops.Window(N, W),
        block_diagonal=ops.Window(N, B),
        perturbation=ops.Window(N, K),
        epsilon=float(epsilon),
        k_norm=k_norm,
        offblock_residual=resid,
        ok=(k_norm < epsilon) and (resid <= _OFFBLOCK_TOL),
    )


def sparse_family(boundaries: Sequence[int], selector: Sequence[int] | None = None) -> ops.ProjectionFamily:
    """Blocks family R_n = union of the selected boundary blocks.

    Boundaries b_1 < b_2 < ... cut N into blocks (b_0, b_1], (b_1, b_2], ...
    with b_0 = 0 (a leading 0 may be included explicitly).  The selector picks
    a strictly increasing subsequence of block positions (1-based); omitted it
    keeps every block, which reproduces the contiguous family P_{b_n}.
    """
    bs = [int(b) for b in boundaries]
    if bs and bs[0] == 0:
        bs = bs[1:]
    if not bs or bs[0] < 1 or any(b2 <= b1 for b1, b2 in zip(bs, bs[1:])):
        raise InvalidSpec("boundaries must be strictly increasing positive ranks")
    edges = [0] + bs
    blocks = [(edges[t], edges[t + 1]) for t in range(len(bs))]
    if selector is None:
        chosen = blocks
    else:
        sel = [int(s) for s in selector]
        if not sel or any(s2 <= s1 for s1, s2 in zip(sel, sel[1:])):
            raise SelectorOutOfRange("selector must be strictly increasing")
        if sel[0] < 1 or sel[-1] > len(blocks):
            raise SelectorOutOfRange(
                f"selector touches block {max(sel)} but only {len(blocks)} exist")
        chosen = [blocks[s - 1] for s in sel]
    return ops.ProjectionFamily(kind="blocks", blocks=tuple(chosen))
