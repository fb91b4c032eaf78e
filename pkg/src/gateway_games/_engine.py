"""Vectorised cost kernels shared by the sweep layers.

Distances are small non-negative integers, so per-profile cost terms are
computed in integer numpy arrays and rational comparisons are done on the
scaled form q*term vs p (alpha = p/q).  Whenever p or q is too large for
safe int64 scaling the callers fall back to exact Fraction arithmetic.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

BIG = 1 << 28
SCALE_LIMIT = 1 << 40


def member_matrix(masks: np.ndarray, n: int) -> np.ndarray:
    bits = np.arange(n, dtype=np.int64)
    return (masks[:, None] >> bits[None, :]) & 1 == 1


def _batched(total: int, chunk: int):
    for start in range(0, total, chunk):
        yield start, min(total, start + chunk)


def term_table(dist: np.ndarray, *, maximum: bool, chunk: int = 8192) -> np.ndarray:
    """Per-node distance terms for every profile mask, shape (2^n, n).

    Row 0 is the gateway-free world: plain distance sums (or maxima).  It is
    the reference point for the forbidden sole-gateway close.
    """
    n = dist.shape[0]
    total = 1 << n
    d32 = dist.astype(np.int32)
    out = np.empty((total, n), dtype=np.int32)
    for start, stop in _batched(total, chunk):
        masks = np.arange(start, stop, dtype=np.int64)
        member = member_matrix(masks, n)
        a = np.where(member[:, None, :], d32[None, :, :], BIG).min(axis=2)
        delta = np.minimum(d32[None, :, :], a[:, :, None] + a[:, None, :])
        out[start:stop] = delta.max(axis=2) if maximum else delta.sum(axis=2, dtype=np.int32)
    return out


def term_sums_for_masks(
    dist: np.ndarray, masks: np.ndarray, *, maximum: bool, chunk: int = 4096
) -> np.ndarray:
    """Total distance part of the social cost for each mask, shape (P,)."""
    n = dist.shape[0]
    d32 = dist.astype(np.int32)
    out = np.empty(masks.shape[0], dtype=np.int64)
    for start, stop in _batched(masks.shape[0], chunk):
        member = member_matrix(masks[start:stop], n)
        a = np.where(member[:, None, :], d32[None, :, :], BIG).min(axis=2)
        delta = np.minimum(d32[None, :, :], a[:, :, None] + a[:, None, :])
        if maximum:
            out[start:stop] = delta.max(axis=2).sum(axis=1, dtype=np.int64)
        else:
            out[start:stop] = delta.sum(axis=(1, 2), dtype=np.int64)
    return out


def improving_tables(
    table: np.ndarray, alpha: Fraction
) -> tuple[np.ndarray, np.ndarray]:
    """Boolean (2^n, n) tables of strictly improving opens and closes.

    Sole-gateway closes are excluded (forbidden), mask 0 rows are all False.
    """
    total, n = table.shape
    p, q = alpha.numerator, alpha.denominator
    masks = np.arange(total, dtype=np.int64)
    open_ok = np.zeros((total, n), dtype=bool)
    close_ok = np.zeros((total, n), dtype=bool)
    use_ints = p < SCALE_LIMIT and q < SCALE_LIMIT
    for v in range(n):
        bit = 1 << v
        partner = masks ^ bit
        dv = table[partner, v].astype(np.int64) - table[:, v].astype(np.int64)
        member = (masks & bit) != 0
        valid = masks != 0
        if use_ints:
            open_ok[:, v] = valid & ~member & (q * dv + p < 0)
            close_ok[:, v] = valid & member & (masks != bit) & (q * dv < p)
        else:
            for s in range(1, total):
                if member[s]:
                    if s != bit:
                        close_ok[s, v] = Fraction(int(dv[s])) < alpha
                else:
                    open_ok[s, v] = alpha + int(dv[s]) < 0
    return open_ok, close_ok


def ne_vector(open_ok: np.ndarray, close_ok: np.ndarray) -> np.ndarray:
    total = open_ok.shape[0]
    any_move = open_ok.any(axis=1) | close_ok.any(axis=1)
    valid = np.arange(total, dtype=np.int64) != 0
    return valid & ~any_move


def popcounts(total: int) -> np.ndarray:
    masks = np.arange(total, dtype=np.int64)
    counts = np.zeros(total, dtype=np.int64)
    while masks.any():
        counts += masks & 1
        masks = masks >> 1
    return counts
