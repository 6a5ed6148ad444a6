"""Floating-point transform evaluation, tail bounds, orthogonality and
Q-function probes for Moran sequences.

The measure's transform is the product over levels of rescaled masks; a
truncation keeps the first K factors.  Exact-zero claims never rest on
floats here: whenever a frequency difference hits a mask zero within the
truncation (an exact rational test), the pair is certified orthogonal
outright and the numeric residual only covers the rest.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .moran import (
    MoranSequence,
    EmptyTail,
    PeriodicTail,
    ConsecutiveFamily,
    ShiftedTopFamily,
    check_rbc,
    materialize,
    scale_product,
    sequence_length,
)
from .residue import DigitSet, mask_is_zero_at


class TailBoundUnavailable(RuntimeError):
    """Raised when no summability certificate backs a truncation bound."""


@dataclass(frozen=True)
class TruncationPlan:
    """How deep to truncate the infinite product and over which window."""

    depth: int
    tail_epsilon: float = 0.0
    xi_window: float = 1.0

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("truncation depth must be >= 1")
        if self.tail_epsilon < 0 or self.xi_window <= 0:
            raise ValueError("need tail_epsilon >= 0 and xi_window > 0")


@dataclass(frozen=True)
class QReport:
    xi_samples: Tuple[float, ...]
    q_values: Tuple[float, ...]
    lambda_size: int
    max_deviation_from_one: float


def mask_eval(B: DigitSet, xi) -> complex:
    """(1/#B) * sum_b exp(-2*pi*i*b*xi); modulus never exceeds 1.

    Rational xi goes through exact argument reduction mod 1 before the
    complex exponential, so huge digits lose no precision.
    """
    if isinstance(xi, Fraction):
        total = 0j
        for b in B.elements:
            frac = (b * xi) % 1
            total += cmath.exp(-2j * math.pi * float(frac))
        return total / B.size
    x = float(xi)
    total = 0j
    for b in B.elements:
        total += cmath.exp(-2j * math.pi * math.fmod(b * x, 1.0))
    return total / B.size


def atom_positions(seq: MoranSequence, depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """Flattened atom positions b / (N_1...N_k) for levels 1..depth.

    Positions are computed as exact fractions first and rounded once, so
    top digits far beyond the float range still land on the right atoms.
    """
    pos: List[float] = []
    offsets = [0]
    for k in range(1, depth + 1):
        _, B = materialize(seq, k)
        pk = scale_product(seq, k)
        pos.extend(float(Fraction(b, pk)) for b in B.elements)
        offsets.append(len(pos))
    return np.array(pos, dtype=np.float64), np.array(offsets, dtype=np.int64)


def mu_hat_truncated(seq: MoranSequence, plan: TruncationPlan, xi) -> complex:
    """Depth-K truncation of the transform at a single point.

    Fraction input keeps every factor's argument reduction exact; float
    input follows the same per-level product.
    """
    exact = isinstance(xi, Fraction)
    acc = complex(1.0)
    for k in range(1, plan.depth + 1):
        _, B = materialize(seq, k)
        pk = scale_product(seq, k)
        theta = xi / pk if exact else float(xi) / pk
        acc *= mask_eval(B, theta)
    return acc


def mu_hat_grid(seq: MoranSequence, depth: int, xi: np.ndarray,
                force: Optional[str] = None) -> np.ndarray:
    """Depth-K truncated transform over a float grid (kernel-accelerated)."""
    pos, offsets = atom_positions(seq, depth)
    return kernels.mu_hat_grid(pos, offsets, np.asarray(xi, dtype=np.float64), force=force)


def golden_ratio_samples(n: int, window: float = 1.0) -> Tuple[float, ...]:
    """n low-discrepancy points j*phi mod 1 scaled to [0, window), ascending."""
    phi = (1 + math.sqrt(5)) / 2
    pts = sorted((j * phi) % 1.0 for j in range(1, n + 1))
    return tuple(p * window for p in pts)


def tail_bound(seq: MoranSequence, K: int, W: float) -> float:
    """Upper bound on |mu_hat - mu_hat_K| over |xi| <= W.

    Splits each tail factor into its in-range digit part (controlled by the
    geometric majorant sum_{j>K} (N_j - 1)/(N_{K+1}...N_j) <= 1, telescoped)
    and the out-of-range digit mass (twice the remainder sums).  Requires a
    certified remainder condition; finite sequences give 0 exactly.
    """
    if isinstance(seq.tail, EmptyTail) and K >= len(seq.prefix):
        return 0.0
    rbc = check_rbc(seq, horizon=max(1, K))
    if rbc.status != "holds":
        raise TailBoundUnavailable(
            f"remainder condition is {rbc.status}; no closed-form tail bound"
        )
    first = 2 * math.pi * W / scale_product(seq, K)
    second = 2.0 * float(_overflow_tail_sum(seq, K))
    return first + second


def _overflow_tail_sum(seq: MoranSequence, K: int) -> Fraction:
    # sum_{j > K} #B_{j,2}/#B_j in closed form, given the remainder
    # condition holds for the tail rule
    t = seq.tail
    total = Fraction(0)
    n = sequence_length(seq)
    if n is not None:
        for j in range(K + 1, n + 1):
            N, B = materialize(seq, j)
            total += Fraction(_overflow(N, B), B.size)
        return total
    # explicit part still ahead of K
    for j in range(K + 1, len(seq.prefix) + 1):
        N, B = materialize(seq, j)
        total += Fraction(_overflow(N, B), B.size)
    if isinstance(t, (PeriodicTail, ConsecutiveFamily)):
        return total   # holds-certificate means every period/family term is 0
    assert isinstance(t, ShiftedTopFamily)
    start = max(K, len(seq.prefix)) + 1
    probe = 32
    for j in range(start, start + probe):
        N, B = materialize(seq, j)
        total += Fraction(_overflow(N, B), B.size)
    J = start + probe
    deg = t.M.poly_degree()
    if deg is not None and deg >= 2:
        # at most one overflow digit per level, so the remainder beyond the
        # probe window is at most sum_{j >= J} 1/M_j, bounded by the integral
        # of the decreasing majorant
        a, e, g = t.M.a, t.M.e, t.M.g
        b_adj = t.M.a * t.index_offset + t.M.b
        if a <= 0 or a * (J - 1) + b_adj <= 0:
            raise TailBoundUnavailable("modulus formula not increasing past the probe window")
        integral = Fraction(1, a * (e - 1) * (a * (J - 1) + b_adj) ** (e - 1))
        if g >= 0:
            total += integral
        elif (a * J + b_adj) ** e >= 2 * (-g):
            total += 2 * integral
        else:
            raise TailBoundUnavailable("modulus offset dominates the leading term")
        return total
    if _top_stays_below_scale_from(t, J):
        return total   # every remaining level keeps its digits in range
    raise TailBoundUnavailable("no closed form for the remaining overflow mass")


def _top_stays_below_scale_from(t: ShiftedTopFamily, J: int) -> bool:
    # Exact check that the top digit n_j * M_j - 1 stays below N_j for every
    # level j >= J: integer positivity of a polynomial difference.
    from .intpoly import poly_positive_on_integers_from

    if t.top is None:
        return False
    n_poly = t.top.as_polynomial(t.index_offset)
    m_poly = t.M.as_polynomial(t.index_offset)
    nn_poly = t.N.as_polynomial(t.index_offset)
    if n_poly is None:
        return False
    diff = nn_poly - (n_poly * m_poly - 1)    # N_j - top digit, as a poly in j
    return poly_positive_on_integers_from(diff, J)


def _overflow(N: int, B: DigitSet) -> int:
    return sum(1 for b in B.elements if b < 0 or b >= N)


@dataclass(frozen=True)
class OrthogonalityReport:
    max_abs: float
    violating_pair: Optional[Tuple[Fraction, Fraction]]
    certified_pairs: int
    total_pairs: int


def orthogonality_check(seq: MoranSequence, plan: TruncationPlan,
                        lambdas: Sequence,
                        max_certificate_denominator: int = 8192) -> OrthogonalityReport:
    """Pairwise vanishing of the transform over a finite frequency set.

    A pair is certified exactly orthogonal when its difference, rescaled by
    some partial scale product within the truncation, hits a mask zero (an
    exact rational test; only attempted while the reduced denominator stays
    below the cap, since the test costs O(denominator)).  The reported
    residual is the largest truncated |transform| over the non-certified
    pairs.
    """
    lams = [Fraction(l) for l in lambdas]
    certified = 0
    total = 0
    max_abs = 0.0
    worst: Optional[Tuple[Fraction, Fraction]] = None
    digit_cache = [materialize(seq, k)[1] for k in range(1, plan.depth + 1)]
    prod_cache = [scale_product(seq, k) for k in range(1, plan.depth + 1)]
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            total += 1
            diff = lams[i] - lams[j]
            if any(
                (diff / prod_cache[k]).denominator <= max_certificate_denominator
                and mask_is_zero_at(digit_cache[k], diff / prod_cache[k])
                for k in range(plan.depth)
            ):
                certified += 1
                continue
            val = abs(mu_hat_truncated(seq, plan, diff))
            if val > max_abs:
                max_abs = val
                worst = (lams[i], lams[j])
    return OrthogonalityReport(max_abs, worst, certified, total)


def q_partial(seq: MoranSequence, plan: TruncationPlan, lambdas: Sequence,
              xi_samples: Optional[Sequence[float]] = None,
              force: Optional[str] = None) -> QReport:
    """sum_{lambda} |mu_hat_K(xi + lambda)|^2 over a sample grid.

    An empty frequency set gives identically 0.  Defaults to 64 golden-ratio
    samples over the plan's window (dense-set probing: low-discrepancy
    points stand in for the dense subset on which constancy is checked).
    """
    if xi_samples is None:
        xi_samples = golden_ratio_samples(64, plan.xi_window)
    xs = [float(x) for x in xi_samples]
    if not xs:
        raise ValueError("sample list must be nonempty")
    lams = [float(l) for l in lambdas]
    if not lams:
        qv = tuple(0.0 for _ in xs)
        return QReport(tuple(xs), qv, 0, 1.0)
    grid = np.array([x + l for x in xs for l in lams], dtype=np.float64)
    vals = mu_hat_grid(seq, plan.depth, grid, force=force)
    sq = (vals * vals.conjugate()).real.reshape(len(xs), len(lams))
    q = sq.sum(axis=1)
    dev = float(np.max(np.abs(q - 1.0)))
    return QReport(tuple(xs), tuple(float(v) for v in q), len(lams), dev)
