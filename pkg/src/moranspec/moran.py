"""Sequence model for scale/digit pairs and the spectrality verdict engine.

A sequence is a finite explicit prefix of (N_k, B_k) pairs plus a tail rule:
empty (finite product), periodic, or one of two parametric families whose
moduli follow a small closed formula grammar in the level index k.  On top of
the model sit the structural condition checks (remainder boundedness,
partial concentration, admissibility, scale divisibility) and the rule-based
engine that turns them into a spectral / not-spectral / unknown verdict.

Certification discipline: statements about all infinitely many levels are
only ever made through symbolic rules (p-series comparisons, residue
periodicity, formula shape); a horizon scan alone never upgrades a verdict.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .intpoly import poly_positive_on_integers_from
from .residue import (
    DigitSet,
    NotCRS,
    is_complete_residue_system,
    mask_is_zero_at,
    satisfies_udz,
)


class OutOfRange(IndexError):
    """Level index outside the materializable range."""


class SequenceError(ValueError):
    """Structurally invalid sequence description."""


class InvalidL(ValueError):
    """Concentration parameter outside (0, 1)."""


# --------------------------------------------------------------------------
# formula grammar: c | [c*]k[+d] | (c*k+d)^e[+g] | [c*]prod[+d]
# ("prod" is the running product N_1 ... N_k; only meaningful for the
# top-digit multiplier of the shifted-top family)
# --------------------------------------------------------------------------

_CONST_RE = re.compile(r"^([+-]?\d+)$")
_AFFINE_RE = re.compile(r"^(?:(\d+)\*)?(k|prod)(?:([+-]\d+))?$")
_POWER_RE = re.compile(r"^\((?:(\d+)\*)?k(?:([+-]\d+))?\)\^(\d+)(?:([+-]\d+))?$")


@dataclass(frozen=True)
class Formula:
    """Integer-valued expression (a*var + b)^e + g with var in {k, prod}.

    A pure constant is encoded with var=None (the value is then b).
    """

    a: int = 0
    b: int = 0
    e: int = 1
    g: int = 0
    var: Optional[str] = None

    def value(self, k: int, prod: Optional[int] = None) -> int:
        if self.var is None:
            return self.b
        if self.var == "prod":
            if prod is None:
                raise ValueError("formula needs the running scale product")
            base = self.a * prod + self.b
        else:
            base = self.a * k + self.b
        return base ** self.e + self.g

    @property
    def is_constant(self) -> bool:
        return self.var is None

    @property
    def uses_product(self) -> bool:
        return self.var == "prod"

    def poly_degree(self) -> Optional[int]:
        """Degree in k, or None when the value depends on the scale product."""
        if self.var is None:
            return 0
        if self.var == "prod":
            return None
        return self.e if self.a != 0 else 0

    def poly_lead(self) -> Optional[int]:
        if self.poly_degree() is None:
            return None
        if self.var is None or self.a == 0:
            return self.value(0) if self.var is None else self.b ** self.e + self.g
        return self.a ** self.e

    def text(self) -> str:
        if self.var is None:
            return str(self.b)
        coef = f"{self.a}*" if self.a != 1 else ""
        off = "" if self.b == 0 else f"{self.b:+d}"
        base = f"{coef}{self.var}{off}"
        if self.e != 1:
            base = f"({base})^{self.e}"
        tail = "" if self.g == 0 else f"{self.g:+d}"
        return base + tail

    def as_polynomial(self, index_offset: int = 0):
        """The value as an integer polynomial in the local level index, or
        None when it depends on the running scale product."""
        from .intpoly import IntPolynomial

        if self.var == "prod":
            return None
        if self.var is None:
            return IntPolynomial([self.b])
        base = IntPolynomial([self.a * index_offset + self.b, self.a])
        out = IntPolynomial([1])
        for _ in range(self.e):
            out = out * base
        return out + self.g


def parse_formula(text: str) -> Formula:
    """Parse a formula string from the closed grammar; raises ValueError."""
    s = text.replace(" ", "")
    m = _CONST_RE.match(s)
    if m:
        return Formula(b=int(m.group(1)))
    m = _AFFINE_RE.match(s)
    if m:
        a = int(m.group(1)) if m.group(1) else 1
        b = int(m.group(3)) if m.group(3) else 0
        return Formula(a=a, b=b, var=m.group(2))
    m = _POWER_RE.match(s)
    if m:
        a = int(m.group(1)) if m.group(1) else 1
        b = int(m.group(2)) if m.group(2) else 0
        e = int(m.group(3))
        g = int(m.group(4)) if m.group(4) else 0
        return Formula(a=a, b=b, e=e, g=g, var="k")
    raise ValueError(f"cannot parse formula {text!r}")


# --------------------------------------------------------------------------
# tail rules and the sequence type
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EmptyTail:
    """No levels beyond the prefix: the product is finite."""


@dataclass(frozen=True)
class PeriodicTail:
    period: Tuple[Tuple[int, DigitSet], ...]


@dataclass(frozen=True)
class ConsecutiveFamily:
    """B_k = {0, ..., M_k - 1} with formula-driven M_k and N_k."""

    M: Formula
    N: Formula
    index_offset: int = 0


@dataclass(frozen=True)
class ShiftedTopFamily:
    """B_k = {0, ..., M_k - 2, n_k * M_k - 1}.

    With top=None the multiplier is n_k = 1 + N_1 N_2 ... N_k, the choice
    that pushes the top digit past every scale and yields an unbounded
    support.
    """

    M: Formula
    N: Formula
    top: Optional[Formula] = None
    index_offset: int = 0
    dropped_scale_product: int = 1


Tail = Union[EmptyTail, PeriodicTail, ConsecutiveFamily, ShiftedTopFamily]


def _check_pair(N: int, B: DigitSet, where: str) -> None:
    if B.modulus != B.size:
        raise SequenceError(f"{where}: modulus {B.modulus} must equal the digit count {B.size}")
    if B.size < 2:
        raise SequenceError(f"{where}: need at least two digits")
    if N < B.size:
        raise SequenceError(f"{where}: scale {N} below digit count {B.size}")


@dataclass(frozen=True)
class MoranSequence:
    """Finite prefix of (N_k, B_k) pairs plus a tail rule.

    Every level must be a complete residue system modulo its digit count,
    either as given or after dividing out a digit factor shared by all
    levels (recorded in digit_scale; rescaling the digits rescales the
    measure and leaves spectrality untouched).
    """

    prefix: Tuple[Tuple[int, DigitSet], ...]
    tail: Tail
    digit_scale: int = 1

    def __post_init__(self):
        explicit = list(self.prefix)
        if isinstance(self.tail, PeriodicTail):
            if not self.tail.period:
                raise SequenceError("periodic tail needs at least one pair")
            explicit += list(self.tail.period)
        for i, (N, B) in enumerate(self.prefix):
            _check_pair(N, B, f"prefix level {i + 1}")
        if isinstance(self.tail, PeriodicTail):
            for i, (N, B) in enumerate(self.tail.period):
                _check_pair(N, B, f"period entry {i + 1}")
        if isinstance(self.tail, (ConsecutiveFamily, ShiftedTopFamily)):
            t = self.tail
            if t.M.uses_product or t.N.uses_product:
                raise SequenceError("family modulus and scale formulas may not use 'prod'")
            first = len(self.prefix) + 1
            m_poly = t.M.as_polynomial(t.index_offset)
            n_poly = t.N.as_polynomial(t.index_offset)
            if not poly_positive_on_integers_from(m_poly - 1, first):
                raise SequenceError("family modulus must stay >= 2 at every level")
            if not poly_positive_on_integers_from(n_poly - m_poly + 1, first):
                raise SequenceError(
                    "family scale must stay >= the modulus at every level "
                    f"(fails for {t.N.text()} vs {t.M.text()})"
                )
            if isinstance(t, ShiftedTopFamily) and t.top is not None:
                top_poly = t.top.as_polynomial(t.index_offset)
                # product-based multipliers are nondecreasing in the level,
                # so the first-level materialization below settles them
                if top_poly is not None and not poly_positive_on_integers_from(top_poly + 1, first):
                    raise SequenceError("family top multiplier must stay >= 0 at every level")
            materialize(self, first)  # belt and braces on the first tail level
        scale = 1
        if explicit and not all(is_complete_residue_system(B) for _, B in explicit):
            if isinstance(self.tail, (ConsecutiveFamily, ShiftedTopFamily)):
                raise NotCRS(
                    "explicit levels are not complete residue systems and the "
                    "family tail (which contains the digit 1) rules out a "
                    "common digit factor"
                )
            g = 0
            for _, B in explicit:
                for b in B.elements:
                    g = math.gcd(g, b)
            if g < 2:
                raise NotCRS("some level is not a complete residue system")
            rescaled = [B.scaled_down(g) for _, B in explicit]
            if not all(is_complete_residue_system(B) for B in rescaled):
                raise NotCRS(
                    "levels are not complete residue systems, even after "
                    f"dividing out the common digit factor {g}"
                )
            scale = g
        object.__setattr__(self, "digit_scale", scale)

    @staticmethod
    def of(prefix, tail: Tail) -> "MoranSequence":
        pre = tuple((int(N), B if isinstance(B, DigitSet) else DigitSet.of(B)) for N, B in prefix)
        return MoranSequence(pre, tail)


def periodic(pairs) -> MoranSequence:
    """Convenience constructor: no prefix, the given pairs repeat forever."""
    period = tuple((int(N), B if isinstance(B, DigitSet) else DigitSet.of(B)) for N, B in pairs)
    return MoranSequence((), PeriodicTail(period))


def scale_at(seq: MoranSequence, k: int) -> int:
    """N_k without building the digit set."""
    if k < 1:
        raise OutOfRange(f"level index {k} must be >= 1")
    if k <= len(seq.prefix):
        return seq.prefix[k - 1][0]
    t = seq.tail
    j = k - len(seq.prefix)
    if isinstance(t, EmptyTail):
        raise OutOfRange(f"level {k} beyond the {len(seq.prefix)}-level finite sequence")
    if isinstance(t, PeriodicTail):
        return t.period[(j - 1) % len(t.period)][0]
    return t.N.value(k + t.index_offset)


def scale_product(seq: MoranSequence, k: int) -> int:
    """N_1 N_2 ... N_k (empty product 1 for k = 0)."""
    out = 1
    for j in range(1, k + 1):
        out *= scale_at(seq, j)
    return out


def materialize(seq: MoranSequence, k: int) -> Tuple[int, DigitSet]:
    """The k-th pair (N_k, B_k), 1-indexed."""
    if k < 1:
        raise OutOfRange(f"level index {k} must be >= 1")
    if k <= len(seq.prefix):
        return seq.prefix[k - 1]
    t = seq.tail
    j = k - len(seq.prefix)
    if isinstance(t, EmptyTail):
        raise OutOfRange(f"level {k} beyond the {len(seq.prefix)}-level finite sequence")
    if isinstance(t, PeriodicTail):
        return t.period[(j - 1) % len(t.period)]
    kk = k + t.index_offset
    M = t.M.value(kk)
    N = t.N.value(kk)
    if M < 2 or N < M:
        raise SequenceError(f"family level {k}: need N_k >= M_k >= 2, got N={N}, M={M}")
    if isinstance(t, ConsecutiveFamily):
        return N, DigitSet.of(range(M))
    if t.top is None:
        n = 1 + t.dropped_scale_product * scale_product(seq, k)
    else:
        n = t.top.value(kk)
    if n < 0:
        raise SequenceError(f"family level {k}: top multiplier {n} is negative")
    return N, DigitSet.of(list(range(M - 1)) + [n * M - 1])


def sequence_length(seq: MoranSequence) -> Optional[int]:
    """Number of levels, or None for an infinite sequence."""
    return len(seq.prefix) if isinstance(seq.tail, EmptyTail) else None


def _bump_family(tail: Tail, first_scale: int) -> Tail:
    if isinstance(tail, ConsecutiveFamily):
        return ConsecutiveFamily(tail.M, tail.N, tail.index_offset + 1)
    if isinstance(tail, ShiftedTopFamily):
        return ShiftedTopFamily(
            tail.M, tail.N, tail.top, tail.index_offset + 1,
            tail.dropped_scale_product * first_scale,
        )
    return tail


def shift(seq: MoranSequence, k: int) -> MoranSequence:
    """Drop the first k pairs: the sequence generating the tail measure."""
    if k < 0:
        raise OutOfRange("shift distance must be nonnegative")
    out = seq
    for _ in range(k):
        n1 = scale_at(out, 1)  # raises OutOfRange past the end
        if out.prefix:
            out = MoranSequence(out.prefix[1:], _bump_family(out.tail, n1))
        elif isinstance(out.tail, PeriodicTail):
            p = out.tail.period
            out = MoranSequence((), PeriodicTail(p[1:] + p[:1]))
        else:
            out = MoranSequence((), _bump_family(out.tail, n1))
    return out


def normalized_digits(seq: MoranSequence, k: int) -> DigitSet:
    """B_k divided by the sequence-wide digit factor (a complete residue system)."""
    _, B = materialize(seq, k)
    return B if seq.digit_scale == 1 else B.scaled_down(seq.digit_scale)


def normalized_sequence(seq: MoranSequence) -> MoranSequence:
    """The digit-rescaled sequence the verdict engine reasons about."""
    if seq.digit_scale == 1:
        return seq
    g = seq.digit_scale
    pre = tuple((N, B.scaled_down(g)) for N, B in seq.prefix)
    tail = seq.tail
    if isinstance(tail, PeriodicTail):
        tail = PeriodicTail(tuple((N, B.scaled_down(g)) for N, B in tail.period))
    return MoranSequence(pre, tail)


# --------------------------------------------------------------------------
# remainder bounded condition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RbcReport:
    status: str                 # "holds" | "fails" | "unknown"
    partial_sum: Fraction
    certificate: str


def _overflow_count(N: int, B: DigitSet) -> int:
    return sum(1 for b in B.elements if b < 0 or b >= N)


def _eventually_top_below_scale(t: ShiftedTopFamily) -> bool:
    # top digit n*M - 1 < N for all large k, decided from formula shape
    if t.top is None:
        return False
    dt, dM, dN = t.top.poly_degree(), t.M.poly_degree(), t.N.poly_degree()
    if dt is None or dM is None or dN is None:
        return False
    lt = t.top.poly_lead() * t.M.poly_lead()
    d_top = dt + dM
    if d_top < dN:
        return True
    return d_top == dN and lt < t.N.poly_lead()


def check_rbc(seq: MoranSequence, horizon: int) -> RbcReport:
    """Classify sum_k #B_{k,2} / #B_k, with an exact partial sum up to the horizon.

    B_{k,2} collects the digits outside [0, N_k - 1].  The status comes from
    the tail rule alone: periodic overflow repeats forever (diverges), a
    modulus formula of degree >= 2 gives a convergent p-series majorant, and
    anything the rule base cannot certify stays unknown.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    partial = Fraction(0)
    for k in range(1, horizon + 1):
        try:
            N, B = materialize(seq, k)
        except OutOfRange:
            break
        partial += Fraction(_overflow_count(N, B), B.size)
    t = seq.tail
    if isinstance(t, EmptyTail):
        return RbcReport("holds", partial, "finite sequence: the sum has finitely many terms")
    if isinstance(t, PeriodicTail):
        bad = [(N, B) for N, B in t.period if _overflow_count(N, B)]
        if bad:
            N, B = bad[0]
            tk = Fraction(_overflow_count(N, B), B.size)
            return RbcReport(
                "fails", partial,
                f"period entry with scale {N} keeps {tk} of its digit mass outside "
                f"[0, {N - 1}] at infinitely many levels",
            )
        return RbcReport("holds", partial, "every period entry keeps its digits inside [0, N-1]")
    if isinstance(t, ConsecutiveFamily):
        return RbcReport("holds", partial, "consecutive digits always stay below the scale")
    deg = t.M.poly_degree()
    if deg is not None and deg >= 2:
        return RbcReport(
            "holds", partial,
            f"at most one overflow digit per level and the modulus grows like "
            f"k^{deg}, so the sum is dominated by a convergent p-series",
        )
    if _eventually_top_below_scale(t):
        return RbcReport("holds", partial, "the top digit falls below the scale for all large k")
    return RbcReport("unknown", partial, "no summability rule applies to this tail")


# --------------------------------------------------------------------------
# partial concentration condition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PccReport:
    status: str                 # "holds" | "unknown"
    rule: str                   # "concentration" | "narrow-support" | "overflow-summable" | ""
    constant: Optional[Fraction]
    detail: str


def _window_ratio(N: int, B: DigitSet, l: Fraction) -> Fraction:
    lo = math.ceil(l * N / 2)
    hi = math.floor((1 - l / 2) * N)
    return Fraction(sum(1 for b in B.elements if lo <= b <= hi), B.size)


def _pcc_full_scale_family(seq: MoranSequence, t, l: Fraction) -> Optional[PccReport]:
    # M_k == N_k: the digit block {0..M-2} covers a (1-l) fraction of the
    # central window up to boundary losses of 2/M_k, so once M_k >= 4/(1-l)
    # the ratio stays above (1-l)/2; earlier levels are checked exactly
    f = t.M
    first = len(seq.prefix) + 1
    if f.is_constant or f.a < 0 or f.a * (first + t.index_offset) + f.b < 0:
        return None    # need a nondecreasing modulus for the uniform bound
    need = math.ceil(4 / (1 - l))
    k0 = first
    while f.value(k0 + t.index_offset) < need:
        k0 += 1
        if k0 - first > 256:
            return None
    ratios = [_window_ratio(*materialize(seq, k), l) for k in range(1, k0 + 1)]
    if not all(r > 0 for r in ratios):
        return None
    c = min(min(ratios), (1 - l) / 2) if ratios else (1 - l) / 2
    return PccReport(
        "holds", "concentration", c,
        "the scale equals the modulus, so the digit block fills the central "
        "window up to boundary terms; early levels checked exactly",
    )


def check_pcc(seq: MoranSequence, l, horizon: int = 32) -> PccReport:
    """Try to certify the concentration condition at parameter l.

    First attempts the mass-in-a-central-window route (uniform ratio over
    periodic tails), then the narrow-interval route where everything outside
    a width-< l window is summable.  Families fall back to the same p-series
    rules as the remainder check.  Certification failures report unknown,
    never a guess.
    """
    l = Fraction(l)
    if not 0 < l < 1:
        raise InvalidL(f"concentration parameter must lie in (0, 1), got {l}")
    t = seq.tail
    if isinstance(t, EmptyTail):
        return PccReport("holds", "narrow-support", None,
                         "finite sequence: every tail sum is finite")
    if isinstance(t, (ConsecutiveFamily, ShiftedTopFamily)) and t.M == t.N:
        report = _pcc_full_scale_family(seq, t, l)
        if report is not None:
            return report
    explicit = list(seq.prefix)
    if isinstance(t, PeriodicTail):
        explicit += list(t.period)
    if isinstance(t, PeriodicTail):
        ratios = [_window_ratio(N, B, l) for N, B in explicit]
        c = min(ratios) if ratios else Fraction(0)
        if c > 0:
            return PccReport(
                "holds", "concentration", c,
                f"every level keeps at least {c} of its digit mass inside the "
                f"central window [l*N/2, (1-l/2)*N]",
            )
        if isinstance(t, PeriodicTail):
            ok = all(
                all(0 <= b <= N - 1 for b in B.elements)
                and Fraction(max(B.elements) - min(B.elements), N) < l
                for N, B in t.period
            )
            if ok:
                return PccReport(
                    "holds", "narrow-support", None,
                    "every period entry fits inside an interval of relative width < l, "
                    "so nothing is left outside",
                )
        return PccReport("unknown", "", None, "no concentration rule applies")
    if isinstance(t, ConsecutiveFamily):
        degM, degN = t.M.poly_degree(), t.N.poly_degree()
        narrow = degM < degN or (degM == degN and Fraction(t.M.poly_lead(), t.N.poly_lead()) < l)
        recent = all(
            Fraction(materialize(seq, k)[1].elements[-1], scale_at(seq, k)) < l
            for k in range(len(seq.prefix) + 1, len(seq.prefix) + 1 + min(horizon, 8))
        )
        if narrow and recent:
            return PccReport(
                "holds", "narrow-support", None,
                "consecutive digits fit inside a window of relative width < l eventually",
            )
        return PccReport("unknown", "", None, "no concentration rule applies")
    # shifted-top family: consecutive part in a narrow window, summable top overflow
    degM = t.M.poly_degree()
    degN = t.N.poly_degree()
    if degM is not None and degM >= 2 and (
        degM < degN or (degM == degN and Fraction(t.M.poly_lead(), t.N.poly_lead()) < l)
    ):
        first = len(seq.prefix) + 1
        recent = all(
            Fraction(t.M.value(k + t.index_offset) - 2, scale_at(seq, k)) < l
            for k in range(first, first + min(horizon, 8))
        )
        if recent:
            return PccReport(
                "holds", "overflow-summable", None,
                "all digits but the top one fit inside a window of relative width < l, "
                "and the leftover mass 1/M_k sums to a convergent p-series",
            )
    return PccReport("unknown", "", None, "no concentration rule applies")


# --------------------------------------------------------------------------
# admissible pairs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HadamardTriple:
    """Scale, digit set and frequency set making the exponential matrix unitary.

    Instances come from find_hadamard_L (search) or structural_hadamard_L
    (complete residue system with M | N), both of which guarantee the
    pairwise mask-vanishing that unitarity is equivalent to; verify() recheck
    is exact but quadratic in the digit count.
    """

    N: int
    B: DigitSet
    L: Tuple[int, ...]

    def verify(self) -> bool:
        if len(self.L) != self.B.size:
            return False
        return all(
            mask_is_zero_at(self.B, Fraction(l2 - l1, self.N))
            for i, l1 in enumerate(self.L)
            for l2 in self.L[i + 1:]
        )


def find_hadamard_L(N: int, B: DigitSet) -> Optional[HadamardTriple]:
    """Search {0, ..., N-1} for a frequency set of full size containing 0.

    The difference graph has an edge between l and l' exactly when the mask
    of B vanishes at (l - l')/N; a valid frequency set is a clique of size
    #B.  Depth-first search in increasing vertex order returns the
    lexicographically smallest clique, or None when the pair is not
    admissible within the canonical residue window.
    """
    M = B.size
    if not N >= M >= 2:
        raise ValueError(f"need N >= #B >= 2, got N={N}, #B={M}")
    zero = _difference_zeros(N, B)
    chosen = [0]

    def extend(start: int) -> bool:
        if len(chosen) == M:
            return True
        for v in range(start, N):
            if N - v < M - len(chosen):
                return False
            if all(zero[v - u] for u in chosen):
                chosen.append(v)
                if extend(v + 1):
                    return True
                chosen.pop()
        return False

    if extend(1):
        return HadamardTriple(N, B, tuple(chosen))
    return None


def _difference_zeros(N: int, B: DigitSet) -> List[bool]:
    zero = [False] * N
    for d in range(1, N // 2 + 1):
        zero[d] = mask_is_zero_at(B, Fraction(d, N))
        zero[N - d] = zero[d]
    zero[0] = False
    return zero


def largest_orthogonal_frequencies(N: int, B: DigitSet) -> Tuple[int, ...]:
    """Largest mutually-orthogonal frequency set containing 0 (best effort).

    Used when no full Hadamard frequency set exists; ties break
    lexicographically.  Exponential worst case, intended for small N.
    """
    zero = _difference_zeros(N, B)
    best: List[int] = [0]
    chosen = [0]

    def extend(start: int) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (N - start) <= len(best):
            return
        for v in range(start, N):
            if all(zero[v - u] for u in chosen):
                chosen.append(v)
                extend(v + 1)
                chosen.pop()

    extend(1)
    return tuple(best)


def structural_hadamard_L(N: int, M: int) -> Tuple[int, ...]:
    """(N/M) * {0, ..., M-1}: a frequency set for any complete residue system
    with M | N (the mask vanishes at every j/M)."""
    if M < 2 or N % M:
        raise ValueError(f"need M >= 2 dividing N, got N={N}, M={M}")
    step = N // M
    return tuple(step * j for j in range(M))


# --------------------------------------------------------------------------
# scale divisibility
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DivisibilityProfile:
    per_level: Tuple[bool, ...]
    symbolic: str               # "all" | "some_fail" | "unknown"
    first_failure: Optional[int]


_SCAN_HORIZON = 512


def _family_divisibility(t, first_k: int) -> Tuple[str, Optional[int]]:
    Mf, Nf = t.M, t.N
    off = t.index_offset

    def divides(k: int) -> bool:
        return Nf.value(k + off) % Mf.value(k + off) == 0

    if Mf.is_constant:
        c = Mf.value(0)
        window = range(first_k, first_k + c)
        bad = [k for k in window if not divides(k)]
        if bad:
            return "some_fail", bad[0]
        return "all", None     # N_k mod c is periodic in k with period c
    if Nf.var == "k" and Mf.var == "k" and (Mf.a, Mf.b) == (Nf.a, Nf.b) and Mf.g == 0:
        if Nf.g == 0 and Nf.e >= Mf.e:
            return "all", None
        # base^eM | base^eN + g forces base^eM | g (or a power drop):
        # scan upward, guaranteed to terminate once the modulus outgrows |g|
        k = first_k
        while True:
            if not divides(k):
                return "some_fail", k
            if Mf.value(k + off) > abs(Nf.g) and Nf.e >= Mf.e:
                return "all", None  # unreachable: divisibility would have failed
            k += 1
            if k > first_k + 100000:
                return "unknown", None
    for k in range(first_k, first_k + _SCAN_HORIZON):
        if not divides(k):
            return "some_fail", k
    return "unknown", None


def _divisibility_from(seq: MoranSequence, start: int) -> Tuple[str, Optional[int]]:
    for k in range(start, len(seq.prefix) + 1):
        N, B = seq.prefix[k - 1]
        if N % B.size:
            return "some_fail", k
    t = seq.tail
    if isinstance(t, EmptyTail):
        return "all", None
    if isinstance(t, PeriodicTail):
        base = max(start, len(seq.prefix) + 1)
        for k in range(base, base + len(t.period)):
            N, B = materialize(seq, k)
            if N % B.size:
                return "some_fail", k
        return "all", None
    return _family_divisibility(t, max(start, len(seq.prefix) + 1))


def divisibility_profile(seq: MoranSequence, horizon: int) -> DivisibilityProfile:
    """Per-level M_k | N_k facts plus a symbolic all-levels verdict."""
    per = []
    for k in range(1, horizon + 1):
        try:
            N, B = materialize(seq, k)
        except OutOfRange:
            break
        per.append(N % B.size == 0)
    symbolic, k0 = _divisibility_from(seq, 1)
    return DivisibilityProfile(tuple(per), symbolic, k0)


# --------------------------------------------------------------------------
# verdict engine
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    outcome: str                # "spectral" | "not_spectral" | "unknown"
    rule: str
    checked_preconditions: Tuple[Tuple[str, bool], ...]
    notes: str


def _shape_of(B: DigitSet):
    # translation-invariant: a contiguous run, or a run of M-1 digits plus a
    # top digit completing the residue system
    e = B.elements
    M = B.size
    if e == tuple(range(e[0], e[0] + M)):
        return "consecutive", 1
    if e[:-1] == tuple(range(e[0], e[0] + M - 1)) and (e[-1] - e[0] + 1) % M == 0:
        n = (e[-1] - e[0] + 1) // M
        if n >= 1:
            return "shifted_top", n
    return "other", None


def _explicit_pairs(seq: MoranSequence) -> List[Tuple[int, int, DigitSet]]:
    out = [(k + 1, N, B) for k, (N, B) in enumerate(seq.prefix)]
    if isinstance(seq.tail, PeriodicTail):
        base = len(seq.prefix)
        out += [(base + 1 + i, N, B) for i, (N, B) in enumerate(seq.tail.period)]
    return out


def _family_all_odd_modulus(t) -> bool:
    # M_k mod 2 is periodic in k with period 2, so two samples decide it
    f = t.M
    if f.is_constant:
        return f.value(0) % 2 == 1
    return all(f.value(k + t.index_offset) % 2 == 1 for k in range(1, 3))


def _formula_value_floor(f: Formula, first_k: int) -> Optional[int]:
    # smallest value over k >= first_k, when monotonicity is structural
    if f.is_constant:
        return f.value(0)
    if f.var == "prod":
        return None
    if f.a >= 0 and f.a * first_k + f.b >= 0:
        return f.value(first_k)   # nondecreasing from first_k on
    return None


def _gcd_condition_certified(t: ShiftedTopFamily) -> bool:
    # gcd(n*M - 1, M - 2) = gcd(2n - 1, M - 2); for constant n, p | 2n-1
    # divides M_k - 2 periodically in k mod p, so a finite residue check
    # certifies coprimality for every level at once
    if t.top is None or not t.top.is_constant:
        return False
    n = t.top.value(0)
    q = 2 * n - 1
    qq = abs(q)
    if qq == 1:
        return True
    factors = set()
    d = 2
    while d * d <= qq:
        if qq % d == 0:
            factors.add(d)
            while qq % d == 0:
                qq //= d
        d += 1
    if qq > 1:
        factors.add(qq)
    for p in factors:
        for r in range(p):
            if (t.M.value(r) - 2) % p == 0:
                return False
    return True


def _udz_structural_shifted_top(M: int, n: int) -> Optional[bool]:
    # sufficient branches from the root analysis of the padded digit
    # polynomial 1 + x + ... + x^(M-2) + x^(M-1+nM); None = undecided here
    if n == 1:
        return True
    if M in (3, 4):
        return True
    if M % 2 == 1:
        return True
    if M >= 5 and math.gcd(n * M - 1, M - 2) == 1:
        return True
    return None


_EXACT_UDZ_DEGREE_CAP = 4000


def _udz_all(seq: MoranSequence):
    """(verdict, witness_level, witness_angle): True / False / None=undecided."""
    witness_level = witness_angle = None
    for k, N, B in _explicit_pairs(seq):
        shape, n = _shape_of(B)
        if shape == "consecutive":
            continue
        if shape == "shifted_top" and _udz_structural_shifted_top(B.size, n):
            continue
        if B.elements[-1] - B.elements[0] > _EXACT_UDZ_DEGREE_CAP:
            return None, k, None
        ok, angle = satisfies_udz(B)
        if not ok:
            return False, k, angle
    t = seq.tail
    if isinstance(t, ShiftedTopFamily):
        if _family_all_odd_modulus(t):
            return True, None, None
        if t.M.is_constant and t.M.value(0) in (3, 4):
            return True, None, None
        if _gcd_condition_certified(t):
            return True, None, None
        return None, None, None
    return True, None, None


def _admissible_beyond_first(seq: MoranSequence, cap: int = 4096):
    """True / False / None: every level from 2 on is an admissible pair."""
    for k, N, B in _explicit_pairs(seq):
        if k == 1 and k <= len(seq.prefix):
            # A prefix first level occurs only once; its admissibility is
            # immaterial because the first scale can be replaced freely.
            continue
        if N > cap:
            return None
        if find_hadamard_L(N, B) is None:
            return False
    t = seq.tail
    if isinstance(t, (ConsecutiveFamily, ShiftedTopFamily)):
        verdict, _ = _family_divisibility(t, len(seq.prefix) + 1)
        if verdict == "all":
            return True    # residue system with M | N carries (N/M)*{0..M-1}
        return False if verdict == "some_fail" else None
    return True


def _pcc_subsequence(seq: MoranSequence) -> Optional[bool]:
    """Certified existence of a subsequence satisfying concentration."""
    t = seq.tail
    if isinstance(t, PeriodicTail):
        for N, B in t.period:
            if all(0 <= b <= N - 1 for b in B.elements):
                return True     # narrow-interval route on a constant subsequence
            if any(0 < b < N for b in B.elements):
                return True     # central-window route on a constant subsequence
        return None
    if isinstance(t, ConsecutiveFamily):
        return True             # window route when M/N >= 1/2, narrow route otherwise
    if isinstance(t, ShiftedTopFamily):
        deg = t.M.poly_degree()
        if deg is not None and deg >= 2:
            return True         # dichotomy with the summable overflow digit
        return None
    return None


def _fmt_notes(parts: List[str]) -> str:
    return "; ".join(p for p in parts if p)


def decide_spectrality(seq: MoranSequence) -> Verdict:
    """Apply the rule base in priority order and report the verdict.

    Rules, most specific first: the consecutive-digit equivalence, the
    shifted-top family equivalence, the discrete-zero divisibility
    obstruction (necessary direction), and the admissible-product
    sufficiency.  Verdicts never rest on horizon scans alone; when no rule's
    preconditions are certified the outcome is unknown, with the failure
    points recorded in the notes.  The first scale N_1 never influences the
    outcome (rescaling the measure absorbs it).
    """
    notes: List[str] = []
    if isinstance(seq.tail, EmptyTail):
        return Verdict(
            "unknown", "", (),
            "finite product: the rule base addresses infinite convolutions only",
        )
    if seq.digit_scale > 1:
        notes.append(
            f"all digits share the factor {seq.digit_scale}; the verdict is computed "
            "for the rescaled digits (rescaling the measure preserves spectrality)"
        )
    nseq = normalized_sequence(seq)
    attempted: List[str] = []

    shapes = [(_shape_of(B), k) for k, _, B in _explicit_pairs(nseq)]
    if any(
        B.b_star != 0 and _shape_of(B)[0] in ("consecutive", "shifted_top")
        for _, _, B in _explicit_pairs(nseq)
    ):
        notes.append(
            "some digit blocks are translated; per-level translations shift "
            "the measure by an absolutely convergent series and preserve "
            "spectrality, so shapes are matched up to translation"
        )
    tail = nseq.tail
    # a multiplier of 1 gives literally consecutive digits; 0 gives their
    # translate by -1, which generates a translated (hence equivalent) measure
    tail_consecutive = isinstance(tail, ConsecutiveFamily) or (
        isinstance(tail, ShiftedTopFamily) and tail.top is not None
        and tail.top.is_constant and tail.top.value(0) in (0, 1)
    )
    tail_shifted = isinstance(tail, (ConsecutiveFamily, ShiftedTopFamily))

    # consecutive-digit equivalence: spectral iff M_k | N_k for all k >= 2
    all_consecutive = all(s[0] == "consecutive" for s, _ in shapes) and (
        isinstance(tail, PeriodicTail) or tail_consecutive
    )
    if all_consecutive:
        verdict, k0 = _divisibility_from(nseq, 2)
        if verdict == "all":
            return Verdict(
                "spectral", "consecutive-divisibility",
                (("every_digit_set_consecutive", True),
                 ("modulus_divides_scale_from_level_2", True)),
                _fmt_notes(notes),
            )
        if verdict == "some_fail":
            return Verdict(
                "not_spectral", "consecutive-divisibility",
                (("every_digit_set_consecutive", True),
                 (f"modulus_does_not_divide_scale_at_level_{k0}", True)),
                _fmt_notes(notes),
            )
        attempted.append("consecutive-divisibility: tail divisibility undecided")
    else:
        attempted.append("consecutive-divisibility: a digit set is not consecutive")

    # shifted-top family equivalence
    all_shifted = all(s[0] in ("consecutive", "shifted_top") for s, _ in shapes) and tail_shifted
    if all_shifted:
        reasons = []
        floor3 = all(B.size >= 3 for _, _, B in _explicit_pairs(nseq))
        if isinstance(tail, (ConsecutiveFamily, ShiftedTopFamily)):
            fl = _formula_value_floor(tail.M, len(nseq.prefix) + 1 + tail.index_offset)
            floor3 = floor3 and fl is not None and fl >= 3
        if not floor3:
            reasons.append("some modulus is below 3")
        degM = tail.M.poly_degree()
        summable = degM is not None and degM >= 2
        if not summable:
            reasons.append("sum of 1/M_k not certified finite")
        gcd_ok = True
        for _, _, B in _explicit_pairs(nseq):
            shape, n = _shape_of(B)
            M = B.size
            if shape == "shifted_top" and M % 2 == 0 and M >= 5:
                gcd_ok = gcd_ok and math.gcd(n * M - 1, M - 2) == 1
        if isinstance(tail, ShiftedTopFamily) and not tail_consecutive:
            if not _family_all_odd_modulus(tail):
                if _gcd_condition_certified(tail):
                    notes.append(
                        "even moduli appear in the family; the coprimality side "
                        "condition was certified by residue classes"
                    )
                else:
                    gcd_ok = False
        if not gcd_ok:
            reasons.append("coprimality condition for even moduli not certified")
        if not reasons:
            verdict, k0 = _divisibility_from(nseq, 2)
            if verdict == "all":
                return Verdict(
                    "spectral", "shifted-top-family",
                    (("every_digit_set_shifted_top", True),
                     ("modulus_floor_3", True),
                     ("inverse_modulus_sum_finite", True),
                     ("even_modulus_coprimality", True),
                     ("modulus_divides_scale_from_level_2", True)),
                    _fmt_notes(notes),
                )
            if verdict == "some_fail":
                return Verdict(
                    "not_spectral", "shifted-top-family",
                    (("every_digit_set_shifted_top", True),
                     ("modulus_floor_3", True),
                     ("inverse_modulus_sum_finite", True),
                     ("even_modulus_coprimality", True),
                     (f"modulus_does_not_divide_scale_at_level_{k0}", True)),
                    _fmt_notes(notes),
                )
            reasons.append("tail divisibility undecided")
        attempted.append("shifted-top-family: " + "; ".join(reasons))
    elif not tail_shifted:
        attempted.append(
            "shifted-top-family: the tail is not a parametric family "
            "(a periodic tail cannot have a finite sum of 1/M_k)"
        )
    else:
        attempted.append("shifted-top-family: a digit set is outside the shifted-top shape")

    # discrete-zero obstruction (necessary direction, contrapositive)
    udz, wk, wangle = _udz_all(nseq)
    rbc = check_rbc(nseq, horizon=8)
    div2, k0 = _divisibility_from(nseq, 2)
    if udz is True and rbc.status == "holds" and div2 == "some_fail":
        return Verdict(
            "not_spectral", "discrete-zero-obstruction",
            (("uniform_discrete_zero_at_every_level", True),
             ("remainder_sum_bounded", True),
             (f"modulus_does_not_divide_scale_at_level_{k0}", True)),
            _fmt_notes(notes),
        )
    if udz is False:
        attempted.append(
            f"discrete-zero-obstruction: level {wk} violates the uniform discrete "
            f"zero condition" + (f" at angle {wangle}" if wangle is not None else "")
        )
    elif udz is None:
        attempted.append("discrete-zero-obstruction: discrete zero condition undecided for some level")
    elif rbc.status != "holds":
        attempted.append(f"discrete-zero-obstruction: remainder condition {rbc.status}")
    else:
        attempted.append("discrete-zero-obstruction: no divisibility failure found")

    # admissible-product sufficiency
    adm = _admissible_beyond_first(nseq)
    pcc = _pcc_subsequence(nseq)
    if adm is True and rbc.status == "holds" and pcc is True:
        return Verdict(
            "spectral", "admissible-product-sufficiency",
            (("every_level_admissible_beyond_first", True),
             ("remainder_sum_bounded", True),
             ("concentration_on_a_subsequence", True)),
            _fmt_notes(notes),
        )
    if adm is not True:
        attempted.append(
            "admissible-product-sufficiency: admissibility "
            + ("fails" if adm is False else "undecided")
        )
    if rbc.status != "holds":
        attempted.append(f"admissible-product-sufficiency: remainder condition {rbc.status}")
    if pcc is not True:
        attempted.append("admissible-product-sufficiency: concentration not certified")

    notes.append("rules attempted: " + " | ".join(attempted))
    return Verdict("unknown", "", (), _fmt_notes(notes))
