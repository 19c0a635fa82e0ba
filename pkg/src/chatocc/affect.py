"""Core geometry of the valence/arousal/dominance affect space.

Values live on one of three fixed interval scales (1..9 situation norms,
-1..1 word norms, 0..1 model output). All cross-set geometry is done on
the unit scale; callers rescale explicitly so unit mismatches stay loud.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Scale",
    "VadTriple",
    "Sign",
    "Octant",
    "NEUTRAL_OCTANT",
    "DistanceMatrix",
    "ScaleMismatchError",
    "rescale",
    "euclidean_distance",
    "distance_matrix",
    "rank_of",
    "octant_of",
    "octant_signature",
    "parse_signature",
    "canonical_octants",
]


class ScaleMismatchError(ValueError):
    """Raised when an operation mixes triples from different scales."""


class Scale(Enum):
    """A closed interval that VAD components are constrained to."""

    ANET_1_9 = "anet_1_9"
    RUSSELL_M1_1 = "russell_m1_1"
    UNIT_0_1 = "unit_0_1"

    @property
    def bounds(self) -> tuple[float, float]:
        return _SCALE_BOUNDS[self]


_SCALE_BOUNDS = {
    Scale.ANET_1_9: (1.0, 9.0),
    Scale.RUSSELL_M1_1: (-1.0, 1.0),
    Scale.UNIT_0_1: (0.0, 1.0),
}


@dataclass(frozen=True)
class VadTriple:
    """A (valence, arousal, dominance) point tagged with its scale."""

    v: float
    a: float
    d: float
    scale: Scale

    def __post_init__(self) -> None:
        lo, hi = self.scale.bounds
        for name, value in (("v", self.v), ("a", self.a), ("d", self.d)):
            if not math.isfinite(value):
                raise ValueError(f"{name}={value!r} is not finite")
            if not lo <= value <= hi:
                raise ValueError(
                    f"{name}={value!r} outside {self.scale.value} bounds [{lo}, {hi}]"
                )

    def components(self) -> tuple[float, float, float]:
        return (self.v, self.a, self.d)


def rescale(t: VadTriple, target: Scale) -> VadTriple:
    """Map a triple onto another scale by the affine interval bijection."""
    if t.scale is target:
        return t
    lo, hi = t.scale.bounds
    tlo, thi = target.bounds
    f = (thi - tlo) / (hi - lo)

    def conv(x: float) -> float:
        return (x - lo) * f + tlo

    return VadTriple(conv(t.v), conv(t.a), conv(t.d), target)


def euclidean_distance(a: VadTriple, b: VadTriple) -> float:
    """Euclidean distance between two triples on the same scale."""
    if a.scale is not b.scale:
        raise ScaleMismatchError(
            f"cannot mix scales {a.scale.value} and {b.scale.value}; rescale first"
        )
    return math.dist(a.components(), b.components())


@dataclass(frozen=True)
class DistanceMatrix:
    """Row-major pairwise distances between two stimulus collections."""

    row_ids: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.row_ids) * len(self.col_labels):
            raise ValueError("cell count does not match row x column dimensions")
        if any(c < 0 for c in self.cells):
            raise ValueError("distances must be non-negative")

    def _row_index(self, row_id: str) -> int:
        try:
            return self.row_ids.index(row_id)
        except ValueError:
            raise KeyError(f"unknown row id {row_id!r}") from None

    def _col_index(self, col_label: str) -> int:
        try:
            return self.col_labels.index(col_label)
        except ValueError:
            raise KeyError(f"unknown column label {col_label!r}") from None

    def cell(self, row_id: str, col_label: str) -> float:
        i = self._row_index(row_id)
        j = self._col_index(col_label)
        return self.cells[i * len(self.col_labels) + j]

    def row(self, row_id: str) -> tuple[float, ...]:
        i = self._row_index(row_id)
        n = len(self.col_labels)
        return self.cells[i * n : (i + 1) * n]


def distance_matrix(
    rows: list[tuple[str, VadTriple]], cols: list[tuple[str, VadTriple]]
) -> DistanceMatrix:
    """Build the full rows-by-columns Euclidean distance matrix."""
    if not rows or not cols:
        raise ValueError("distance matrix needs at least one row and one column")
    row_ids = tuple(rid for rid, _ in rows)
    col_labels = tuple(label for label, _ in cols)
    if len(set(row_ids)) != len(row_ids):
        raise ValueError("duplicate row ids")
    if len(set(col_labels)) != len(col_labels):
        raise ValueError("duplicate column labels")
    cells = tuple(
        euclidean_distance(rt, ct) for _, rt in rows for _, ct in cols
    )
    return DistanceMatrix(row_ids, col_labels, cells)


def rank_of(m: DistanceMatrix, row_id: str, col_label: str) -> int:
    """1-based competition rank of a column within its row, nearest first.

    Ties share the lower rank: the rank is one plus the number of strictly
    closer columns in the same row.
    """
    target = m.cell(row_id, col_label)
    return 1 + sum(1 for c in m.row(row_id) if c < target)


class Sign(Enum):
    MINUS = "minus"
    PLUS = "plus"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class Octant:
    """One of the 8 sign corners of VAD space, or the single neutral state.

    A mixed corner with one neutral axis is not representable: neutrality
    is holistic, so either all three signs are neutral or none is.
    """

    sv: Sign
    sa: Sign
    sd: Sign

    def __post_init__(self) -> None:
        signs = (self.sv, self.sa, self.sd)
        neutral = sum(1 for s in signs if s is Sign.NEUTRAL)
        if neutral not in (0, 3):
            raise ValueError("octant signs must be all neutral or none neutral")

    @property
    def is_neutral(self) -> bool:
        return self.sv is Sign.NEUTRAL


NEUTRAL_OCTANT = Octant(Sign.NEUTRAL, Sign.NEUTRAL, Sign.NEUTRAL)


def octant_of(t: VadTriple, neutral_band: float = 0.1) -> Octant:
    """Classify a unit-scale triple into one of the 9 octant states.

    Components below 0.5 - band map to minus, above 0.5 + band to plus,
    and anything in the band is neutral; one neutral component makes the
    whole octant neutral.
    """
    if t.scale is not Scale.UNIT_0_1:
        raise ScaleMismatchError("octant classification requires the unit scale")
    if not 0 <= neutral_band < 0.5:
        raise ValueError("neutral_band must lie in [0, 0.5)")

    def sign(x: float) -> Sign:
        if x < 0.5 - neutral_band:
            return Sign.MINUS
        if x > 0.5 + neutral_band:
            return Sign.PLUS
        return Sign.NEUTRAL

    signs = tuple(sign(x) for x in t.components())
    if Sign.NEUTRAL in signs:
        return NEUTRAL_OCTANT
    return Octant(*signs)


_SIGN_CHAR = {Sign.MINUS: "-", Sign.PLUS: "+"}


def octant_signature(o: Octant) -> str:
    """Render an octant as "V+A-D-" style text, or "neutral"."""
    if o.is_neutral:
        return "neutral"
    return f"V{_SIGN_CHAR[o.sv]}A{_SIGN_CHAR[o.sa]}D{_SIGN_CHAR[o.sd]}"


def parse_signature(text: str) -> Octant:
    """Inverse of :func:`octant_signature`."""
    s = text.strip()
    if s.lower() == "neutral":
        return NEUTRAL_OCTANT
    if len(s) == 6 and s[0] == "V" and s[2] == "A" and s[4] == "D":
        chars = {"+": Sign.PLUS, "-": Sign.MINUS}
        try:
            return Octant(chars[s[1]], chars[s[3]], chars[s[5]])
        except KeyError:
            pass
    raise ValueError(f"not an octant signature: {text!r}")


def canonical_octants() -> tuple[Octant, ...]:
    """The 8 sign corners (V-major order, plus before minus) then neutral."""
    corners = tuple(
        Octant(sv, sa, sd)
        for sv, sa, sd in itertools.product((Sign.PLUS, Sign.MINUS), repeat=3)
    )
    return corners + (NEUTRAL_OCTANT,)
