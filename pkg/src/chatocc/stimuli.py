"""Stimulus datasets: embedded table fixtures, CSV ingestion, reliability selection."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .affect import Scale, VadTriple
from .occ import EmotionLabel

__all__ = [
    "SdTriple",
    "Stimulus",
    "Dataset",
    "PredictionRecord",
    "MappingRow",
    "OctantRow",
    "ElicitationCase",
    "FixtureBundle",
    "StimulusCsvError",
    "reliability_score",
    "select_most_reliable",
    "load_dataset_csv",
    "serialize_dataset_csv",
    "fixtures",
]


class StimulusCsvError(ValueError):
    """Malformed dataset CSV; the message names the offending data row."""


@dataclass(frozen=True)
class SdTriple:
    """Per-dimension standard deviations; not bound to scale limits."""

    v: float
    a: float
    d: float

    def __post_init__(self) -> None:
        if min(self.v, self.a, self.d) < 0:
            raise ValueError("standard deviations must be non-negative")


@dataclass(frozen=True)
class Stimulus:
    id: str
    kind: str  # "situation" | "word"
    text: str
    ground_truth: VadTriple
    sd: SdTriple | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("situation", "word"):
            raise ValueError(f"unknown stimulus kind {self.kind!r}")


@dataclass(frozen=True)
class Dataset:
    name: str
    kind: str
    scale: Scale
    items: tuple[Stimulus, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("dataset must not be empty")
        ids = [s.id for s in self.items]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate stimulus ids")
        for s in self.items:
            if s.kind != self.kind:
                raise ValueError(f"stimulus {s.id} kind {s.kind!r} != {self.kind!r}")
            if s.ground_truth.scale is not self.scale:
                raise ValueError(f"stimulus {s.id} is not on scale {self.scale.value}")

    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.items)

    def by_id(self, stimulus_id: str) -> Stimulus:
        for s in self.items:
            if s.id == stimulus_id:
                return s
        raise KeyError(f"no stimulus {stimulus_id!r} in dataset {self.name!r}")


@dataclass(frozen=True)
class PredictionRecord:
    """A model-generated VAD triple for one stimulus, on the unit scale."""

    stimulus_id: str
    vad: VadTriple
    variant: str = "normal"  # "normal" | "failed_dominance"

    def __post_init__(self) -> None:
        if self.vad.scale is not Scale.UNIT_0_1:
            raise ValueError("predictions live on the unit scale")
        if self.variant not in ("normal", "failed_dominance"):
            raise ValueError(f"unknown prediction variant {self.variant!r}")


@dataclass(frozen=True)
class MappingRow:
    """One situation-to-word mapping row: numeric pick, free pick, expert pick."""

    stimulus_id: str
    numeric_word: str
    numeric_distance: float
    numeric_rank: int
    free_text: str
    expert_text: str


@dataclass(frozen=True)
class OctantRow:
    """An octant signature, the text generated for it, and the rater's verdict."""

    signature: str
    text: str
    rating: str


@dataclass(frozen=True)
class ElicitationCase:
    """One appraisal rule with its test situation and the recorded answer."""

    emotion: EmotionLabel
    label: str  # display label used when listing the rules
    rule_text: str
    situation: str
    reported_prediction: str


def reliability_score(s: Stimulus) -> float:
    """Sum of squared per-dimension SDs; lower means more reliably rated."""
    if s.sd is None:
        raise ValueError(f"stimulus {s.id} has no standard deviations")
    return s.sd.v**2 + s.sd.a**2 + s.sd.d**2


def select_most_reliable(d: Dataset, k: int) -> Dataset:
    """The k items with the lowest reliability score, ties broken by id."""
    if not 1 <= k <= len(d.items):
        raise ValueError(f"k={k} outside 1..{len(d.items)}")
    ranked = sorted(d.items, key=lambda s: (reliability_score(s), s.id))
    return Dataset(d.name, d.kind, d.scale, tuple(ranked[:k]))


_HEADER = ("id", "text", "v", "a", "d", "sd_v", "sd_a", "sd_d")


def _split_meta(text: str) -> tuple[dict[str, str], list[str]]:
    meta: dict[str, str] = {}
    lines = text.splitlines()
    body_start = 0
    for line in lines:
        if not line.startswith("#"):
            break
        body_start += 1
        key, sep, value = line[1:].partition("=")
        if sep:
            meta[key.strip()] = value.strip()
    return meta, lines[body_start:]


def load_dataset_csv(source: str | Path | io.TextIOBase) -> Dataset:
    """Load a dataset from the documented CSV schema.

    Leading ``#key=value`` comment lines carry metadata; ``scale`` is
    required, ``kind`` and ``name`` are optional. The header row is
    ``id,text,v,a,d,sd_v,sd_a,sd_d`` (the three sd columns may be omitted
    or left empty). Errors name the 1-based data row.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        default_name = path.stem
    else:
        text = source.read()
        default_name = "dataset"

    meta, body = _split_meta(text)
    if "scale" not in meta:
        raise StimulusCsvError("missing #scale= header comment")
    try:
        scale = Scale(meta["scale"])
    except ValueError:
        raise StimulusCsvError(f"unknown scale {meta['scale']!r}") from None
    kind = meta.get("kind", "situation")
    name = meta.get("name", default_name)

    rows = list(csv.reader(body))
    rows = [r for r in rows if r]  # blank lines are not data
    if not rows:
        raise StimulusCsvError("no header row")
    header = tuple(c.strip() for c in rows[0])
    if header not in (_HEADER, _HEADER[:5]):
        raise StimulusCsvError(f"unexpected header {','.join(header)!r}")
    has_sd = len(header) == 8

    items: list[Stimulus] = []
    seen: set[str] = set()
    for n, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise StimulusCsvError(f"row {n}: expected {len(header)} cells, got {len(row)}")
        sid, stext = row[0], row[1]
        if sid in seen:
            raise StimulusCsvError(f"row {n}: duplicate id {sid!r}")
        seen.add(sid)
        try:
            vad = VadTriple(float(row[2]), float(row[3]), float(row[4]), scale)
        except ValueError as exc:
            raise StimulusCsvError(f"row {n}: {exc}") from None
        sd = None
        if has_sd:
            sd_cells = [c.strip() for c in row[5:8]]
            if all(sd_cells):
                try:
                    sd = SdTriple(*(float(c) for c in sd_cells))
                except ValueError as exc:
                    raise StimulusCsvError(f"row {n}: {exc}") from None
            elif any(sd_cells):
                raise StimulusCsvError(f"row {n}: partial sd columns")
        items.append(Stimulus(sid, kind, stext, vad, sd))

    if not items:
        raise StimulusCsvError("no items")
    return Dataset(name, kind, scale, tuple(items))


def _fmt(x: float) -> str:
    return str(x)


def serialize_dataset_csv(d: Dataset) -> str:
    """Canonical CSV form of a dataset; load(serialize(...)) is a fixed point."""
    out = io.StringIO()
    out.write(f"#scale={d.scale.value}\n#kind={d.kind}\n#name={d.name}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_HEADER)
    for s in d.items:
        gt = s.ground_truth
        sd_cells = ("", "", "") if s.sd is None else (_fmt(s.sd.v), _fmt(s.sd.a), _fmt(s.sd.d))
        writer.writerow([s.id, s.text, _fmt(gt.v), _fmt(gt.a), _fmt(gt.d), *sd_cells])
    return out.getvalue()


@dataclass(frozen=True)
class FixtureBundle:
    """The embedded 20/20/20/9/12 table fixtures, transcribed verbatim."""

    anet20: Dataset
    words20: Dataset
    anet20_predictions: tuple[PredictionRecord, ...]
    anet20_predictions_failed: tuple[PredictionRecord, ...]
    words20_predictions: tuple[PredictionRecord, ...]
    mapping20: tuple[MappingRow, ...]
    octant9: tuple[OctantRow, ...]
    elicitation12: tuple[ElicitationCase, ...]


def _data_text(filename: str) -> str:
    return (
        resources.files("chatocc")
        .joinpath("fixtures/data")
        .joinpath(filename)
        .read_text(encoding="utf-8")
    )


def _read_table(filename: str) -> list[dict[str, str]]:
    _, body = _split_meta(_data_text(filename))
    reader = csv.DictReader(body)
    return list(reader)


def _unit(v: str, a: str, d: str) -> VadTriple:
    return VadTriple(float(v), float(a), float(d), Scale.UNIT_0_1)


@lru_cache(maxsize=1)
def fixtures() -> FixtureBundle:
    """Load the embedded fixture tables shipped with the package."""
    anet20 = load_dataset_csv_text(_data_text("anet20.csv"))
    words20 = load_dataset_csv_text(_data_text("words20.csv"))

    anet_pred: list[PredictionRecord] = []
    anet_pred_failed: list[PredictionRecord] = []
    for row in _read_table("anet20_predictions.csv"):
        anet_pred.append(
            PredictionRecord(row["id"], _unit(row["v"], row["a"], row["d"]), "normal")
        )
        anet_pred_failed.append(
            PredictionRecord(
                row["id"], _unit(row["v"], row["a"], row["d_star"]), "failed_dominance"
            )
        )

    words_pred = tuple(
        PredictionRecord(row["id"], _unit(row["v"], row["a"], row["d"]), "normal")
        for row in _read_table("words20_predictions.csv")
    )

    mapping = tuple(
        MappingRow(
            row["id"],
            row["numeric_word"],
            float(row["numeric_distance"]),
            int(row["numeric_rank"]),
            row["free"],
            row["expert"],
        )
        for row in _read_table("mapping20.csv")
    )

    octants = tuple(
        OctantRow(row["signature"], row["text"], row["rating"])
        for row in _read_table("octant9.csv")
    )

    elicitation = tuple(
        ElicitationCase(
            EmotionLabel(row["emotion"]),
            row["label"],
            row["rule"],
            row["situation"],
            row["prediction"],
        )
        for row in _read_table("elicitation12.csv")
    )

    return FixtureBundle(
        anet20=anet20,
        words20=words20,
        anet20_predictions=tuple(anet_pred),
        anet20_predictions_failed=tuple(anet_pred_failed),
        words20_predictions=words_pred,
        mapping20=mapping,
        octant9=octants,
        elicitation12=elicitation,
    )


def load_dataset_csv_text(text: str) -> Dataset:
    """Load a dataset from CSV text already in memory."""
    return load_dataset_csv(io.StringIO(text))
