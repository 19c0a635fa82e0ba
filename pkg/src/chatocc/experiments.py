"""Experiment pipelines over a chat backend, producing canonical reports.

Five pipelines mirror the study set-ups: batched sentiment analysis
(rq1), numeric situation-to-word mapping in one session (rq2.1),
free-form word picking per situation (rq2.2), octant-conditioned
situation generation (rq2.3), and rule-based emotion elicitation (rq3).
Reports are pure functions of fixtures, backend replies, and
configuration; replay runs serialize byte-identically.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import metrics, prompts
from .affect import (
    Octant,
    Scale,
    VadTriple,
    distance_matrix,
    octant_signature,
    parse_signature,
    rank_of,
    rescale,
)
from .llm import (
    Backend,
    BackendError,
    ChatSession,
    ReplayBackend,
    ReplayFixture,
    ReplayTurn,
    open_session,
    prompt_digest,
)
from .occ import EngineConfig, EmotionLabel, appraise, canonical_case_frames
from .stimuli import Dataset, FixtureBundle, fixtures

__all__ = [
    "ReportRow",
    "ExperimentReport",
    "EngineBackend",
    "run_rq1",
    "run_rq2_numeric",
    "run_rq2_latent",
    "run_rq2_generate",
    "run_rq3",
    "expert_mapping",
    "paper_replay_fixture",
    "paper_replay_backend",
    "PAPER_FIXTURE_NAMES",
    "canonical_json",
    "write_run_dir",
]

ACK_TEXT = "Got it."


# --------------------------------------------------------------------------
# canonical serialization

def _canon_value(value, out: list[str]) -> None:
    if value is None or isinstance(value, bool):
        out.append(json.dumps(value))
    elif isinstance(value, float):
        out.append(format(value, ".17g"))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            if not isinstance(key, str):
                raise TypeError(f"non-string report key: {key!r}")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _canon_value(value[key], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _canon_value(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot canonicalize {type(value).__name__}")


def canonical_json(value) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    out: list[str] = []
    _canon_value(value, out)
    return "".join(out)


# --------------------------------------------------------------------------
# report types

@dataclass
class ReportRow:
    stimulus_id: str
    session_id: str
    response: str
    parsed: dict | None = None
    error: str | None = None


@dataclass
class ExperimentReport:
    experiment: str
    backend: str
    config: dict
    rows: list[ReportRow]
    aggregates: dict
    parse_failures: int
    transcripts: list[tuple[str, list]] = field(default_factory=list)

    def to_dict(self) -> dict:
        """Canonical report content; transcripts stay out (they carry
        timestamps) and are referenced by session id only."""
        return {
            "experiment": self.experiment,
            "backend": self.backend,
            "config": self.config,
            "rows": [
                {
                    "stimulus_id": r.stimulus_id,
                    "session_id": r.session_id,
                    "response": r.response,
                    "parsed": r.parsed,
                    "error": r.error,
                }
                for r in self.rows
            ],
            "aggregates": self.aggregates,
            "parse_failures": self.parse_failures,
            "transcript_refs": [sid for sid, _ in self.transcripts],
        }

    def to_canonical_json(self) -> str:
        return canonical_json(self.to_dict())


def _take_transcript(report: ExperimentReport, session: ChatSession) -> None:
    report.transcripts.append(
        (
            session.session_id,
            [
                {"role": m.role, "text": m.text, "timestamp": m.timestamp}
                for m in session.transcript
            ],
        )
    )


def _error_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


# --------------------------------------------------------------------------
# rq1: batched VAD sentiment analysis

def run_rq1(
    dataset: Dataset,
    backend: Backend,
    dominance_clause: bool = True,
    batch_size: int = 20,
) -> ExperimentReport:
    """Prompt for VAD values in batches, correlate against ground truth.

    Each batch gets a fresh session: instruction first (the reply is the
    stored acknowledgment), then the numbered block. Pearson runs on the
    native scales; RMSE after rescaling ground truth to the unit scale.
    A batch whose table has the wrong row count is retried once in the
    same session before being marked failed.
    """
    report = ExperimentReport(
        experiment="rq1",
        backend=backend.describe(),
        config={
            "dataset": dataset.name,
            "dominance_clause": dominance_clause,
            "batch_size": batch_size,
        },
        rows=[],
        aggregates={},
        parse_failures=0,
    )
    items = dataset.items
    for start in range(0, len(items), batch_size):
        batch = items[start : start + batch_size]
        session = open_session(backend)
        batch_error: str | None = None
        parsed_rows: list[prompts.ParsedVadRow] = []
        response = ""
        try:
            session.send(prompts.sentiment_instruction(dominance_clause), label="P1")
            block = prompts.numbered_block([s.text for s in batch])
            response = session.send(block, label="P1-block")
            try:
                parsed_rows = prompts.parse_vad_table(response, len(batch))
            except prompts.VadTableError:
                response = session.send(block, label="P1-block-retry")
                parsed_rows = prompts.parse_vad_table(response, len(batch))
        except (prompts.PromptParseError, BackendError) as exc:
            batch_error = _error_text(exc)
        _take_transcript(report, session)

        for offset, stimulus in enumerate(batch):
            if batch_error is not None:
                report.rows.append(
                    ReportRow(stimulus.id, session.session_id, response, None, batch_error)
                )
                report.parse_failures += 1
            else:
                vad = parsed_rows[offset].vad
                report.rows.append(
                    ReportRow(
                        stimulus.id,
                        session.session_id,
                        response,
                        {"v": vad.v, "a": vad.a, "d": vad.d},
                    )
                )

    by_id = {r.stimulus_id: r for r in report.rows}
    correlations: dict[str, dict] = {}
    rmse: dict[str, float] = {}
    for dim in ("v", "a", "d"):
        gt_native: list[float] = []
        gt_unit: list[float] = []
        pred: list[float] = []
        for s in items:
            row = by_id[s.id]
            if row.parsed is None:
                continue
            gt_native.append(getattr(s.ground_truth, dim))
            gt_unit.append(getattr(rescale(s.ground_truth, Scale.UNIT_0_1), dim))
            pred.append(row.parsed[dim])
        if len(pred) >= 3:
            result = metrics.correlate(gt_native, pred, dimension=dim.upper())
            correlations[dim.upper()] = {
                "rho": result.rho,
                "p": result.p,
                "n": result.n,
            }
            rmse[dim.upper()] = metrics.rmse(gt_unit, pred)
    report.aggregates = {"correlations": correlations, "rmse": rmse}
    return report


# --------------------------------------------------------------------------
# rq2.1: numeric mapping in a single session

def run_rq2_numeric(
    situations: Dataset, words: Dataset, backend: Backend
) -> ExperimentReport:
    """One session: VAD for both stimulus sets, then the mapping request.

    The distance matrix and ranks come from the session's own parsed
    values, not from ground truth.
    """
    report = ExperimentReport(
        experiment="rq2.1",
        backend=backend.describe(),
        config={"situations": situations.name, "words": words.name},
        rows=[],
        aggregates={},
        parse_failures=0,
    )
    session = open_session(backend)
    sit_items = situations.items
    word_items = words.items
    try:
        session.send(prompts.sentiment_instruction(True), label="P1")
        sit_response = session.send(
            prompts.numbered_block([s.text for s in sit_items]), label="P1-block"
        )
        sit_rows = prompts.parse_vad_table(sit_response, len(sit_items))
        session.send(prompts.sentiment_instruction(True), label="P1")
        word_response = session.send(
            prompts.numbered_block([w.text for w in word_items]), label="P1-block"
        )
        word_rows = prompts.parse_vad_table(word_response, len(word_items))
        mapping_response = session.send(
            prompts.render_numeric_mapping_prompt(), label="P2"
        )
    except (prompts.PromptParseError, BackendError) as exc:
        _take_transcript(report, session)
        for s in sit_items:
            report.rows.append(
                ReportRow(s.id, session.session_id, "", None, _error_text(exc))
            )
        report.parse_failures = len(sit_items)
        return report
    _take_transcript(report, session)

    matrix = distance_matrix(
        [(s.id, row.vad) for s, row in zip(sit_items, sit_rows)],
        [(w.id, row.vad) for w, row in zip(word_items, word_rows)],
    )
    word_by_norm = {prompts.normalize_word(w.id): w.id for w in word_items}

    try:
        pairs = dict(prompts.parse_word_mapping(mapping_response, len(sit_items)))
    except prompts.PromptParseError as exc:
        for s in sit_items:
            report.rows.append(
                ReportRow(
                    s.id, session.session_id, mapping_response, None, _error_text(exc)
                )
            )
        report.parse_failures = len(sit_items)
        return report

    ranks: list[int] = []
    for index, s in enumerate(sit_items, start=1):
        picked = pairs[index]
        word_id = word_by_norm.get(picked)
        if word_id is None:
            report.rows.append(
                ReportRow(
                    s.id,
                    session.session_id,
                    mapping_response,
                    None,
                    f"PromptParseError: picked word {picked!r} not in the word list",
                )
            )
            report.parse_failures += 1
            continue
        distance = matrix.cell(s.id, word_id)
        rank = rank_of(matrix, s.id, word_id)
        ranks.append(rank)
        report.rows.append(
            ReportRow(
                s.id,
                session.session_id,
                mapping_response,
                {"word": word_id, "distance": distance, "rank": rank},
            )
        )
    aggregates: dict = {"ranks": ranks}
    if ranks:
        aggregates["mean_rank"] = sum(ranks) / len(ranks)
        aggregates["rank1_count"] = sum(1 for r in ranks if r == 1)
    report.aggregates = aggregates
    return report


# --------------------------------------------------------------------------
# rq2.2: free-form word picking against an expert mapping

def expert_mapping(bundle: FixtureBundle | None = None) -> dict[str, tuple[str, str]]:
    """The expert's word pair per situation id, from the mapping fixture."""
    bundle = bundle or fixtures()
    allowed = [w.id for w in bundle.words20.items]
    out: dict[str, tuple[str, str]] = {}
    for row in bundle.mapping20:
        pick = prompts.parse_word_pair(row.expert_text, allowed)
        out[row.stimulus_id] = pick.primary
    return out


def run_rq2_latent(
    situations: Dataset,
    words: Dataset,
    backend: Backend,
    expert: dict[str, tuple[str, str]],
    perspective: bool = False,
) -> ExperimentReport:
    """One session per situation: pick two words, score against the expert."""
    missing = [s.id for s in situations.items if s.id not in expert]
    if missing:
        raise ValueError(f"expert mapping missing situations: {missing}")
    report = ExperimentReport(
        experiment="rq2.2",
        backend=backend.describe(),
        config={
            "situations": situations.name,
            "words": words.name,
            "perspective": perspective,
        },
        rows=[],
        aggregates={},
        parse_failures=0,
    )
    allowed = [w.id for w in words.items]
    results: list[metrics.MatchResult] = []
    hallucinated: set[str] = set()
    for s in situations.items:
        session = open_session(backend)
        response = ""
        try:
            response = session.send(
                prompts.render_word_pick_prompt(
                    s.text, allowed, perspective=perspective
                ),
                label="P3-perspective" if perspective else "P3",
            )
            pick = prompts.parse_word_pair(response, allowed)
        except (prompts.PromptParseError, BackendError) as exc:
            _take_transcript(report, session)
            report.rows.append(
                ReportRow(s.id, session.session_id, response, None, _error_text(exc))
            )
            report.parse_failures += 1
            results.append(
                metrics.MatchResult(grade="none", common=frozenset(), hallucinated=frozenset())
            )
            continue
        _take_transcript(report, session)
        match = metrics.match_score(pick.primary, expert[s.id], allowed)
        results.append(match)
        hallucinated |= match.hallucinated
        report.rows.append(
            ReportRow(
                s.id,
                session.session_id,
                response,
                {
                    "primary": list(pick.primary),
                    "alternates": list(pick.alternates),
                    "hallucinated": sorted(match.hallucinated),
                    "grade": match.grade,
                    "common": sorted(match.common),
                },
            )
        )
    tally = metrics.tally_matches(results)
    report.aggregates = {
        "tally": {"complete": tally.complete, "partial": tally.partial, "none": tally.none},
        "hallucinated": sorted(hallucinated),
    }
    return report


# --------------------------------------------------------------------------
# rq2.3: octant-conditioned situation generation

def run_rq2_generate(
    octants: Sequence[Octant],
    backend: Backend,
    ratings: dict[str, str] | None = None,
) -> ExperimentReport:
    """One session per octant; generated texts are paired with signatures.

    Correctness is a human judgment: ratings come from a side mapping of
    signature to verdict and default to "pending".
    """
    report = ExperimentReport(
        experiment="rq2.3",
        backend=backend.describe(),
        config={"octants": [octant_signature(o) for o in octants]},
        rows=[],
        aggregates={},
        parse_failures=0,
    )
    ratings = ratings or {}
    rated = 0
    for octant in octants:
        signature = octant_signature(octant)
        session = open_session(backend)
        response = ""
        error = None
        try:
            response = session.send(prompts.render_octant_prompt(octant), label="P4")
            if not response.strip():
                raise prompts.PromptParseError("empty generation")
        except (prompts.PromptParseError, BackendError) as exc:
            error = _error_text(exc)
            report.parse_failures += 1
        _take_transcript(report, session)
        rating = ratings.get(signature, "pending")
        if error is None and rating != "pending":
            rated += 1
        report.rows.append(
            ReportRow(
                signature,
                session.session_id,
                response,
                None if error else {"text": response, "rating": rating},
                error,
            )
        )
    report.aggregates = {"rated": rated}
    return report


# --------------------------------------------------------------------------
# rq3: rule-based emotion elicitation

def run_rq3(
    backend: Backend,
    cases=None,
    config: EngineConfig | None = None,
) -> ExperimentReport:
    """One session per case: the full rule list, one situation, one label."""
    cases = list(cases) if cases is not None else list(fixtures().elicitation12)
    rules = [(c.label, c.rule_text) for c in cases]
    report = ExperimentReport(
        experiment="rq3",
        backend=backend.describe(),
        config={"cases": len(cases)},
        rows=[],
        aggregates={},
        parse_failures=0,
    )
    correct = 0
    failures: list[dict] = []
    for case in cases:
        session = open_session(backend)
        response = ""
        try:
            response = session.send(
                prompts.render_chatocc_prompt(rules, case.situation), label="P5"
            )
            label, level = prompts.parse_emotion_label(response)
        except (prompts.PromptParseError, BackendError) as exc:
            _take_transcript(report, session)
            report.rows.append(
                ReportRow(case.emotion.value, session.session_id, response, None, _error_text(exc))
            )
            report.parse_failures += 1
            failures.append({"expected": case.emotion.value, "predicted": None})
            continue
        _take_transcript(report, session)
        ok = label is case.emotion
        correct += ok
        if not ok:
            failures.append({"expected": case.emotion.value, "predicted": label.value})
        report.rows.append(
            ReportRow(
                case.emotion.value,
                session.session_id,
                response,
                {
                    "expected": case.emotion.value,
                    "predicted": label.value,
                    "intensity": None if level is None else level.label,
                    "correct": ok,
                },
            )
        )
    report.aggregates = {
        "correct": correct,
        "total": len(cases),
        "accuracy": correct / len(cases) if cases else 0.0,
        "failures": failures,
    }
    return report


class EngineBackend(Backend):
    """Answers elicitation prompts by appraising the situation's frame.

    The situation text is read from the prompt after "Here is the
    situation: " and looked up in the canonical frame table, so this
    backend is only as wide as the known elicitation cases.
    """

    supports_parallel = True
    _MARKER = "Here is the situation: "

    def __init__(self, config: EngineConfig | None = None):
        super().__init__()
        self._config = config or EngineConfig()
        frames = canonical_case_frames()
        self._by_situation = {
            case.situation: frames[case.emotion] for case in fixtures().elicitation12
        }

    def describe(self) -> str:
        return "engine"

    def complete(self, session: ChatSession, prompt_text: str, label: str = "") -> str:
        marker = prompt_text.rfind(self._MARKER)
        if marker < 0:
            raise BackendError("prompt has no situation marker")
        situation = prompt_text[marker + len(self._MARKER) :].strip()
        frame = self._by_situation.get(situation)
        if frame is None:
            raise BackendError(f"unknown situation: {situation[:60]!r}")
        prediction = appraise(frame, self._config)
        return (
            f"{prediction.label.value} (intensity: {prediction.intensity.label}). "
            f"{prediction.rationale}"
        )


# --------------------------------------------------------------------------
# replay fixtures assembled from the embedded tables

PAPER_FIXTURE_NAMES = (
    "rq1-anet",
    "rq1-anet-failed",
    "rq1-words",
    "rq2-numeric",
    "rq2-latent",
    "rq2-latent-perspective",
    "rq2-generate",
    "rq3",
)

_FIXTURE_MODEL = "chat-2023-02"


def _vad_table_response(predictions, ids: Sequence[str]) -> str:
    by_id = {p.stimulus_id: p for p in predictions}
    rows = [(str(i), by_id[sid].vad) for i, sid in enumerate(ids, start=1)]
    return prompts.format_vad_table(rows)


def _turn(prompt: str, response: str, label: str) -> ReplayTurn:
    return ReplayTurn(prompt_digest(prompt), response, label)


def _perspective_text(free_text: str) -> str:
    """Free-pick text with each bracketed word replacing the word before it."""
    chunks = []
    for chunk in free_text.split(","):
        m = re.search(r"\(([^()]*)\)", chunk)
        chunks.append(m.group(1).strip() if m else chunk.strip())
    return ", ".join(chunks)


def paper_replay_fixture(name: str) -> ReplayFixture:
    """Build the replay fixture for one experiment from the embedded tables."""
    bundle = fixtures()
    anet_ids = bundle.anet20.ids()
    word_ids = bundle.words20.ids()
    anet_texts = [s.text for s in bundle.anet20.items]
    word_texts = [w.text for w in bundle.words20.items]
    turns: list[ReplayTurn] = []

    if name == "rq1-anet":
        turns = [
            _turn(prompts.sentiment_instruction(True), ACK_TEXT, "P1"),
            _turn(
                prompts.numbered_block(anet_texts),
                _vad_table_response(bundle.anet20_predictions, anet_ids),
                "P1-block",
            ),
        ]
    elif name == "rq1-anet-failed":
        turns = [
            _turn(prompts.sentiment_instruction(False), ACK_TEXT, "P1"),
            _turn(
                prompts.numbered_block(anet_texts),
                _vad_table_response(bundle.anet20_predictions_failed, anet_ids),
                "P1-block",
            ),
        ]
    elif name == "rq1-words":
        turns = [
            _turn(prompts.sentiment_instruction(True), ACK_TEXT, "P1"),
            _turn(
                prompts.numbered_block(word_texts),
                _vad_table_response(bundle.words20_predictions, word_ids),
                "P1-block",
            ),
        ]
    elif name == "rq2-numeric":
        mapping_lines = "\n".join(
            f"{i}. {row.numeric_word}"
            for i, row in enumerate(bundle.mapping20, start=1)
        )
        turns = [
            _turn(prompts.sentiment_instruction(True), ACK_TEXT, "P1"),
            _turn(
                prompts.numbered_block(anet_texts),
                _vad_table_response(bundle.anet20_predictions, anet_ids),
                "P1-block",
            ),
            _turn(prompts.sentiment_instruction(True), ACK_TEXT, "P1"),
            _turn(
                prompts.numbered_block(word_texts),
                _vad_table_response(bundle.words20_predictions, word_ids),
                "P1-block",
            ),
            _turn(prompts.render_numeric_mapping_prompt(), mapping_lines, "P2"),
        ]
    elif name in ("rq2-latent", "rq2-latent-perspective"):
        perspective = name.endswith("perspective")
        mapping_by_id = {row.stimulus_id: row for row in bundle.mapping20}
        for s in bundle.anet20.items:
            row = mapping_by_id[s.id]
            response = (
                _perspective_text(row.free_text) if perspective else row.free_text
            )
            turns.append(
                _turn(
                    prompts.render_word_pick_prompt(
                        s.text, list(word_ids), perspective=perspective
                    ),
                    response,
                    "P3-perspective" if perspective else "P3",
                )
            )
    elif name == "rq2-generate":
        for row in bundle.octant9:
            turns.append(
                _turn(
                    prompts.render_octant_prompt(parse_signature(row.signature)),
                    row.text,
                    "P4",
                )
            )
    elif name == "rq3":
        rules = [(c.label, c.rule_text) for c in bundle.elicitation12]
        for case in bundle.elicitation12:
            turns.append(
                _turn(
                    prompts.render_chatocc_prompt(rules, case.situation),
                    case.reported_prediction,
                    "P5",
                )
            )
    else:
        raise KeyError(f"unknown fixture name {name!r}; try {PAPER_FIXTURE_NAMES}")
    return ReplayFixture(tuple(turns), model=_FIXTURE_MODEL, captured="2023-03")


def paper_replay_backend(name: str) -> ReplayBackend:
    return ReplayBackend(paper_replay_fixture(name))


# --------------------------------------------------------------------------
# run directory

def write_run_dir(report: ExperimentReport, out_dir: str | Path) -> Path:
    """Write config snapshot, transcripts, report.json, and report.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(
        canonical_json({"experiment": report.experiment, "backend": report.backend, **report.config})
        + "\n",
        encoding="utf-8",
    )
    tdir = out / "transcripts"
    tdir.mkdir(exist_ok=True)
    for session_id, messages in report.transcripts:
        (tdir / f"{session_id}.json").write_text(
            json.dumps(messages, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    (out / "report.json").write_text(report.to_canonical_json() + "\n", encoding="utf-8")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["experiment", "stimulus_id", "session_id", "error", "parsed"])
    for row in report.rows:
        writer.writerow(
            [
                report.experiment,
                row.stimulus_id,
                row.session_id,
                row.error or "",
                "" if row.parsed is None else canonical_json(row.parsed),
            ]
        )
    (out / "report.csv").write_text(buffer.getvalue(), encoding="utf-8")
    return out
