"""Command-line surface: run experiments, appraise frames, compute statistics,
inspect embedded fixtures, and record live transcripts into replay fixtures.

Exit codes for ``run``: 0 on success, 2 when the report contains parse
failures, 1 on configuration or transport errors.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from . import experiments, metrics
from .llm import (
    Backend,
    BackendConfigError,
    BackendError,
    HttpBackend,
    MockBackend,
    RecordingBackend,
    ReplayBackend,
    ReplayFixture,
)
from .occ import AppraisalFrame, EngineConfig, FrameError, appraise, explain
from .stimuli import Dataset, fixtures, load_dataset_csv, serialize_dataset_csv

EXPERIMENTS = ("rq1", "rq2.1", "rq2.2", "rq2.3", "rq3")

_DATA_FIXTURES = (
    "anet20",
    "words20",
    "anet20_predictions",
    "words20_predictions",
    "mapping20",
    "octant9",
    "elicitation12",
)


def _replay_name(experiment: str, dataset: str, dominance_clause: bool, perspective: bool) -> str:
    if experiment == "rq1":
        if dataset == "words20":
            return "rq1-words"
        return "rq1-anet" if dominance_clause else "rq1-anet-failed"
    if experiment == "rq2.1":
        return "rq2-numeric"
    if experiment == "rq2.2":
        return "rq2-latent-perspective" if perspective else "rq2-latent"
    if experiment == "rq2.3":
        return "rq2-generate"
    return "rq3"


def _load_dataset(name_or_path: str) -> Dataset:
    if name_or_path == "anet20":
        return fixtures().anet20
    if name_or_path == "words20":
        return fixtures().words20
    return load_dataset_csv(name_or_path)


def _build_backend(
    kind: str,
    fixture_source: str,
    experiment: str,
    dataset: str,
    dominance_clause: bool,
    perspective: bool,
    mock_response: str,
) -> Backend:
    if kind == "replay":
        if fixture_source == "paper":
            name = _replay_name(experiment, dataset, dominance_clause, perspective)
            return experiments.paper_replay_backend(name)
        return ReplayBackend(ReplayFixture.load(fixture_source))
    if kind == "mock":
        return MockBackend(mock_response)
    if kind == "engine":
        return experiments.EngineBackend(EngineConfig())
    if kind == "http":
        backend = HttpBackend.from_env()
        backend.check_ready()
        return backend
    raise BackendConfigError(f"unknown backend kind {kind!r}")


def _dispatch(experiment: str, backend: Backend, dataset: str, dominance_clause: bool, perspective: bool):
    bundle = fixtures()
    if experiment == "rq1":
        return experiments.run_rq1(_load_dataset(dataset), backend, dominance_clause)
    if experiment == "rq2.1":
        return experiments.run_rq2_numeric(bundle.anet20, bundle.words20, backend)
    if experiment == "rq2.2":
        return experiments.run_rq2_latent(
            bundle.anet20,
            bundle.words20,
            backend,
            experiments.expert_mapping(bundle),
            perspective=perspective,
        )
    if experiment == "rq2.3":
        from .affect import parse_signature

        octants = [parse_signature(row.signature) for row in bundle.octant9]
        return experiments.run_rq2_generate(octants, backend)
    return experiments.run_rq3(backend)


@click.group()
def main() -> None:
    """Affective-dimension experiments against chat language models."""


@main.command()
@click.argument("experiment", type=click.Choice(EXPERIMENTS))
@click.option("--dataset", default="anet20", show_default=True, help="rq1 dataset: anet20, words20, or a CSV path.")
@click.option(
    "--backend",
    "backend_kind",
    type=click.Choice(["replay", "mock", "http", "engine"]),
    default="replay",
    show_default=True,
)
@click.option(
    "--fixtures",
    "fixture_source",
    default="paper",
    show_default=True,
    help='Replay source: "paper" for the embedded tables, or a fixture JSON path.',
)
@click.option("--dominance-clause/--no-dominance-clause", default=True, show_default=True)
@click.option("--perspective", is_flag=True, help="rq2.2: feeling-of-the-individual prompt variant.")
@click.option("--mock-response", default="Joy", show_default=True, help="Reply used by the mock backend.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Run directory to write.")
def run(
    experiment: str,
    dataset: str,
    backend_kind: str,
    fixture_source: str,
    dominance_clause: bool,
    perspective: bool,
    mock_response: str,
    out_dir: str | None,
) -> None:
    """Run one experiment and print its canonical report."""
    try:
        backend = _build_backend(
            backend_kind, fixture_source, experiment, dataset, dominance_clause, perspective, mock_response
        )
        report = _dispatch(experiment, backend, dataset, dominance_clause, perspective)
    except (BackendError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if out_dir is not None:
        experiments.write_run_dir(report, out_dir)
    click.echo(report.to_canonical_json())
    if report.parse_failures:
        sys.exit(2)


@main.command("appraise")
@click.argument("frame_file", type=click.Path(exists=True, dir_okay=False))
def appraise_cmd(frame_file: str) -> None:
    """Appraise a JSON frame file and print the predicted emotion."""
    try:
        frame = AppraisalFrame.from_dict(json.loads(Path(frame_file).read_text(encoding="utf-8")))
        prediction = appraise(frame)
        traces = explain(frame)
    except (FrameError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(
        experiments.canonical_json(
            {
                "label": prediction.label.value,
                "intensity": prediction.intensity.label,
                "rule_id": prediction.rule_id,
                "rationale": prediction.rationale,
                "trace": [
                    {
                        "rule_id": t.rule_id,
                        "fired": t.fired,
                        "checks": [
                            {"condition": name, "expected": expected, "passed": passed}
                            for name, expected, passed in t.checks
                        ],
                    }
                    for t in traces
                ],
            }
        )
    )


@main.command()
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--x", "x_col", required=True, help="Column name for the first series.")
@click.option("--y", "y_col", required=True, help="Column name for the second series.")
def stats(csv_file: str, x_col: str, y_col: str) -> None:
    """Pearson correlation, p-value, and RMSE between two CSV columns."""
    xs: list[float] = []
    ys: list[float] = []
    try:
        with open(csv_file, newline="", encoding="utf-8") as handle:
            body = [line for line in handle if not line.startswith("#")]
        for n, row in enumerate(csv.DictReader(body), start=1):
            if x_col not in row or y_col not in row:
                raise ValueError(f"missing column {x_col!r} or {y_col!r}")
            xs.append(float(row[x_col]))
            ys.append(float(row[y_col]))
        result = metrics.correlate(xs, ys)
        error = metrics.rmse(xs, ys)
    except (ValueError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"rho={result.rho:.4f} p={result.p:.4f} rmse={error:.4f} n={result.n}")


@main.group("fixtures")
def fixtures_cmd() -> None:
    """Inspect the embedded fixture tables and replay fixtures."""


@fixtures_cmd.command("list")
def fixtures_list() -> None:
    """Names and sizes of everything that can be dumped."""
    bundle = fixtures()
    rows = {
        "anet20": len(bundle.anet20.items),
        "words20": len(bundle.words20.items),
        "anet20_predictions": len(bundle.anet20_predictions),
        "words20_predictions": len(bundle.words20_predictions),
        "mapping20": len(bundle.mapping20),
        "octant9": len(bundle.octant9),
        "elicitation12": len(bundle.elicitation12),
    }
    for name, count in rows.items():
        click.echo(f"{name}\t{count} rows")
    for name in experiments.PAPER_FIXTURE_NAMES:
        click.echo(f"{name}\t{len(experiments.paper_replay_fixture(name).turns)} turns (replay)")


@fixtures_cmd.command("dump")
@click.argument("name")
def fixtures_dump(name: str) -> None:
    """Print a data table as CSV or a replay fixture as JSON."""
    bundle = fixtures()
    if name == "anet20":
        click.echo(serialize_dataset_csv(bundle.anet20), nl=False)
    elif name == "words20":
        click.echo(serialize_dataset_csv(bundle.words20), nl=False)
    elif name in experiments.PAPER_FIXTURE_NAMES:
        click.echo(experiments.paper_replay_fixture(name).to_json())
    else:
        click.echo(
            f"error: unknown fixture {name!r}; datasets: anet20, words20; "
            f"replays: {', '.join(experiments.PAPER_FIXTURE_NAMES)}",
            err=True,
        )
        sys.exit(1)


@main.command()
@click.argument("experiment", type=click.Choice(EXPERIMENTS))
@click.option("--dataset", default="anet20", show_default=True)
@click.option(
    "--backend",
    "backend_kind",
    type=click.Choice(["mock", "http", "engine"]),
    default="http",
    show_default=True,
)
@click.option("--dominance-clause/--no-dominance-clause", default=True, show_default=True)
@click.option("--perspective", is_flag=True)
@click.option("--mock-response", default="Joy", show_default=True)
@click.option("--model", default="", help="Model name stored in the fixture metadata.")
@click.option("--captured", default="", help="Capture date stored in the fixture metadata.")
@click.option("--out", "out_path", type=click.Path(), required=True, help="Fixture JSON to write.")
def record(
    experiment: str,
    dataset: str,
    backend_kind: str,
    dominance_clause: bool,
    perspective: bool,
    mock_response: str,
    model: str,
    captured: str,
    out_path: str,
) -> None:
    """Run an experiment live and save the transcript as a replay fixture."""
    try:
        inner = _build_backend(
            backend_kind, "paper", experiment, dataset, dominance_clause, perspective, mock_response
        )
        recorder = RecordingBackend(inner)
        _dispatch(experiment, recorder, dataset, dominance_clause, perspective)
    except (BackendError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    recorder.fixture(model=model, captured=captured).save(out_path)
    click.echo(f"recorded {out_path}")


if __name__ == "__main__":
    main()
