"""Verbatim prompt templates and strict parsers for model replies.

Templates ship as text assets with literal bracket tokens marking the
slots (for example ``[BLOCK OF ANET]``); rendering substitutes the
tokens and nothing else, so the surrounding wording stays byte-exact.
Parsers are deliberately strict: a malformed reply raises a structured
error instead of being silently coerced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .affect import Octant, Scale, Sign, VadTriple
from .occ import EmotionLabel, Ordinal

__all__ = [
    "PromptTemplate",
    "ParsedVadRow",
    "WordPick",
    "PromptParseError",
    "VadTableError",
    "WordPairError",
    "EmotionLabelError",
    "DOMINANCE_CLAUSE",
    "template",
    "template_text",
    "sentiment_instruction",
    "numbered_block",
    "render_sentiment_prompt",
    "render_numeric_mapping_prompt",
    "render_word_pick_prompt",
    "render_octant_prompt",
    "render_chatocc_prompt",
    "format_vad_table",
    "parse_vad_table",
    "parse_word_pair",
    "parse_word_mapping",
    "parse_emotion_label",
]


class PromptParseError(ValueError):
    """A model reply did not follow the expected shape."""


class VadTableError(PromptParseError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        place = ""
        if row is not None:
            place = f" (row {row}" + (f", column {column}" if column else "") + ")"
        super().__init__(message + place)
        self.row = row
        self.column = column


class WordPairError(PromptParseError):
    pass


class EmotionLabelError(PromptParseError):
    def __init__(self, message: str, raw_text: str):
        super().__init__(message)
        self.raw_text = raw_text


DOMINANCE_CLAUSE = (
    "Remember that dominance assesses the extent to which the main person in "
    "the situation experiences the amount of control it can assert over the situation."
)

_TEMPLATE_FILES = {
    "P1": "p1.txt",
    "P2": "p2.txt",
    "P3": "p3.txt",
    "P3-perspective": "p3_perspective.txt",
    "P4": "p4.txt",
    "P5": "p5.txt",
}


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str


@lru_cache(maxsize=None)
def template(template_id: str) -> PromptTemplate:
    try:
        filename = _TEMPLATE_FILES[template_id]
    except KeyError:
        raise KeyError(f"unknown template id {template_id!r}") from None
    body = (
        resources.files("chatocc")
        .joinpath("templates")
        .joinpath(filename)
        .read_text(encoding="utf-8")
    )
    return PromptTemplate(template_id, body)


def template_text(template_id: str, *, dominance_clause: bool = True) -> str:
    """Template body with slot tokens in place.

    For P1 the dominance clause can be dropped, which reproduces the
    wording that elicited the failed dominance predictions.
    """
    body = template(template_id).body
    if template_id == "P1" and not dominance_clause:
        body = body.replace(DOMINANCE_CLAUSE + " ", "")
    return body


def _fill(body: str, bindings: dict[str, str]) -> str:
    for token, value in bindings.items():
        if token not in body:
            raise KeyError(f"template has no slot {token!r}")
        body = body.replace(token, value)
    return body


def numbered_block(texts: Sequence[str]) -> str:
    """Stimulus texts as numbered lines, one per line."""
    if not texts:
        raise ValueError("empty stimulus block")
    return "\n".join(f"{i}. {t}" for i, t in enumerate(texts, start=1))


def sentiment_instruction(include_dominance_clause: bool = True) -> str:
    """The sentiment prompt alone, ending with the acknowledgment request."""
    body = template_text("P1", dominance_clause=include_dominance_clause)
    return body.replace(" [BLOCK OF ANET]", "")


def render_sentiment_prompt(
    include_dominance_clause: bool, block: Sequence[str]
) -> str:
    """Full sentiment prompt with the numbered stimulus block appended."""
    return sentiment_instruction(include_dominance_clause) + "\n" + numbered_block(block)


def render_numeric_mapping_prompt() -> str:
    return template_text("P2")


def render_word_pick_prompt(
    situation: str, words: Sequence[str], *, perspective: bool = False
) -> str:
    """Situation plus the full word list to pick the two best-fitting words.

    The perspective variant asks for the feeling of the individual in the
    situation instead; it is experimental wording, kept separate from the
    standard template.
    """
    if not situation or not words:
        raise ValueError("situation and word list must be non-empty")
    body = template_text("P3-perspective" if perspective else "P3")
    return _fill(
        body,
        {
            "[ANET SITUATION]": situation,
            "[LIST OF EMOTION WORDS]": ", ".join(words),
        },
    )


_LEVEL_WORD = {Sign.PLUS: "high", Sign.MINUS: "low", Sign.NEUTRAL: "neutral"}


def render_octant_prompt(octant: Octant) -> str:
    """Situation-generation prompt for one octant.

    Corner signs render as the literal words "low"/"high"; the neutral
    octant renders "neutral" into all three slots.
    """
    body = template_text("P4")
    for sign in (octant.sv, octant.sa, octant.sd):
        body = body.replace("[LOW,HIGH]", _LEVEL_WORD[sign], 1)
    return body


def render_chatocc_prompt(
    rules: Iterable[tuple[str, str]], situation: str
) -> str:
    """Appraisal prompt with the rule list and the situation substituted.

    ``rules`` is an iterable of (display label, rule sentence) pairs,
    rendered one per line as ``label: sentence``.
    """
    rule_lines = "\n".join(f"{label}: {text}" for label, text in rules)
    if not rule_lines:
        raise ValueError("empty rule list")
    if not situation:
        raise ValueError("empty situation")
    return _fill(
        template_text("P5"),
        {"[RULES FROM TABLE]": rule_lines, "[SITUATION FROM TABLE]": situation},
    )


@dataclass(frozen=True)
class ParsedVadRow:
    """One parsed table row; key is the row's own label or its 1-based position."""

    key: str
    vad: VadTriple


def format_vad_table(rows: Sequence[tuple[str, VadTriple]], decimals: int = 2) -> str:
    """Canonical pipe-table emission; :func:`parse_vad_table` inverts it."""
    lines = []
    for key, t in rows:
        v, a, d = (f"{x:.{decimals}f}" for x in t.components())
        lines.append(f"| {key} | {v} | {a} | {d} |")
    return "\n".join(lines)


def _try_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def parse_vad_table(text: str, expected_count: int) -> list[ParsedVadRow]:
    """Parse a VAD table from a reply, pipe-delimited or whitespace-aligned.

    The last three cells of a data row are the VAD values and must lie in
    [0, 1]; anything before them is the row key. Header and separator
    rows are skipped; the number of data rows must equal
    ``expected_count``.
    """
    rows: list[tuple[str | None, tuple[float, float, float]]] = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if set(s) <= set("|-+=: "):
            continue
        if "|" in s:
            cells = [c.strip() for c in s.split("|") if c.strip()]
        else:
            cells = s.split()
        if len(cells) < 3:
            continue
        values = [_try_float(c) for c in cells[-3:]]
        if any(v is None for v in values):
            continue  # header or prose line
        key_cells = cells[:-3]
        key = " ".join(key_cells).rstrip(".:)") or None
        row_number = len(rows) + 1
        for dim, v in zip(("v", "a", "d"), values):
            if not 0 <= v <= 1:
                raise VadTableError(
                    f"value {v} outside [0, 1]", row=row_number, column=dim
                )
        rows.append((key, tuple(values)))  # type: ignore[arg-type]

    if len(rows) != expected_count:
        raise VadTableError(
            f"expected {expected_count} data rows, found {len(rows)}"
        )
    return [
        ParsedVadRow(
            key if key is not None else str(i),
            VadTriple(*values, Scale.UNIT_0_1),
        )
        for i, (key, values) in enumerate(rows, start=1)
    ]


@dataclass(frozen=True)
class WordPick:
    primary: tuple[str, str]
    alternates: tuple[str, ...]
    hallucinated: frozenset[str]


def normalize_word(word: str) -> str:
    """Case, underscore, and whitespace normalization for word matching."""
    cleaned = word.replace("_", " ").strip().lower()
    cleaned = re.sub(r"^\W+|\W+$", "", cleaned)
    return " ".join(cleaned.split())


def _scan_known(text: str, allowed_sorted: list[str]) -> list[str]:
    if not allowed_sorted:
        return []
    pattern = "|".join(re.escape(w) for w in allowed_sorted)
    return [m.group(0) for m in re.finditer(rf"\b(?:{pattern})\b", text)]


def parse_word_pair(text: str, allowed: Sequence[str]) -> WordPick:
    """Extract the two primary words plus alternates from a reply.

    The first two non-parenthesized candidates form the primary pair;
    parenthesized words are alternates. Words outside ``allowed`` are
    flagged hallucinated but still take part in later comparison.
    Multi-word entries ("mildly annoyed") stay atomic; prose replies are
    reduced by scanning for known words, longest first.
    """
    allowed_norm = {normalize_word(w) for w in allowed}
    by_length = sorted(allowed_norm, key=len, reverse=True)

    primary: list[str] = []
    alternates: list[str] = []

    def add(candidates: Iterable[str], target: list[str]) -> None:
        for cand in candidates:
            if cand and cand not in target:
                target.append(cand)

    for group in re.findall(r"\(([^()]*)\)", text):
        add([normalize_word(g) for g in group.split(",")], alternates)

    for chunk in re.split(r"[;,]", re.sub(r"\([^()]*\)", " ", text)):
        remainder = normalize_word(chunk)
        if not remainder:
            continue
        if remainder in allowed_norm or len(remainder.split()) <= 3:
            add([remainder], primary)
        else:
            add(_scan_known(remainder, by_length), primary)

    if len(primary) < 2:
        raise WordPairError(
            f"found {len(primary)} candidate words, need 2: {text!r}"
        )
    extracted = primary[:2] + primary[2:] + alternates
    hallucinated = frozenset(w for w in extracted if w not in allowed_norm)
    return WordPick(
        primary=(primary[0], primary[1]),
        alternates=tuple(alternates),
        hallucinated=hallucinated,
    )


def parse_word_mapping(text: str, expected_count: int) -> list[tuple[int, str]]:
    """Parse numbered mapping lines ("3. excited") into (index, word) pairs.

    Every index 1..expected_count must occur exactly once.
    """
    pairs: list[tuple[int, str]] = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        m = re.match(r"^(\d+)\s*[.:)\-]\s*(.+)$", s)
        if not m:
            raise PromptParseError(f"not a mapping line: {s!r}")
        pairs.append((int(m.group(1)), normalize_word(m.group(2))))
    indices = sorted(i for i, _ in pairs)
    if indices != list(range(1, expected_count + 1)):
        raise PromptParseError(
            f"mapping indices {indices} do not cover 1..{expected_count}"
        )
    return pairs


_LABEL_SYNONYMS: dict[str, EmotionLabel] = {
    "happy for": EmotionLabel.HAPPY_FOR,
    "happy-for": EmotionLabel.HAPPY_FOR,
    "fears-confirmed": EmotionLabel.DESPAIR,
    "fears confirmed": EmotionLabel.DESPAIR,
    "satisfac": EmotionLabel.SATISFACTION,
    "disapp": EmotionLabel.DISAPPOINTMENT,
}


@lru_cache(maxsize=None)
def _label_terms(labels: tuple[EmotionLabel, ...]) -> list[tuple[str, EmotionLabel]]:
    terms = {label.value.lower(): label for label in labels}
    for term, label in _LABEL_SYNONYMS.items():
        if label in labels:
            terms[term] = label
    return sorted(terms.items(), key=lambda kv: len(kv[0]), reverse=True)


def parse_emotion_label(
    text: str, labels: Sequence[EmotionLabel] | None = None
) -> tuple[EmotionLabel, Ordinal | None]:
    """Find the first emotion label mentioned in a reply.

    Matching is case-insensitive with a synonym map for the shorthand
    spellings ("Happy for", "Satisfac.", "Disapp.", "fears-confirmed");
    longer terms win at equal positions. An intensity word (low, medium,
    high) is returned when present.
    """
    wanted = tuple(labels) if labels is not None else tuple(EmotionLabel)
    terms = _label_terms(wanted)
    lowered = text.lower()
    pattern = "|".join(re.escape(term) for term, _ in terms)
    m = re.search(rf"\b(?:{pattern})\b", lowered)
    if not m:
        raise EmotionLabelError("no emotion label found in reply", raw_text=text)
    label = dict(terms)[m.group(0)]
    im = re.search(r"\b(low|medium|high)\b", lowered)
    level = Ordinal.from_label(im.group(1)) if im else None
    return label, level
