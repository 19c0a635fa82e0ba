"""Deterministic appraisal of event outcomes into twelve emotion labels.

The engine covers the event branch of appraisal: well-being (joy,
distress), prospect (hope, fear), anticipation outcomes (satisfaction,
despair, relief, disappointment), and fortunes of others (happy-for,
pity, gloating, resentment). Rules are evaluated most-specific-first and
are mutually exclusive by construction, so exactly one rule fires for
every valid frame.

A frame records the appraisal of one event from one person's
perspective. Canonical frames follow three conventions on top of hard
validity: liking is present exactly when the event concerns another
person, frames about another person carry no anticipation record, and
when an anticipation record is present the desirability field describes
the actual outcome. :meth:`AppraisalFrame.is_canonical` checks these;
the engine itself only requires hard validity (a prospective event
cannot carry an anticipation record), which admits 648 frames in total.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Callable, Iterator

__all__ = [
    "FrameError",
    "Ordinal",
    "Subject",
    "Liking",
    "Desirability",
    "Temporal",
    "Outcome",
    "Anticipation",
    "AppraisalFrame",
    "EmotionLabel",
    "EmotionPrediction",
    "Rule",
    "RuleTrace",
    "EngineConfig",
    "rule_set",
    "appraise",
    "intensity",
    "explain",
    "effective_desirability",
    "is_positive_event",
    "enumerate_frames",
    "canonical_case_frames",
]


class FrameError(ValueError):
    """An appraisal frame violates a frame invariant."""


class Ordinal(IntEnum):
    """Three-level ordered magnitude used for desirability and likelihood."""

    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, text: str) -> "Ordinal":
        try:
            return cls[text.upper()]
        except KeyError:
            raise FrameError(f"not an ordinal level: {text!r}") from None


class Subject(Enum):
    SELF = "self"
    OTHER = "other"


class Liking(Enum):
    LIKED = "liked"
    DISLIKED = "disliked"


class Desirability(Enum):
    DESIRABLE = "desirable"
    UNDESIRABLE = "undesirable"


class Temporal(Enum):
    HAPPENED = "happened"
    PROSPECTIVE = "prospective"


class Outcome(Enum):
    CONFIRMED = "confirmed"
    DISCONFIRMED = "disconfirmed"


@dataclass(frozen=True)
class Anticipation:
    """What was anticipated and whether the anticipation held up."""

    anticipated_desirability: Desirability
    outcome: Outcome


@dataclass(frozen=True)
class AppraisalFrame:
    subject: Subject
    desirability: Desirability
    temporal: Temporal
    desirability_magnitude: Ordinal = Ordinal.MEDIUM
    likelihood: Ordinal = Ordinal.MEDIUM
    liking: Liking | None = None
    anticipation: Anticipation | None = None

    def __post_init__(self) -> None:
        if self.temporal is Temporal.PROSPECTIVE and self.anticipation is not None:
            raise FrameError(
                "prospective frames must have anticipation = none "
                "(an anticipation record implies the event already resolved)"
            )

    def is_canonical(self) -> bool:
        """Whether the frame also follows the canonical-form conventions."""
        if (self.liking is not None) != (self.subject is Subject.OTHER):
            return False
        if self.subject is Subject.OTHER and self.anticipation is not None:
            return False
        if self.anticipation is not None:
            resolved = (
                self.anticipation.anticipated_desirability
                if self.anticipation.outcome is Outcome.CONFIRMED
                else _flip(self.anticipation.anticipated_desirability)
            )
            if self.desirability is not resolved:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "subject": self.subject.value,
            "liking": None if self.liking is None else self.liking.value,
            "desirability": self.desirability.value,
            "desirability_magnitude": self.desirability_magnitude.label,
            "temporal": self.temporal.value,
            "anticipation": None
            if self.anticipation is None
            else {
                "anticipated_desirability": self.anticipation.anticipated_desirability.value,
                "outcome": self.anticipation.outcome.value,
            },
            "likelihood": self.likelihood.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AppraisalFrame":
        known = {
            "subject",
            "liking",
            "desirability",
            "desirability_magnitude",
            "temporal",
            "anticipation",
            "likelihood",
        }
        extra = set(data) - known
        if extra:
            raise FrameError(f"unknown frame fields: {sorted(extra)}")

        def need(name: str) -> object:
            if name not in data:
                raise FrameError(f"missing frame field {name!r}")
            return data[name]

        def enum(kind, value, name):
            try:
                return kind(value)
            except ValueError:
                raise FrameError(f"bad value {value!r} for {name}") from None

        ant = data.get("anticipation")
        anticipation = None
        if ant is not None:
            if not isinstance(ant, dict):
                raise FrameError("anticipation must be null or an object")
            anticipation = Anticipation(
                enum(Desirability, ant.get("anticipated_desirability"), "anticipated_desirability"),
                enum(Outcome, ant.get("outcome"), "outcome"),
            )
        liking = data.get("liking")
        return cls(
            subject=enum(Subject, need("subject"), "subject"),
            desirability=enum(Desirability, need("desirability"), "desirability"),
            temporal=enum(Temporal, need("temporal"), "temporal"),
            desirability_magnitude=Ordinal.from_label(
                str(data.get("desirability_magnitude", "medium"))
            ),
            likelihood=Ordinal.from_label(str(data.get("likelihood", "medium"))),
            liking=None if liking is None else enum(Liking, liking, "liking"),
            anticipation=anticipation,
        )


class EmotionLabel(Enum):
    JOY = "Joy"
    DISTRESS = "Distress"
    HAPPY_FOR = "HappyFor"
    PITY = "Pity"
    GLOATING = "Gloating"
    RESENTMENT = "Resentment"
    HOPE = "Hope"
    FEAR = "Fear"
    SATISFACTION = "Satisfaction"
    DESPAIR = "Despair"
    RELIEF = "Relief"
    DISAPPOINTMENT = "Disappointment"


@dataclass(frozen=True)
class EmotionPrediction:
    label: EmotionLabel
    intensity: Ordinal
    rule_id: str
    rationale: str


@dataclass(frozen=True)
class Condition:
    """One named check of a rule, with the expectation spelled out."""

    name: str
    expected: str
    test: Callable[[AppraisalFrame], bool] = field(compare=False)


@dataclass(frozen=True)
class Rule:
    rule_id: str
    label: EmotionLabel
    tier: str  # "anticipation" | "fortunes" | "prospect" | "wellbeing"
    text: str
    conditions: tuple[Condition, ...]

    def matches(self, frame: AppraisalFrame) -> bool:
        return all(c.test(frame) for c in self.conditions)


@dataclass(frozen=True)
class RuleTrace:
    """Evaluation record of one rule: every condition with its verdict."""

    rule_id: str
    checks: tuple[tuple[str, str, bool], ...]  # (name, expected, passed)
    fired: bool


@dataclass(frozen=True)
class EngineConfig:
    """Tunables for the parts the rule table leaves open.

    ``disconfirmation_keeps_anticipated_likelihood``: relief and
    disappointment rate intensity by how likely the anticipated event
    seemed (a strong expectation overturned hits harder). Set to False
    to invert the likelihood for disconfirmed anticipations instead, so
    intensity tracks how unexpected the actual outcome was.
    """

    disconfirmation_keeps_anticipated_likelihood: bool = True


_DEFAULT_CONFIG = EngineConfig()


def _flip(d: Desirability) -> Desirability:
    return (
        Desirability.UNDESIRABLE
        if d is Desirability.DESIRABLE
        else Desirability.DESIRABLE
    )


def effective_desirability(frame: AppraisalFrame) -> Desirability:
    """Event desirability from the appraiser's own point of view.

    A desirable event for a disliked person is undesirable to the
    appraiser, and vice versa; everything else passes through unchanged.
    """
    if frame.subject is Subject.OTHER and frame.liking is Liking.DISLIKED:
        return _flip(frame.desirability)
    return frame.desirability


def is_positive_event(frame: AppraisalFrame) -> bool:
    """Whether the frame resolves positively for the appraiser.

    With an anticipation record the verdict comes from the record (a
    confirmed hope or a disconfirmed fear is positive); otherwise from
    the effective desirability.
    """
    if frame.anticipation is not None:
        ant = frame.anticipation
        confirmed = ant.outcome is Outcome.CONFIRMED
        desirable = ant.anticipated_desirability is Desirability.DESIRABLE
        return confirmed == desirable
    return effective_desirability(frame) is Desirability.DESIRABLE


def _no_anticipation(f: AppraisalFrame) -> bool:
    return f.anticipation is None


def _own_or_unknown(f: AppraisalFrame) -> bool:
    return not (f.subject is Subject.OTHER and f.liking is not None)


def _anticipation_rule(rule_id, label, text, desirable: bool, confirmed: bool) -> Rule:
    want_d = Desirability.DESIRABLE if desirable else Desirability.UNDESIRABLE
    want_o = Outcome.CONFIRMED if confirmed else Outcome.DISCONFIRMED
    return Rule(
        rule_id,
        label,
        "anticipation",
        text,
        (
            Condition(
                "anticipation", "present", lambda f: f.anticipation is not None
            ),
            Condition(
                "anticipated_desirability",
                want_d.value,
                lambda f: f.anticipation is not None
                and f.anticipation.anticipated_desirability is want_d,
            ),
            Condition(
                "outcome",
                want_o.value,
                lambda f: f.anticipation is not None and f.anticipation.outcome is want_o,
            ),
        ),
    )


def _fortunes_rule(rule_id, label, text, liked: bool, desirable: bool) -> Rule:
    want_l = Liking.LIKED if liked else Liking.DISLIKED
    want_d = Desirability.DESIRABLE if desirable else Desirability.UNDESIRABLE
    return Rule(
        rule_id,
        label,
        "fortunes",
        text,
        (
            Condition("anticipation", "none", _no_anticipation),
            Condition(
                "temporal", "happened", lambda f: f.temporal is Temporal.HAPPENED
            ),
            Condition("subject", "other", lambda f: f.subject is Subject.OTHER),
            Condition("liking", want_l.value, lambda f: f.liking is want_l),
            Condition(
                "desirability", want_d.value, lambda f: f.desirability is want_d
            ),
        ),
    )


def _prospect_rule(rule_id, label, text, desirable: bool) -> Rule:
    want = Desirability.DESIRABLE if desirable else Desirability.UNDESIRABLE
    return Rule(
        rule_id,
        label,
        "prospect",
        text,
        (
            Condition("anticipation", "none", _no_anticipation),
            Condition(
                "temporal",
                "prospective",
                lambda f: f.temporal is Temporal.PROSPECTIVE,
            ),
            Condition(
                "effective desirability",
                want.value,
                lambda f: effective_desirability(f) is want,
            ),
        ),
    )


def _wellbeing_rule(rule_id, label, text, desirable: bool) -> Rule:
    want = Desirability.DESIRABLE if desirable else Desirability.UNDESIRABLE
    return Rule(
        rule_id,
        label,
        "wellbeing",
        text,
        (
            Condition("anticipation", "none", _no_anticipation),
            Condition(
                "temporal", "happened", lambda f: f.temporal is Temporal.HAPPENED
            ),
            Condition(
                "scope", "own outcome, or another person of unknown liking", _own_or_unknown
            ),
            Condition(
                "effective desirability",
                want.value,
                lambda f: effective_desirability(f) is want,
            ),
        ),
    )


# Rule sentences match the embedded elicitation fixture verbatim, uneven
# punctuation included; a fixture test keeps the two in sync.
_RULES: tuple[Rule, ...] = (
    _anticipation_rule(
        "satisfaction",
        EmotionLabel.SATISFACTION,
        "An anticipated desirable event for Anne has indeed happened.",
        desirable=True,
        confirmed=True,
    ),
    _anticipation_rule(
        "despair",
        EmotionLabel.DESPAIR,
        "An anticipated undesirable event for Anne has indeed happened.",
        desirable=False,
        confirmed=True,
    ),
    _anticipation_rule(
        "relief",
        EmotionLabel.RELIEF,
        "An anticipated undesirable event for Anne did not happen.",
        desirable=False,
        confirmed=False,
    ),
    _anticipation_rule(
        "disappointment",
        EmotionLabel.DISAPPOINTMENT,
        "An anticipated desirable event for Anne did not happen.",
        desirable=True,
        confirmed=False,
    ),
    _fortunes_rule(
        "happy_for",
        EmotionLabel.HAPPY_FOR,
        "a desirable event for a friend of Anne just happened",
        liked=True,
        desirable=True,
    ),
    _fortunes_rule(
        "pity",
        EmotionLabel.PITY,
        "an undesirable event for a friend of Anne just happened",
        liked=True,
        desirable=False,
    ),
    _fortunes_rule(
        "gloating",
        EmotionLabel.GLOATING,
        "an undesirable event for an enemy of Anne just happened",
        liked=False,
        desirable=False,
    ),
    _fortunes_rule(
        "resentment",
        EmotionLabel.RESENTMENT,
        "a desirable event for an enemy of Anne just happened.",
        liked=False,
        desirable=True,
    ),
    _prospect_rule(
        "hope",
        EmotionLabel.HOPE,
        "a desirable event for Anne might happen in the future.",
        desirable=True,
    ),
    _prospect_rule(
        "fear",
        EmotionLabel.FEAR,
        "an undesirable event for Anne might happen in the future.",
        desirable=False,
    ),
    _wellbeing_rule(
        "joy",
        EmotionLabel.JOY,
        "a desirable event for Anne just happened",
        desirable=True,
    ),
    _wellbeing_rule(
        "distress",
        EmotionLabel.DISTRESS,
        "an undesirable event for Anne just happened",
        desirable=False,
    ),
)


def rule_set() -> tuple[Rule, ...]:
    """The 12 rules in evaluation order, most specific tier first.

    Anticipation outcomes come before fortunes of others, then prospect,
    then plain well-being. The ordering is what keeps a confirmed
    anticipation from degenerating into mere joy or distress.
    """
    return _RULES


def intensity(frame: AppraisalFrame, config: EngineConfig = _DEFAULT_CONFIG) -> Ordinal:
    """Combine desirability magnitude and likelihood into one level.

    The result is the floor of the ordinal mean: with low=1, medium=2,
    high=3, intensity = (magnitude + likelihood) // 2.
    """
    likelihood = frame.likelihood
    if (
        frame.anticipation is not None
        and frame.anticipation.outcome is Outcome.DISCONFIRMED
        and not config.disconfirmation_keeps_anticipated_likelihood
    ):
        likelihood = Ordinal(4 - likelihood)
    return Ordinal((frame.desirability_magnitude + likelihood) // 2)


def appraise(frame: AppraisalFrame, config: EngineConfig = _DEFAULT_CONFIG) -> EmotionPrediction:
    """Return the emotion of the first (and only) rule the frame satisfies."""
    for rule in _RULES:
        if rule.matches(frame):
            return EmotionPrediction(
                label=rule.label,
                intensity=intensity(frame, config),
                rule_id=rule.rule_id,
                rationale=f"rule {rule.rule_id}: {rule.text}",
            )
    raise FrameError("no rule matched; the rule set is meant to be total")


def explain(frame: AppraisalFrame) -> list[RuleTrace]:
    """Trace rule evaluation up to and including the firing rule."""
    traces: list[RuleTrace] = []
    for rule in _RULES:
        checks = tuple((c.name, c.expected, c.test(frame)) for c in rule.conditions)
        fired = all(passed for _, _, passed in checks)
        traces.append(RuleTrace(rule.rule_id, checks, fired))
        if fired:
            return traces
    raise FrameError("no rule matched; the rule set is meant to be total")


def enumerate_frames() -> Iterator[AppraisalFrame]:
    """All 648 valid frames: every field combination except the invalid
    pairing of a prospective event with an anticipation record."""
    anticipations: tuple[Anticipation | None, ...] = (None,) + tuple(
        Anticipation(d, o) for d in Desirability for o in Outcome
    )
    for subject, liking, desirability, temporal, ant, mag, lik in itertools.product(
        Subject,
        (None, Liking.LIKED, Liking.DISLIKED),
        Desirability,
        Temporal,
        anticipations,
        Ordinal,
        Ordinal,
    ):
        if temporal is Temporal.PROSPECTIVE and ant is not None:
            continue
        yield AppraisalFrame(
            subject=subject,
            desirability=desirability,
            temporal=temporal,
            desirability_magnitude=mag,
            likelihood=lik,
            liking=liking,
            anticipation=ant,
        )


def canonical_case_frames() -> dict[EmotionLabel, AppraisalFrame]:
    """Canonical frame encodings of the twelve elicitation situations.

    Magnitude is medium throughout; likelihood is high for events that
    already resolved and medium for open prospects.
    """
    own = dict(subject=Subject.SELF, temporal=Temporal.HAPPENED, likelihood=Ordinal.HIGH)
    d, u = Desirability.DESIRABLE, Desirability.UNDESIRABLE

    def other(liking: Liking, desirability: Desirability) -> AppraisalFrame:
        return AppraisalFrame(
            subject=Subject.OTHER,
            desirability=desirability,
            temporal=Temporal.HAPPENED,
            likelihood=Ordinal.HIGH,
            liking=liking,
        )

    def anticipated(anticipated: Desirability, outcome: Outcome) -> AppraisalFrame:
        resolved = anticipated if outcome is Outcome.CONFIRMED else _flip(anticipated)
        return AppraisalFrame(
            desirability=resolved,
            anticipation=Anticipation(anticipated, outcome),
            **own,
        )

    def prospect(desirability: Desirability) -> AppraisalFrame:
        return AppraisalFrame(
            subject=Subject.SELF,
            desirability=desirability,
            temporal=Temporal.PROSPECTIVE,
            likelihood=Ordinal.MEDIUM,
        )

    return {
        EmotionLabel.JOY: AppraisalFrame(desirability=d, **own),
        EmotionLabel.DISTRESS: AppraisalFrame(desirability=u, **own),
        EmotionLabel.HAPPY_FOR: other(Liking.LIKED, d),
        EmotionLabel.PITY: other(Liking.LIKED, u),
        EmotionLabel.GLOATING: other(Liking.DISLIKED, u),
        EmotionLabel.RESENTMENT: other(Liking.DISLIKED, d),
        EmotionLabel.HOPE: prospect(d),
        EmotionLabel.FEAR: prospect(u),
        EmotionLabel.SATISFACTION: anticipated(d, Outcome.CONFIRMED),
        EmotionLabel.DESPAIR: anticipated(u, Outcome.CONFIRMED),
        EmotionLabel.RELIEF: anticipated(u, Outcome.DISCONFIRMED),
        EmotionLabel.DISAPPOINTMENT: anticipated(d, Outcome.DISCONFIRMED),
    }
