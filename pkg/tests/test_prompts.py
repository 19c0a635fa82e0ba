import pytest
from hypothesis import given
from hypothesis import strategies as st

from chatocc.affect import Scale, VadTriple, parse_signature
from chatocc.occ import EmotionLabel, Ordinal, rule_set
from chatocc.prompts import (
    DOMINANCE_CLAUSE,
    EmotionLabelError,
    PromptParseError,
    VadTableError,
    WordPairError,
    format_vad_table,
    numbered_block,
    parse_emotion_label,
    parse_vad_table,
    parse_word_mapping,
    parse_word_pair,
    render_chatocc_prompt,
    render_numeric_mapping_prompt,
    render_octant_prompt,
    render_sentiment_prompt,
    render_word_pick_prompt,
    sentiment_instruction,
    template,
    template_text,
)

GOLDEN_CASES = [
    ("P1", {"dominance_clause": True}, "p1_with_dominance.txt"),
    ("P1", {"dominance_clause": False}, "p1_without_dominance.txt"),
    ("P2", {}, "p2.txt"),
    ("P3", {}, "p3.txt"),
    ("P3-perspective", {}, "p3_perspective.txt"),
    ("P4", {}, "p4.txt"),
    ("P5", {}, "p5.txt"),
]


class TestTemplates:
    @pytest.mark.parametrize("template_id,kwargs,filename", GOLDEN_CASES)
    def test_byte_identical_to_golden(self, golden_dir, template_id, kwargs, filename):
        expected = (golden_dir / filename).read_text(encoding="utf-8")
        assert template_text(template_id, **kwargs) == expected

    def test_unknown_template_id(self):
        with pytest.raises(KeyError, match="unknown template id"):
            template("P9")

    def test_dominance_clause_toggle(self):
        with_clause = template_text("P1", dominance_clause=True)
        without = template_text("P1", dominance_clause=False)
        assert DOMINANCE_CLAUSE in with_clause
        assert DOMINANCE_CLAUSE not in without
        assert "dominance assesses the extent" not in without
        # removing the clause deletes exactly one sentence plus its space
        assert len(with_clause) - len(without) == len(DOMINANCE_CLAUSE) + 1

    def test_characteristic_phrases(self):
        assert "real-live situation" in template_text("P4")
        assert "Use ONLY these emotion rules" in template_text("P5")
        assert "“event”" in template_text("P5")  # curly quotes survive
        assert "you may not use other words" in template_text("P3-perspective")

    def test_no_trailing_newline(self):
        for template_id in ("P1", "P2", "P3", "P3-perspective", "P4", "P5"):
            assert not template_text(template_id).endswith("\n")


class TestSentimentPrompt:
    def test_block_replaces_slot(self):
        texts = [f"situation {i}" for i in range(1, 21)]
        prompt = render_sentiment_prompt(True, texts)
        assert "[BLOCK OF ANET]" not in prompt
        lines = prompt.splitlines()
        assert lines[1] == "1. situation 1"
        assert lines[-1] == "20. situation 20"
        assert len(lines) == 21

    def test_instruction_alone_has_no_slot(self):
        text = sentiment_instruction()
        assert "[BLOCK OF ANET]" not in text
        assert text.endswith("Just acknowledge you got it.")

    def test_empty_block_rejected(self):
        with pytest.raises(ValueError, match="empty stimulus block"):
            render_sentiment_prompt(True, [])

    def test_numbered_block(self):
        assert numbered_block(["a", "b"]) == "1. a\n2. b"


class TestMappingAndWordPrompts:
    def test_numeric_mapping_prompt_is_static(self, golden_dir):
        assert render_numeric_mapping_prompt() == (
            golden_dir / "p2.txt"
        ).read_text(encoding="utf-8")

    def test_word_pick_substitution(self):
        prompt = render_word_pick_prompt("A dog barks.", ["happy", "angry"])
        assert prompt.startswith("A dog barks. Please pick the two words")
        assert prompt.endswith("affective meaning: happy, angry")

    def test_word_pick_perspective_variant(self):
        prompt = render_word_pick_prompt(
            "A dog barks.", ["happy", "angry"], perspective=True
        )
        assert "Describe the feeling of the individual" in prompt
        assert prompt.endswith("(you may not use other words): happy, angry")

    def test_word_pick_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            render_word_pick_prompt("", ["happy"])
        with pytest.raises(ValueError):
            render_word_pick_prompt("A dog barks.", [])


class TestOctantPrompt:
    def test_corner_octant_words(self):
        prompt = render_octant_prompt(parse_signature("V+A-D-"))
        assert "matches high valence, low arousal, low dominance?" in prompt
        assert "[LOW,HIGH]" not in prompt

    def test_all_high(self):
        prompt = render_octant_prompt(parse_signature("V+A+D+"))
        assert "high valence, high arousal, high dominance" in prompt

    def test_neutral_octant(self):
        prompt = render_octant_prompt(parse_signature("neutral"))
        assert "neutral valence, neutral arousal, neutral dominance" in prompt
        assert "[LOW,HIGH]" not in prompt


class TestChatoccPrompt:
    def test_rules_and_situation_substituted(self):
        rules = [(r.label.value, r.text) for r in rule_set()]
        prompt = render_chatocc_prompt(rules, "Anne wins a prize.")
        assert "[RULES FROM TABLE]" not in prompt
        assert "[SITUATION FROM TABLE]" not in prompt
        assert prompt.endswith("Here is the situation: Anne wins a prize.")
        rule_lines = [
            line for line in prompt.splitlines() if line.startswith(tuple(
                label.value for label in EmotionLabel
            ))
        ]
        assert len(rule_lines) == 12
        assert rule_lines[0].count(":") >= 1

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError, match="empty rule list"):
            render_chatocc_prompt([], "Anne wins a prize.")
        with pytest.raises(ValueError, match="empty situation"):
            render_chatocc_prompt([("Joy", "rule")], "")


def unit(v, a, d):
    return VadTriple(v, a, d, Scale.UNIT_0_1)


class TestVadTableParsing:
    def test_pipe_table(self):
        text = "| 1 | 0.81 | 0.93 | 0.55 |\n| 2 | 0.20 | 0.10 | 0.90 |"
        rows = parse_vad_table(text, 2)
        assert rows[0].key == "1"
        assert rows[0].vad == unit(0.81, 0.93, 0.55)
        assert rows[1].vad == unit(0.2, 0.1, 0.9)

    def test_whitespace_aligned_table(self):
        text = "1   0.81   0.93   0.55\n2   0.20   0.10   0.90"
        rows = parse_vad_table(text, 2)
        assert [r.key for r in rows] == ["1", "2"]

    def test_header_and_separator_skipped(self):
        text = (
            "| Sentence | Valence | Arousal | Dominance |\n"
            "|---|---|---|---|\n"
            "| 1 | 0.81 | 0.93 | 0.55 |"
        )
        rows = parse_vad_table(text, 1)
        assert rows[0].key == "1"

    def test_prose_wrapper_ignored(self):
        text = "Here are the values:\n| 1 | 0.5 | 0.5 | 0.5 |\nHope that helps!"
        assert len(parse_vad_table(text, 1)) == 1

    def test_multiword_key(self):
        rows = parse_vad_table("Sentence 1: 0.81 0.93 0.55", 1)
        assert rows[0].key == "Sentence 1"

    def test_missing_key_defaults_to_position(self):
        rows = parse_vad_table("0.81 0.93 0.55\n0.20 0.10 0.90", 2)
        assert [r.key for r in rows] == ["1", "2"]

    def test_out_of_range_value_locates_cell(self):
        text = "| 1 | 0.81 | 0.93 | 0.55 |\n| 2 | 0.20 | 1.50 | 0.90 |"
        with pytest.raises(VadTableError) as exc_info:
            parse_vad_table(text, 2)
        assert exc_info.value.row == 2
        assert exc_info.value.column == "a"

    def test_row_count_mismatch(self):
        with pytest.raises(VadTableError, match="expected 20 data rows, found 1"):
            parse_vad_table("| 1 | 0.81 | 0.93 | 0.55 |", 20)

    def test_error_is_prompt_parse_error(self):
        with pytest.raises(PromptParseError):
            parse_vad_table("", 1)

    def test_format_round_trip_fixed(self):
        rows = [("1", unit(0.81, 0.93, 0.55)), ("2", unit(0.0, 0.5, 1.0))]
        text = format_vad_table(rows)
        assert text == "| 1 | 0.81 | 0.93 | 0.55 |\n| 2 | 0.00 | 0.50 | 1.00 |"
        parsed = parse_vad_table(text, 2)
        assert [(r.key, r.vad) for r in parsed] == rows

    @given(
        st.lists(
            st.tuples(
                st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)
            ),
            min_size=1,
            max_size=25,
        )
    )
    def test_format_parse_round_trip(self, triples):
        rows = [(str(i), unit(*t)) for i, t in enumerate(triples, start=1)]
        parsed = parse_vad_table(format_vad_table(rows), len(rows))
        for (key, original), row in zip(rows, parsed):
            assert row.key == key
            for got, want in zip(row.vad.components(), original.components()):
                assert got == float(f"{want:.2f}")


WORDS = [
    "excited",
    "aroused",
    "serious",
    "astonished",
    "bored",
    "mildly annoyed",
    "relaxed",
]


class TestWordPairParsing:
    def test_plain_pair(self):
        pick = parse_word_pair("excited, aroused", WORDS)
        assert pick.primary == ("excited", "aroused")
        assert pick.alternates == ()
        assert pick.hallucinated == frozenset()

    def test_parenthesized_alternate(self):
        pick = parse_word_pair("serious (mildly_annoyed), astonished", WORDS)
        assert pick.primary == ("serious", "astonished")
        assert pick.alternates == ("mildly annoyed",)
        assert pick.hallucinated == frozenset()

    def test_underscore_and_case_normalization(self):
        pick = parse_word_pair("Mildly_Annoyed; BORED", WORDS)
        assert pick.primary == ("mildly annoyed", "bored")

    def test_hallucinated_words_flagged(self):
        pick = parse_word_pair("excited, panicked", WORDS)
        assert pick.primary == ("excited", "panicked")
        assert pick.hallucinated == frozenset({"panicked"})

    def test_prose_reply_scanned_for_known_words(self):
        pick = parse_word_pair(
            "I would say the person sounds quite excited and maybe a bit bored.",
            WORDS,
        )
        assert pick.primary == ("excited", "bored")

    def test_single_word_rejected(self):
        with pytest.raises(WordPairError, match="need 2"):
            parse_word_pair("excited", WORDS)

    def test_empty_reply_rejected(self):
        with pytest.raises(WordPairError):
            parse_word_pair("", WORDS)

    def test_extra_words_kept_out_of_primary(self):
        pick = parse_word_pair("excited, aroused, serious", WORDS)
        assert pick.primary == ("excited", "aroused")


class TestWordMappingParsing:
    def test_full_mapping(self):
        text = "1. excited\n2. bored\n3. serious"
        assert parse_word_mapping(text, 3) == [
            (1, "excited"),
            (2, "bored"),
            (3, "serious"),
        ]

    def test_alternate_separators(self):
        assert parse_word_mapping("1: excited\n2) bored", 2) == [
            (1, "excited"),
            (2, "bored"),
        ]

    def test_gap_rejected(self):
        with pytest.raises(PromptParseError, match="do not cover"):
            parse_word_mapping("1. excited\n3. bored", 2)

    def test_duplicate_rejected(self):
        with pytest.raises(PromptParseError, match="do not cover"):
            parse_word_mapping("1. excited\n1. bored", 2)

    def test_unparseable_line_rejected(self):
        with pytest.raises(PromptParseError, match="not a mapping line"):
            parse_word_mapping("first: excited", 1)


class TestEmotionLabelParsing:
    def test_simple_label(self):
        assert parse_emotion_label("Joy") == (EmotionLabel.JOY, None)

    def test_two_word_label(self):
        label, _ = parse_emotion_label("Happy for")
        assert label is EmotionLabel.HAPPY_FOR

    def test_embedded_with_intensity(self):
        label, level = parse_emotion_label(
            "The joy rule matches this situation (intensity: high)."
        )
        assert label is EmotionLabel.JOY
        assert level is Ordinal.HIGH

    def test_fears_confirmed_synonym(self):
        label, _ = parse_emotion_label("despair (fears-confirmed)")
        assert label is EmotionLabel.DESPAIR

    def test_abbreviated_labels(self):
        assert parse_emotion_label("Satisfac.")[0] is EmotionLabel.SATISFACTION
        assert parse_emotion_label("Disapp.")[0] is EmotionLabel.DISAPPOINTMENT

    def test_first_mention_wins(self):
        label, _ = parse_emotion_label("Fear, bordering on distress")
        assert label is EmotionLabel.FEAR

    def test_restricted_label_set(self):
        with pytest.raises(EmotionLabelError):
            parse_emotion_label("Joy", labels=[EmotionLabel.FEAR])

    def test_no_label_keeps_raw_text(self):
        with pytest.raises(EmotionLabelError) as exc_info:
            parse_emotion_label("I cannot decide.")
        assert exc_info.value.raw_text == "I cannot decide."
