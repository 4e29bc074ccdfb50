from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from psc2code.codelm import CodeLanguageModel
from psc2code.correct import (
    CorrectionConfig,
    CorrectionEntry,
    CorrectionReport,
    correct_crossframe,
    correct_video,
    flag_suspects,
    fold_ascii,
    levenshtein,
    strip_line_numbers,
    video_vocabulary,
)
from psc2code.ocr import CodeSnapshot


def snap(t, lines):
    return CodeSnapshot(t=t, lines=list(lines), words=[[] for _ in lines])


def model_of(unigram=None, structures=None):
    return CodeLanguageModel(unigram=dict(unigram or {}),
                             structures=dict(structures or {}))


def lev_oracle(a, b):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1,
                   d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


class TestLevenshtein:
    @pytest.mark.parametrize("a,b,want", [
        ("", "", 0),
        ("abc", "", 3),
        ("", "abc", 3),
        ("kitten", "sitting", 3),
        ("flaw", "lawn", 2),
        ("same", "same", 0),
    ])
    def test_hand_cases(self, a, b, want):
        assert levenshtein(a, b) == want

    @given(st.text(alphabet="abc", max_size=10), st.text(alphabet="abc", max_size=10))
    def test_matches_recursive_oracle(self, a, b):
        want = lev_oracle(a, b)
        assert levenshtein(a, b) == want
        assert levenshtein(b, a) == want

    @given(st.text(alphabet="abc", max_size=10), st.text(alphabet="abc", max_size=10),
           st.integers(min_value=0, max_value=6))
    def test_cap_contract(self, a, b, cap):
        """Within the cap the value is exact; beyond it, only 'exceeded'."""
        want = lev_oracle(a, b)
        got = levenshtein(a, b, cap=cap)
        if want <= cap:
            assert got == want
        else:
            assert got > cap

    def test_length_gap_short_circuits(self):
        assert levenshtein("a" * 50, "a", cap=3) == 4


class TestStripLineNumbers:
    def test_numbered_gutter_removed(self):
        s = snap(0, ["1 public class A {", "2     int x;", "3 }"])
        assert strip_line_numbers(s).lines == ["public class A {", "    int x;", "}"]

    def test_indentation_after_number_survives(self):
        s = snap(0, ["11     if (x) {", "12     }"])
        assert strip_line_numbers(s).lines == ["    if (x) {", "    }"]

    def test_four_of_five_lines_suffice(self):
        s = snap(0, ["1 a", "2 b", "3 c", "4 d", "}"])
        assert strip_line_numbers(s).lines == ["a", "b", "c", "d", "}"]

    def test_three_of_five_do_not(self):
        s = snap(0, ["1 a", "2 b", "3 c", "x", "}"])
        assert strip_line_numbers(s) is s

    def test_decreasing_numbers_left_alone(self):
        # Looks like array math, not a gutter.
        s = snap(0, ["9 - x", "4 - y"])
        assert strip_line_numbers(s) is s

    def test_repeated_numbers_allowed(self):
        s = snap(0, ["1 a", "1 b", "2 c"])
        assert strip_line_numbers(s).lines == ["a", "b", "c"]

    def test_empty_snapshot(self):
        s = snap(0, [])
        assert strip_line_numbers(s) is s

    def test_idempotent_on_stripped_output(self):
        s = snap(0, ["1 int a;", "2 int b;"])
        once = strip_line_numbers(s)
        assert strip_line_numbers(once).lines == once.lines


class TestFoldAscii:
    def test_typographic_lookalikes(self):
        s = snap(0, ["String s = “hi”;", "it’s x — y", "a − b", "a b"])
        assert fold_ascii(s).lines == ['String s = "hi";', "it's x - y",
                                       "a - b", "a b"]

    def test_accents_fold(self):
        assert fold_ascii(snap(0, ["café", "naïve"])).lines == ["cafe", "naive"]

    def test_plain_ascii_unchanged(self):
        lines = ["public int x = 1; // ok"]
        assert fold_ascii(snap(0, lines)).lines == lines

    @given(st.text(max_size=40))
    def test_idempotent(self, text):
        once = fold_ascii(snap(0, [text])).lines
        assert fold_ascii(snap(0, once)).lines == once


class TestVideoVocabulary:
    def test_needs_min_distinct_frames(self):
        snaps = [snap(t, ["int counter = size;"]) for t in range(3)]
        snaps.append(snap(9, ["int counter;"]))
        vocab = video_vocabulary(snaps, min_frames=3)
        assert "counter" in vocab
        assert "size" in vocab
        assert "int" not in vocab  # keyword, not an identifier

    def test_repeats_within_one_frame_count_once(self):
        snaps = [snap(0, ["x x x x x"]), snap(1, ["x"])]
        assert video_vocabulary(snaps, min_frames=3) == frozenset()


class TestFlagSuspects:
    MODEL = model_of(unigram={"counter": 9, "size": 4},
                     structures={"int IDL = NUM ;": 20, "}": 30})

    def test_rare_identifier_flagged(self):
        flags = flag_suspects(snap(0, ["int countar = 1;"]), self.MODEL)
        line = flags.lines[0]
        assert [t.text for t, s in zip(line.tokens, line.word_suspect) if s] == ["countar"]
        assert not line.line_suspect

    def test_known_identifier_clean(self):
        flags = flag_suspects(snap(0, ["int counter = 1;"]), self.MODEL)
        assert not any(flags.lines[0].word_suspect)

    def test_video_vocabulary_rescues(self):
        flags = flag_suspects(snap(0, ["int mySpecialName = 1;"]), self.MODEL,
                              video_vocab=frozenset({"mySpecialName"}))
        assert not any(flags.lines[0].word_suspect)

    def test_non_identifiers_never_flagged(self):
        flags = flag_suspects(snap(0, ['return "weirdliteral" + 123456;']), self.MODEL)
        assert not any(flags.lines[0].word_suspect)

    def test_rare_structure_flags_line(self):
        flags = flag_suspects(snap(0, ["int counter - 1;", "}"]), self.MODEL)
        assert flags.lines[0].line_suspect
        assert not flags.lines[1].line_suspect

    def test_blank_line_not_suspect(self):
        flags = flag_suspects(snap(0, ["", "   "]), self.MODEL)
        assert not any(l.line_suspect for l in flags.lines)


def run_correction(snaps, model, cfg=CorrectionConfig()):
    vocab = video_vocabulary(snaps, cfg.vocab_min_frames)
    flags = [flag_suspects(s, model, vocab, cfg) for s in snaps]
    return correct_crossframe(snaps, flags, model, cfg)


class TestCrossFrameCorrection:
    MODEL = model_of(
        unigram={"button": 9, "addItemListener": 9, "this": 9},
        structures={"IDL . IDL ( this ) ;": 20})

    def frames(self):
        clean = "button.addItemListener(this);"
        lines = [clean, clean, "button.addItemLiftener(this);", clean, clean]
        return [snap(t, [line]) for t, line in enumerate(lines)]

    def test_misread_word_repaired_from_other_frames(self):
        corrected, report = run_correction(self.frames(), self.MODEL)
        assert corrected[2].lines == ["button.addItemListener(this);"]
        assert len(report.entries) == 1
        entry = report.entries[0]
        assert (entry.t, entry.line_no, entry.mechanism) == (2, 0, "cross_frame_word")
        assert report.words_corrected == 1
        assert report.words_flagged == 1

    def test_clean_frames_untouched(self):
        corrected, _ = run_correction(self.frames(), self.MODEL)
        for t in (0, 1, 3, 4):
            assert corrected[t].lines == ["button.addItemListener(this);"]

    def test_line_replaced_wholesale_when_structure_is_off(self):
        model = model_of(unigram={"counter": 9},
                         structures={"int IDL = NUM ;": 20})
        snaps = [snap(0, ["int counter = 1;"]), snap(1, ["int counter = 1;"]),
                 snap(2, ["int counter - 1;"])]
        corrected, report = run_correction(snaps, model)
        assert corrected[2].lines == ["int counter = 1;"]
        assert report.entries[0].mechanism == "cross_frame_line"

    def test_corpus_fallback_when_video_has_no_evidence(self):
        model = model_of(unigram={"counter": 9},
                         structures={"int IDL = NUM ;": 20})
        corrected, report = run_correction([snap(0, ["int countar = 1;"])], model)
        assert corrected[0].lines == ["int counter = 1;"]
        assert report.entries[0].mechanism == "corpus_word"

    def test_unexplained_suspect_left_alone(self):
        # A half-typed identifier has no candidate within the edit budget.
        model = model_of(unigram={"addItemListener": 9},
                         structures={"IDL ;": 20})
        corrected, report = run_correction([snap(0, ["addIt;"])], model)
        assert corrected[0].lines == ["addIt;"]
        assert report.words_flagged == 1
        assert report.words_corrected == 0

    def test_string_literals_never_corrected(self):
        model = model_of(unigram={"println": 9, "addItemListener": 9},
                         structures={"IDL ( STR ) ;": 20})
        snaps = [snap(0, ['println("addItemLiftener");'])]
        corrected, report = run_correction(snaps, model)
        assert corrected[0].lines == ['println("addItemLiftener");']
        assert report.entries == []

    def test_candidate_ties_prefer_frequency(self):
        model = model_of(unigram={"fooHandlerB": 9, "fooHandlerC": 9},
                         structures={"IDL ;": 20})
        # Both trusted words sit one edit away; the more frequent one wins.
        snaps = [snap(0, ["fooHandlerB;"]), snap(1, ["fooHandlerB;"]),
                 snap(2, ["fooHandlerC;"]), snap(3, ["fooHandlerB;"]),
                 snap(4, ["fooHandlerZ;"])]
        corrected, _ = run_correction(snaps, model)
        assert corrected[4].lines == ["fooHandlerB;"]

    def test_candidate_ties_break_lexicographically(self):
        model = model_of(unigram={"fooHandlerC": 9, "fooHandlerB": 9},
                         structures={"IDL ;": 20})
        snaps = [snap(0, ["fooHandlerC;"]), snap(1, ["fooHandlerB;"]),
                 snap(2, ["fooHandlerZ;"])]
        corrected, _ = run_correction(snaps, model)
        assert corrected[2].lines == ["fooHandlerB;"]

    def test_case_class_is_preserved(self):
        # An uppercase-initial suspect only draws uppercase-initial candidates.
        model = model_of(unigram={"Widget": 9, "widgex": 9},
                         structures={"IDU IDL ;": 20, "IDU ;": 20, "IDL ;": 20})
        snaps = [snap(0, ["Widgex x;"]), snap(1, ["Widget x;"]),
                 snap(2, ["Widget x;"])]
        corrected, _ = run_correction(snaps, model)
        assert corrected[0].lines == ["Widget x;"]

    def test_report_count_invariants(self):
        corrected, report = run_correction(self.frames(), self.MODEL)
        assert report.words_corrected <= report.words_flagged <= report.words_checked
        # Two identifiers per frame; "this" lexes as a keyword, not a word.
        assert report.words_checked == 10

    def test_second_pass_changes_nothing(self):
        corrected, _ = run_correction(self.frames(), self.MODEL)
        again, report = run_correction(corrected, self.MODEL)
        assert [s.lines for s in again] == [s.lines for s in corrected]
        assert report.entries == []


class TestCorrectVideo:
    MODEL = model_of(
        unigram={"String": 9, "s": 9, "counter": 9},
        structures={"IDU IDL = STR ;": 20, "int IDL = NUM ;": 20, "}": 20})

    def frames(self):
        def numbered(lines):
            return [f"{i + 1} {line}" for i, line in enumerate(lines)]

        clean = ['String s = “hi”;', "int counter = 0;", "}"]
        misread = ['String s = “hi”;', "int countar = 0;", "}"]
        return [snap(0, numbered(clean)), snap(1, numbered(clean)),
                snap(2, numbered(misread)), snap(3, numbered(clean))]

    def test_full_pass(self):
        corrected, report = correct_video(self.frames(), self.MODEL)
        want = ['String s = "hi";', "int counter = 0;", "}"]
        assert all(s.lines == want for s in corrected)
        mechanisms = [e.mechanism for e in report.entries]
        # Normalization entries come first (grouped per frame), repairs after.
        assert mechanisms == (["line_number_strip"] * 3 + ["ascii_fold"]) * 4 \
            + ["cross_frame_word"]
        assert report.words_checked == 12
        assert report.words_flagged == 1
        assert report.words_corrected == 1


class TestReportTypes:
    def test_entry_requires_change(self):
        with pytest.raises(ValueError):
            CorrectionEntry(0, 0, "same", "same", "cross_frame_word")

    def test_entry_requires_known_mechanism(self):
        with pytest.raises(ValueError):
            CorrectionEntry(0, 0, "a", "b", "autocorrect")

    def test_report_rejects_inconsistent_counts(self):
        with pytest.raises(ValueError):
            CorrectionReport(words_checked=1, words_flagged=2, words_corrected=0)

    def test_entry_round_trip(self):
        entry = CorrectionEntry(3, 1, "a", "b", "corpus_word")
        assert entry.to_dict() == {"t": 3, "line_no": 1, "original": "a",
                                   "corrected": "b", "mechanism": "corpus_word"}
