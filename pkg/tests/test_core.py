import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jitterlab import RunCollection, accuracy_profile, ingest_classification, ingest_sequence
from jitterlab.core import AccuracyProfile, EvaluationSet, write_classification, write_sequence
from jitterlab.errors import (
    DuplicateId,
    EmptyEvalSet,
    LengthMismatch,
    MissingExample,
    ParseError,
    UnknownExample,
    UnknownLabel,
    UnknownLabelWarning,
)


def test_minimal_well_formed(jsonl):
    gold = jsonl("gold.jsonl", [{"id": "e1", "gold": "a"}, {"id": "e2", "gold": "b"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "a"}, {"id": "e2", "pred": "a"}])
    r2 = jsonl("r2.jsonl", [{"id": "e2", "pred": "b"}, {"id": "e1", "pred": "a"}])
    coll = ingest_classification([r1, r2], gold)
    assert coll.n_runs == 2
    assert coll.n_examples == 2
    assert coll.run_ids == ("r1", "r2")
    assert coll.eval_set.label_alphabet == ("a", "b")


def test_alignment_is_by_id_not_line_order(jsonl):
    gold = jsonl("gold.jsonl", [{"id": "e1", "gold": "a"}, {"id": "e2", "gold": "b"}])
    r1 = jsonl("r1.jsonl", [{"id": "e2", "pred": "b"}, {"id": "e1", "pred": "a"}])
    coll = ingest_classification([r1], gold)
    assert accuracy_profile(coll).per_run[0].correct == 2


def test_missing_example_names_id_and_run(jsonl):
    gold = jsonl("gold.jsonl", [{"id": "e1", "gold": "a"}, {"id": "e2", "gold": "b"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "a"}])
    with pytest.raises(MissingExample) as err:
        ingest_classification([r1], gold)
    assert err.value.example_id == "e2"
    assert err.value.run_id == "r1"
    assert "e2" in str(err.value) and "r1" in str(err.value)


def test_unknown_example(jsonl):
    gold = jsonl("gold.jsonl", [{"id": "e1", "gold": "a"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "a"}, {"id": "e9", "pred": "a"}])
    with pytest.raises(UnknownExample, match="e9"):
        ingest_classification([r1], gold)


def test_duplicate_gold_id(jsonl):
    gold = jsonl("gold.jsonl", [{"id": "e1", "gold": "a"}, {"id": "e1", "gold": "b"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "a"}])
    with pytest.raises(DuplicateId, match="e1"):
        ingest_classification([r1], gold)


def test_duplicate_run_ids(jsonl):
    gold = jsonl("gold.jsonl", [{"id": "e1", "gold": "a"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "a"}])
    with pytest.raises(DuplicateId):
        ingest_classification([r1, r1], gold)
    coll = ingest_classification([r1, r1], gold, run_ids=["first", "second"])
    assert coll.run_ids == ("first", "second")


def test_empty_gold(jsonl):
    gold = jsonl("gold.jsonl", [{"alphabet": ["a"]}])
    with pytest.raises(EmptyEvalSet):
        ingest_classification([], gold)


def test_alphabet_header_and_unknown_gold(jsonl):
    gold = jsonl("gold.jsonl", [{"alphabet": ["b", "a", "c"]}, {"id": "e1", "gold": "a"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "c"}])
    assert ingest_classification([r1], gold).eval_set.label_alphabet == ("b", "a", "c")
    bad = jsonl("bad.jsonl", [{"alphabet": ["a"]}, {"id": "e1", "gold": "z"}])
    with pytest.raises(UnknownLabel):
        ingest_classification([r1], bad)


def test_prediction_outside_alphabet_warns_and_counts_wrong(jsonl):
    gold = jsonl("gold.jsonl", [{"id": "e1", "gold": "a"}, {"id": "e2", "gold": "a"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "zzz"}, {"id": "e2", "pred": "a"}])
    with pytest.warns(UnknownLabelWarning, match="zzz"):
        coll = ingest_classification([r1], gold)
    assert accuracy_profile(coll).per_run[0].correct == 1


def test_blank_lines_and_unknown_keys_ignored(tmp_path):
    (tmp_path / "g.jsonl").write_text('\n{"id": "e1", "gold": "a", "extra": 1}\n\n')
    (tmp_path / "r.jsonl").write_text('{"id": "e1", "pred": "a", "score": 0.3}\n   \n')
    coll = ingest_classification([tmp_path / "r.jsonl"], tmp_path / "g.jsonl")
    assert coll.n_examples == 1


def test_parse_errors_carry_line_numbers(tmp_path):
    (tmp_path / "g.jsonl").write_text('{"id": "e1", "gold": "a"}\n{not json\n')
    with pytest.raises(ParseError) as err:
        ingest_classification([], tmp_path / "g.jsonl")
    assert err.value.line == 2
    (tmp_path / "g2.jsonl").write_text('{"id": "e1"}\n')
    with pytest.raises(ParseError, match=":1:.*gold"):
        ingest_classification([], tmp_path / "g2.jsonl")


# -- sequences ---------------------------------------------------------------


def test_sequence_single_example(jsonl):
    gold = jsonl("g.jsonl", [{"id": "s1", "tokens": ["a", "b", "c"], "gold": ["O", "B", "I"]}])
    r1 = jsonl("r1.jsonl", [{"id": "s1", "pred": ["O", "B", "O"]}])
    coll = ingest_sequence([r1], gold)
    assert coll.n_tokens == 3


def test_sequence_length_mismatch(jsonl):
    gold = jsonl("g.jsonl", [{"id": "s1", "tokens": ["a", "b", "c"], "gold": ["O", "B", "I"]}])
    r1 = jsonl("r1.jsonl", [{"id": "s1", "pred": ["O", "B"]}])
    with pytest.raises(LengthMismatch):
        ingest_sequence([r1], gold)


def test_sequence_total_tokens(jsonl):
    gold = jsonl("g.jsonl", [
        {"id": "s1", "tokens": list("abcd"), "gold": ["O"] * 4},
        {"id": "s2", "tokens": ["x"], "gold": ["O"]},
    ])
    runs = [jsonl(f"r{k}.jsonl", [{"id": "s1", "pred": ["O"] * 4}, {"id": "s2", "pred": ["B"]}])
            for k in range(3)]
    coll = ingest_sequence(runs, gold)
    assert coll.n_tokens == 5
    assert coll.n_runs == 3


def test_sequence_inherits_classification_errors(jsonl):
    gold = jsonl("g.jsonl", [{"id": "s1", "tokens": ["a"], "gold": ["O"]},
                             {"id": "s2", "tokens": ["b"], "gold": ["O"]}])
    r1 = jsonl("r1.jsonl", [{"id": "s1", "pred": ["O"]}])
    with pytest.raises(MissingExample):
        ingest_sequence([r1], gold)
    dup = jsonl("dup.jsonl", [{"id": "s1", "tokens": ["a"], "gold": ["O"]},
                              {"id": "s1", "tokens": ["b"], "gold": ["O"]}])
    with pytest.raises(DuplicateId):
        ingest_sequence([r1], dup)


def test_classification_file_read_as_sequence_is_a_parse_error(jsonl):
    gold = jsonl("g.jsonl", [{"id": "e1", "gold": "a"}])
    r1 = jsonl("r1.jsonl", [{"id": "e1", "pred": "a"}])
    with pytest.raises(ParseError, match=":1:"):
        ingest_sequence([r1], gold)


# -- accuracy ---------------------------------------------------------------


@pytest.mark.parametrize("correct, total, expected", [(10, 10, 1), (9, 10, 0.9), (0, 4, 0)])
def test_accuracy_profile_counts(correct, total, expected):
    gold = ["a"] * total
    preds = ["a"] * correct + ["b"] * (total - correct)
    coll = RunCollection.from_lists(gold, [preds], alphabet=["a", "b"])
    acc = accuracy_profile(coll).per_run[0]
    assert float(acc.accuracy) == pytest.approx(expected, abs=0)
    assert acc.accuracy + acc.error_rate == 1


def test_profile_from_accuracies_requires_whole_counts():
    prof = AccuracyProfile.from_accuracies([0.90, 0.91], 100)
    assert [r.correct for r in prof.per_run] == [90, 91]
    with pytest.raises(ValueError):
        AccuracyProfile.from_accuracies([0.905], 100)


labels = st.sampled_from(["a", "b", "c", "d"])


@st.composite
def collections(draw, max_runs=5):
    n = draw(st.integers(1, 20))
    n_runs = draw(st.integers(1, max_runs))
    gold = draw(st.lists(labels, min_size=n, max_size=n))
    runs = [draw(st.lists(labels, min_size=n, max_size=n)) for _ in range(n_runs)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnknownLabelWarning)
        return RunCollection.from_lists(gold, runs, alphabet=["a", "b", "c", "d"])


@settings(max_examples=60, deadline=None)
@given(collections(), st.randoms(use_true_random=False))
def test_accuracy_is_permutation_invariant_and_a_count_ratio(coll, rnd):
    before = accuracy_profile(coll)
    order = list(coll.eval_set.examples)
    rnd.shuffle(order)
    shuffled = RunCollection(EvaluationSet(tuple(order), coll.eval_set.label_alphabet), coll.runs)
    after = accuracy_profile(shuffled)
    assert before == after
    for r in before.per_run:
        assert (r.accuracy * coll.n_examples).denominator == 1


@settings(max_examples=40, deadline=None)
@given(collections())
def test_classification_round_trip(tmp_path_factory, coll):
    out = tmp_path_factory.mktemp("rt")
    gold, runs = write_classification(coll, out)
    again = ingest_classification(runs, gold)
    assert again == coll


def test_sequence_round_trip(tmp_path):
    rng = random.Random(3)
    from jitterlab.core import SequenceExample, SequenceRun, SequenceRunCollection
    examples = [SequenceExample(f"s{k}", [f"t{j}" for j in range(L)], [rng.choice("OBI") for _ in range(L)])
                for k, L in enumerate([3, 1, 4])]
    runs = [SequenceRun(f"r{m}", {ex.example_id: [rng.choice("OBI") for _ in ex.tokens] for ex in examples})
            for m in range(2)]
    coll = SequenceRunCollection(tuple(examples), tuple(runs))
    gold, paths = write_sequence(coll, tmp_path)
    assert ingest_sequence(paths, gold) == coll
