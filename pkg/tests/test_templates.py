import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import naive_reference as naive
from _helpers import make_template, random_geometry, random_template
from irisbench.templates import (
    GeometryMismatchError,
    InvalidShiftError,
    NoOverlapError,
    Polarity,
    PolarityError,
    RotationPolicy,
    Score,
    Template,
    TemplateError,
    best_of_rotations,
    fractional_hamming,
    meets_threshold,
    read_irtb,
    rotate_template,
    shift_sequence,
    write_irtb,
)


class FakeThreshold:
    def __init__(self, value, polarity=Polarity.DISSIMILARITY):
        self.value = value
        self.polarity = polarity


class TestTemplate:
    def test_geometry_must_be_positive(self):
        with pytest.raises(TemplateError):
            Template(0, 4, 1, [], [])

    def test_planes_must_match_geometry(self):
        with pytest.raises(TemplateError):
            Template(1, 4, 1, [1, 0, 0], [1, 1, 1])

    def test_fully_occluded_rejected(self):
        with pytest.raises(TemplateError):
            Template(1, 4, 1, [1, 0, 0, 0], [0, 0, 0, 0])

    def test_immutable(self):
        t = make_template(1, 4, 1, [1, 0, 0, 0])
        with pytest.raises(AttributeError):
            t.rows = 2
        with pytest.raises(ValueError):
            t.code[0] = False

    def test_equality_and_hash(self):
        a = make_template(1, 4, 1, [1, 0, 0, 0])
        b = make_template(1, 4, 1, [1, 0, 0, 0])
        c = make_template(1, 4, 1, [0, 1, 0, 0])
        assert a == b and hash(a) == hash(b)
        assert a != c


class TestRotate:
    def test_zero_shift_is_identity(self):
        t = random_template(np.random.default_rng(1), 3, 6, 2)
        assert rotate_template(t, 0) == t

    def test_full_revolution_composes_to_identity(self):
        t = random_template(np.random.default_rng(2), 2, 5, 1)
        r = t
        for _ in range(5):
            r = rotate_template(r, 1)
        assert r == t

    def test_hand_simulated_shift(self):
        t = make_template(1, 4, 1, [1, 0, 0, 0])
        assert rotate_template(t, 1).code.astype(int).tolist() == [0, 1, 0, 0]

    def test_shift_too_large(self):
        t = make_template(1, 4, 1, [1, 0, 0, 0])
        with pytest.raises(InvalidShiftError):
            rotate_template(t, 4)
        with pytest.raises(InvalidShiftError):
            rotate_template(t, -4)

    def test_matches_naive_rotation(self, rng):
        for _ in range(50):
            rows, cols, bpc = random_geometry(rng)
            t = random_template(rng, rows, cols, bpc, mask_density=0.8)
            shift = int(rng.integers(-(cols - 1), cols))
            r = rotate_template(t, shift)
            assert r.code.astype(int).tolist() == naive.rotate_bits(
                t.code.astype(int).tolist(), rows, cols, bpc, shift
            )
            assert r.mask.astype(int).tolist() == naive.rotate_bits(
                t.mask.astype(int).tolist(), rows, cols, bpc, shift
            )


class TestFractionalHamming:
    def test_self_comparison_is_zero(self, rng):
        t = random_template(rng, 2, 8, 2)
        assert fractional_hamming(t, t).value == 0.0

    def test_complement_is_one(self):
        code = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=bool)
        a = make_template(1, 8, 1, code)
        b = make_template(1, 8, 1, ~code)
        assert fractional_hamming(a, b).value == 1.0

    def test_worked_example(self):
        a = make_template(1, 8, 1, [1, 0, 1, 1, 0, 0, 1, 0])
        b = make_template(1, 8, 1, [1, 0, 0, 1, 0, 1, 1, 0])
        assert fractional_hamming(a, b).value == 0.25

    def test_geometry_mismatch(self):
        a = make_template(1, 8, 1, np.zeros(8, bool) | True)
        b = make_template(2, 4, 1, np.ones(8, bool))
        with pytest.raises(GeometryMismatchError):
            fractional_hamming(a, b)

    def test_empty_joint_mask(self):
        a = Template(1, 4, 1, [1, 0, 0, 0], [1, 1, 0, 0])
        b = Template(1, 4, 1, [1, 0, 0, 0], [0, 0, 1, 1])
        with pytest.raises(NoOverlapError):
            fractional_hamming(a, b)

    def test_packed_equals_naive_loop(self, rng):
        for _ in range(300):
            rows, cols, bpc = random_geometry(rng)
            a = random_template(rng, rows, cols, bpc, mask_density=0.7)
            b = random_template(rng, rows, cols, bpc, mask_density=0.7)
            num, den = naive.hamming_counts(
                a.code.astype(int).tolist(),
                a.mask.astype(int).tolist(),
                b.code.astype(int).tolist(),
                b.mask.astype(int).tolist(),
            )
            if den == 0:
                with pytest.raises(NoOverlapError):
                    fractional_hamming(a, b)
            else:
                assert fractional_hamming(a, b).value == num / den

    def test_symmetry(self, rng):
        for _ in range(100):
            rows, cols, bpc = random_geometry(rng)
            a = random_template(rng, rows, cols, bpc, mask_density=0.8)
            b = random_template(rng, rows, cols, bpc, mask_density=0.8)
            try:
                assert fractional_hamming(a, b).value == fractional_hamming(b, a).value
            except NoOverlapError:
                pass

    def test_shift_equivariance(self, rng):
        for _ in range(100):
            rows, cols, bpc = random_geometry(rng)
            a = random_template(rng, rows, cols, bpc, mask_density=0.8)
            b = random_template(rng, rows, cols, bpc, mask_density=0.8)
            s = int(rng.integers(-(cols - 1), cols))
            try:
                base = fractional_hamming(a, b).value
            except NoOverlapError:
                continue
            shifted = fractional_hamming(rotate_template(a, s), rotate_template(b, s))
            assert shifted.value == base


class TestBestOfRotations:
    def test_degenerate_range_equals_plain_distance(self, rng):
        a = random_template(rng, 2, 6, 1)
        b = random_template(rng, 2, 6, 1)
        score, shift = best_of_rotations(a, b, (0, 0))
        assert shift == 0
        assert score.value == fractional_hamming(a, b).value

    def test_enumerate_all_shifts_oracle(self, rng):
        for _ in range(100):
            rows, cols, bpc = random_geometry(rng)
            a = random_template(rng, rows, cols, bpc, mask_density=0.75)
            b = random_template(rng, rows, cols, bpc, mask_density=0.75)
            lo = int(rng.integers(-(cols - 1), 1))
            hi = int(rng.integers(0, cols))
            expected = naive.best_of_rotations(
                a.code.astype(int).tolist(), a.mask.astype(int).tolist(),
                b.code.astype(int).tolist(), b.mask.astype(int).tolist(),
                rows, cols, bpc, lo, hi,
            )
            if expected is None:
                with pytest.raises(NoOverlapError):
                    best_of_rotations(a, b, (lo, hi))
            else:
                score, shift = best_of_rotations(a, b, (lo, hi))
                assert (score.value, shift) == expected

    def test_inverse_shift_reconstruction(self):
        rng = np.random.default_rng(3)
        a = random_template(rng, 2, 24, 2)
        b = rotate_template(a, 3)
        score, shift = best_of_rotations(a, b, (-7, 7))
        assert score.value == 0.0
        assert shift == -3

    def test_recovers_zero_whenever_inverse_in_range(self, rng):
        for _ in range(50):
            rows, cols, bpc = random_geometry(rng)
            a = random_template(rng, rows, cols, bpc)
            s = int(rng.integers(-(cols - 1), cols))
            score, _ = best_of_rotations(a, rotate_template(a, s), (-abs(s), abs(s)))
            assert score.value == 0.0

    def test_monotone_under_range_expansion(self, rng):
        for _ in range(80):
            rows, cols, bpc = random_geometry(rng)
            a = random_template(rng, rows, cols, bpc, mask_density=0.9)
            b = random_template(rng, rows, cols, bpc, mask_density=0.9)
            k = int(rng.integers(0, cols - 1))
            wider = int(rng.integers(k, cols))
            narrow_score, _ = best_of_rotations(a, b, (-k, k))
            wide_score, _ = best_of_rotations(a, b, (-wider, wider))
            assert wide_score.value <= narrow_score.value

    def test_empty_range_rejected(self, rng):
        a = random_template(rng, 1, 4, 1)
        with pytest.raises(ValueError):
            best_of_rotations(a, a, (1, 0))

    def test_tie_break_precedence(self):
        assert shift_sequence(-2, 2) == (0, -1, 1, -2, 2)
        assert shift_sequence(0, 0) == (0,)


class TestScoreAndThreshold:
    def test_dissimilarity_bounds(self):
        with pytest.raises(ValueError):
            Score(1.2, Polarity.DISSIMILARITY)
        with pytest.raises(ValueError):
            Score(-0.1, Polarity.DISSIMILARITY)
        with pytest.raises(ValueError):
            Score(-3.0, Polarity.SIMILARITY)
        Score(45.0, Polarity.SIMILARITY)

    def test_polarity_never_mixes(self):
        a = Score(0.3, Polarity.DISSIMILARITY)
        b = Score(45.0, Polarity.SIMILARITY)
        with pytest.raises(PolarityError):
            a.better_than(b)
        with pytest.raises(PolarityError):
            meets_threshold(a, FakeThreshold(42.0, Polarity.SIMILARITY))

    def test_dissimilarity_decisions(self):
        assert meets_threshold(Score(0.30, Polarity.DISSIMILARITY), FakeThreshold(0.32))
        assert not meets_threshold(Score(0.33, Polarity.DISSIMILARITY), FakeThreshold(0.32))

    def test_similarity_decision(self):
        # similarity matchers accept at-or-above threshold (e.g. 45 vs 42)
        assert meets_threshold(
            Score(45.0, Polarity.SIMILARITY), FakeThreshold(42.0, Polarity.SIMILARITY)
        )
        assert not meets_threshold(
            Score(41.0, Polarity.SIMILARITY), FakeThreshold(42.0, Polarity.SIMILARITY)
        )


class TestRotationPolicy:
    def test_wide_must_cover_narrow(self):
        with pytest.raises(ValueError):
            RotationPolicy(narrow=7, wide=3, two_stage=True)

    def test_single_stage_uses_narrow_only(self):
        p = RotationPolicy(narrow=7)
        assert p.wide == 7
        assert p.effective_range == (-7, 7)
        assert p.extra_shifts == ()

    def test_two_stage_shift_split(self):
        p = RotationPolicy(narrow=1, wide=2, two_stage=True)
        assert p.narrow_shifts == (0, -1, 1)
        assert p.extra_shifts == (-2, 2)
        assert p.all_shifts == (0, -1, 1, -2, 2)
        assert p.n_narrow_shifts == 3 and p.n_wide_shifts == 5
        assert p.effective_shift_count == 5

    def test_nexus_style_counts(self):
        # 15 shifts on the initial scan, 43 when widened
        p = RotationPolicy(narrow=7, wide=21, two_stage=True)
        assert p.n_narrow_shifts == 15
        assert p.n_wide_shifts == 43

    def test_label_round_trip(self):
        for p in (RotationPolicy(7), RotationPolicy(7, 21, True)):
            assert RotationPolicy.from_label(p.label) == p


class TestIrtbFormat:
    def test_round_trip(self, rng, tmp_path):
        for _ in range(10):
            rows, cols, bpc = random_geometry(rng, max_bits=128)
            t = random_template(rng, rows, cols, bpc, mask_density=0.8)
            path = tmp_path / "t.irtb"
            write_irtb(t, path)
            assert read_irtb(path) == t

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.irtb"
        path.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(TemplateError):
            read_irtb(path)

    def test_truncated(self, tmp_path):
        t = make_template(2, 8, 2, np.ones(32, bool))
        path = tmp_path / "t.irtb"
        write_irtb(t, path)
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(TemplateError):
            read_irtb(path)

    def test_header_layout(self, tmp_path):
        t = make_template(2, 8, 2, np.arange(32) % 2)
        path = tmp_path / "t.irtb"
        write_irtb(t, path)
        raw = path.read_bytes()
        assert raw[:4] == b"IRTB"
        assert raw[4] == 1
        assert int.from_bytes(raw[5:7], "little") == 2
        assert int.from_bytes(raw[7:9], "little") == 8
        assert raw[9] == 2


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_hamming_properties_hypothesis(data):
    rows = data.draw(st.integers(1, 3))
    cols = data.draw(st.integers(2, 6))
    bpc = data.draw(st.integers(1, 2))
    n = rows * cols * bpc
    code_a = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    code_b = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    mask_a = data.draw(
        st.lists(st.booleans(), min_size=n, max_size=n).filter(lambda m: any(m))
    )
    mask_b = data.draw(
        st.lists(st.booleans(), min_size=n, max_size=n).filter(lambda m: any(m))
    )
    a = Template(rows, cols, bpc, code_a, mask_a)
    b = Template(rows, cols, bpc, code_b, mask_b)
    s = data.draw(st.integers(-(cols - 1), cols - 1))
    try:
        forward = fractional_hamming(a, b).value
    except NoOverlapError:
        return
    assert forward == fractional_hamming(b, a).value
    assert forward == fractional_hamming(rotate_template(a, s), rotate_template(b, s)).value
