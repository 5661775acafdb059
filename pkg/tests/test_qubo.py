import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puzzlequbo import (
    CONST0,
    CONST1,
    QuarterInt,
    Qubo,
    StructureError,
    export_qubo,
    import_qubo,
    neg,
    pos,
)
from puzzlequbo.qubo import Literal, add_linear_term, add_pair_interaction, add_square_penalty, energy

from ._instances import random_penalty, random_qubo, symbolic_penalty


class TestQuarterInt:
    def test_of_accepts_quarter_grid(self):
        assert QuarterInt.of(Fraction(9, 4)).numerator == 9
        assert QuarterInt.of(3).numerator == 12
        assert QuarterInt.of(0.75).numerator == 3

    def test_of_rejects_off_grid(self):
        with pytest.raises(ValueError):
            QuarterInt.of(Fraction(1, 3))

    def test_arithmetic_and_order(self):
        a, b = QuarterInt(1), QuarterInt(6)
        assert a + b == QuarterInt(7)
        assert b - a == Fraction(5, 4)
        assert -a < a < b
        assert a * 4 == 1
        assert str(QuarterInt(9)) == "9/4"
        assert str(QuarterInt(8)) == "2"

    def test_fraction_product_must_stay_on_grid(self):
        assert QuarterInt(2) * Fraction(1, 2) == QuarterInt(1)
        with pytest.raises(ValueError):
            QuarterInt(1) * Fraction(1, 2)

    def test_hash_matches_equality(self):
        assert len({QuarterInt(4), QuarterInt.of(1)}) == 1

    def test_non_integer_numerator(self):
        with pytest.raises(TypeError):
            QuarterInt(1.5)


class TestLiteral:
    def test_affine_forms(self):
        assert pos(2).affine() == (0, 1)
        assert neg(2).affine() == (1, -1)
        assert CONST1.affine() == (1, 0)
        assert CONST0.affine() == (0, 0)

    def test_negate(self):
        assert pos(3).negate() == neg(3)
        assert CONST0.negate() == CONST1

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            Literal("maybe", 0)


class TestSquarePenalty:
    def test_two_literal_one_hot(self):
        q = add_square_penalty(Qubo(2), 1, [pos(0), pos(1)])
        assert q.offset == 1
        assert q.linear == {0: QuarterInt.of(-1), 1: QuarterInt.of(-1)}
        assert q.quadratic == {(0, 1): QuarterInt.of(2)}
        assert [q.energy(b) for b in ((0, 0), (1, 0), (1, 1))] == [1, 0, 1]

    def test_three_halves_target(self):
        q = Qubo(3).add_square_penalty(Fraction(3, 2), [pos(0), pos(1), pos(2)])
        assert q.offset == Fraction(9, 4)
        assert all(v == -2 for v in q.linear.values())
        assert all(v == 2 for v in q.quadratic.values())
        for bits in itertools.product((0, 1), repeat=3):
            expected = Fraction(1, 4) if sum(bits) in (1, 2) else Fraction(9, 4)
            assert q.energy(bits) == expected

    def test_negated_and_constant_literals(self):
        q = Qubo(2).add_square_penalty(1, [pos(0), neg(1), CONST1])
        got = {bits: q.energy(bits) for bits in itertools.product((0, 1), repeat=2)}
        assert got == {(0, 0): 1, (0, 1): 0, (1, 0): 4, (1, 1): 1}

    def test_repeated_variable_is_merged(self):
        q = Qubo(1).add_square_penalty(1, [pos(0), pos(0)])
        assert [q.energy((b,)) for b in (0, 1)] == [1, 1]
        assert q.num_quadratic == 0

    def test_rejects_third_integer_target(self):
        with pytest.raises(ValueError):
            Qubo(1).add_square_penalty(Fraction(1, 3), [pos(0)])

    def test_rejects_unknown_variable(self):
        with pytest.raises(StructureError):
            Qubo(1).add_square_penalty(1, [pos(4)])

    def test_weight_must_be_positive_integer(self):
        with pytest.raises(ValueError):
            Qubo(1).add_square_penalty(1, [pos(0)], weight=0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 5))
    def test_weight_scales_linearly(self, seed, w):
        rng = random.Random(seed)
        target, lits, _ = random_penalty(rng, 4)
        one = Qubo(4).add_square_penalty(target, lits)
        many = Qubo(4).add_square_penalty(target, lits, weight=w)
        assert many == one.scaled(w)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10_000))
    def test_matches_symbolic_expansion(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 4)
        target, lits, w = random_penalty(rng, n)
        q = Qubo(n).add_square_penalty(target, lits, weight=w)
        for bits in itertools.product((0, 1), repeat=n):
            assert q.energy(bits).to_fraction() == symbolic_penalty(target, lits, w, bits)


class TestPairAndLinear:
    def test_pair(self):
        q = add_pair_interaction(Qubo(2), pos(0), pos(1), 1)
        assert q.quadratic == {(0, 1): QuarterInt.of(1)}
        assert [q.energy(b) for b in ((0, 0), (0, 1), (1, 0), (1, 1))] == [0, 0, 0, 1]

    def test_cross_pair_from_two_calls(self):
        q = Qubo(2)
        q.add_pair_interaction(pos(0), pos(1), 1)
        q.add_pair_interaction(neg(0), neg(1), 1)
        for x, y in itertools.product((0, 1), repeat=2):
            assert (q.energy((x, y)) == 0) == (x != y)

    def test_constant_folding(self):
        q = Qubo(1).add_pair_interaction(pos(0), CONST1, 3)
        assert q.linear == {0: QuarterInt.of(3)}
        assert Qubo(1).add_pair_interaction(pos(0), CONST0, 3).num_linear == 0

    def test_same_variable_pair_becomes_linear(self):
        q = Qubo(1).add_pair_interaction(pos(0), pos(0), 2)
        assert q.linear == {0: QuarterInt.of(2)}

    def test_linear_term(self):
        q = add_linear_term(Qubo(4), pos(3), -1)
        assert q.linear == {3: QuarterInt.of(-1)}
        r = add_linear_term(Qubo(1), CONST1, -1)
        assert r.offset == -1

    def test_nine_rewards(self):
        q = Qubo(9)
        for i in range(9):
            q.add_linear_term(pos(i), -1)
        assert q.energy([1] * 9) == -9
        assert min(q.energy(b) for b in itertools.product((0, 1), repeat=9)) == -9


class TestEnergy:
    def test_empty_model_is_offset(self):
        q = Qubo(0).add_offset(Fraction(3, 4))
        assert energy(q, []) == Fraction(3, 4)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            Qubo(2).energy([0])

    def test_arrays_agree_with_energy(self):
        rng = random.Random(5)
        for _ in range(20):
            q = random_qubo(rng, 8)
            offset, h, indptr, indices, data = q.to_arrays()
            for bits in itertools.product((0, 1), repeat=min(q.num_vars, 5)):
                x = list(bits) + [1] * (q.num_vars - len(bits))
                e = offset + sum(int(h[i]) for i in range(q.num_vars) if x[i])
                for i in range(q.num_vars):
                    for p in range(indptr[i], indptr[i + 1]):
                        if indices[p] > i and x[i] and x[indices[p]]:
                            e += int(data[p])
                assert e == q.energy4(x)


class TestSerialization:
    def test_export_example(self):
        q = Qubo(2).add_square_penalty(1, [pos(0), pos(1)])
        assert export_qubo(q) == "QUBO 2\nC 4\nL 0 -4\nL 1 -4\nQ 0 1 8\n"

    def test_diagonal_key_rejected(self):
        with pytest.raises(StructureError):
            import_qubo("QUBO 2\nC 0\nQ 1 1 4\n")

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "QUBX 2\n",
            "QUBO 2\nC 1\nC 2\n",
            "QUBO 2\nL 0 1\nL 0 2\n",
            "QUBO 2\nL 2 1\n",
            "QUBO 2\nQ 0 2 1\n",
            "QUBO 2\nQ 1 0 1\n",
            "QUBO 2\nZ 0 1\n",
            "QUBO 2\nL 0 x\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(StructureError):
            import_qubo(text)

    def test_comments_and_blank_lines(self):
        q = import_qubo("# model\nQUBO 1\n\nC 3\n# linear\nL 0 -2\n")
        assert q.offset == Fraction(3, 4)
        assert q.linear == {0: QuarterInt(-2)}

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_round_trip(self, seed):
        q = random_qubo(random.Random(seed))
        back = import_qubo(export_qubo(q))
        assert back == q
        assert export_qubo(back) == export_qubo(q)
