import warnings

import numpy as np
import pytest

from puzzlequbo import CONST0, CONST1, neg, pos
from puzzlequbo.board import (
    Board,
    InfeasibleError,
    Region,
    VarMap,
    adjacency_cells,
    alias_cross,
    alias_equal,
    diagonal_cells,
    orthogonal_cells,
    resolve,
)


class TestBoard:
    def test_cells_row_major_and_inactive(self):
        b = Board(2, 3, inactive={(1, 2)})
        assert list(b.cells()) == [(1, 1), (1, 3), (2, 1), (2, 2), (2, 3)]
        assert b.num_active == 5
        assert not b.is_active((1, 2))
        assert b.row_cells(1) == [(1, 1), (1, 3)]

    def test_needs_an_active_cell(self):
        with pytest.raises(ValueError):
            Board(1, 1, inactive={(1, 1)})

    def test_inactive_out_of_bounds(self):
        with pytest.raises(ValueError):
            Board(2, 2, inactive={(3, 1)})

    def test_normalize_wraps_only_flagged_axes(self):
        b = Board(4, 5, wrap_rows=True)
        assert b.normalize(5, 2) == (1, 2)
        assert b.normalize(0, 2) == (4, 2)
        assert b.normalize(2, 6) is None

    def test_toroidal_warning(self):
        with pytest.warns(UserWarning):
            Board(6, 6, wrap_rows=True, wrap_cols=True).toroidal_warning()
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            Board(7, 7, wrap_rows=True, wrap_cols=True).toroidal_warning()

    def test_region_validation(self):
        with pytest.raises(ValueError):
            Region("a", {(1, 1)}, t=2)
        assert Region("a", {(1, 1)}, q=2, p=1).remaining == 1


class TestDiagonals:
    def test_distance_one_others(self):
        got = diagonal_cells(Board(5, 5), (3, 3), 1, "others")
        assert got == {(2, 2), (2, 4), (4, 2), (4, 4)}

    def test_pp_unbounded_from_corner(self):
        got = diagonal_cells(Board(5, 5), (1, 1), None, "pp")
        assert got == {(2, 2), (3, 3), (4, 4), (5, 5)}

    def test_full_includes_cell(self):
        got = diagonal_cells(Board(3, 3), (2, 2), None, "full")
        assert got == {(1, 1), (1, 3), (2, 2), (3, 1), (3, 3)}

    def test_pp_visits_each_pair_once(self):
        b = Board(4, 4)
        directed = {(c, o) for c in b.cells() for o in diagonal_cells(b, c, None, "pp")}
        unordered = {frozenset(p) for p in directed}
        assert len(directed) == len(unordered)
        everything = {
            frozenset((c, o)) for c in b.cells() for o in diagonal_cells(b, c, None, "others")
        }
        assert unordered == everything

    def test_inactive_cells_skipped(self):
        b = Board(3, 3, inactive={(2, 2)})
        assert diagonal_cells(b, (1, 1), None, "others") == {(3, 3)}

    def test_wrapped_diagonal_stops_at_start(self):
        b = Board(3, 3, wrap_rows=True, wrap_cols=True)
        got = diagonal_cells(b, (1, 1), None, "others")
        assert (1, 1) not in got
        assert got == {(2, 2), (3, 3), (2, 3), (3, 2)}

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            diagonal_cells(Board(2, 2), (1, 1), 1, "sideways")


class TestAdjacency:
    def test_interior_and_corner(self):
        assert len(adjacency_cells(Board(3, 3), (2, 2))) == 8
        assert len(adjacency_cells(Board(3, 3), (1, 1))) == 3

    def test_below_only_interior(self):
        got = adjacency_cells(Board(3, 3), (2, 2), below_only=True)
        assert got == {(2, 3), (3, 1), (3, 2), (3, 3)}

    def test_below_only_counts_each_pair_once(self):
        for n, m in ((3, 3), (4, 5), (1, 4)):
            b = Board(n, m)
            directed = [(c, o) for c in b.cells() for o in adjacency_cells(b, c, below_only=True)]
            unordered = {frozenset(p) for p in directed}
            assert len(directed) == len(unordered)
            full = {frozenset((c, o)) for c in b.cells() for o in adjacency_cells(b, c)}
            assert unordered == full

    def test_orthogonal(self):
        assert orthogonal_cells(Board(3, 3), (1, 1)) == {(1, 2), (2, 1)}


class TestVarMap:
    def test_identity_indices(self):
        vm = VarMap(Board(3, 3))
        assert vm.resolve((2, 3)) == pos(5)
        assert vm.num_free == 9

    def test_index_seven(self):
        vm = VarMap(Board(3, 4))
        assert resolve(vm, (2, 3)) == pos(6)
        vm.fix((1, 1), 0)
        assert resolve(vm, (2, 3)) == pos(5)

    def test_fixed_cell_is_constant(self):
        vm = VarMap(Board(2, 2))
        vm.fix((1, 2), 1)
        assert vm.resolve((1, 2)) == CONST1
        assert vm.state((1, 2)) == ("fixed", 1)

    def test_equal_then_cross(self):
        vm = VarMap(Board(1, 3))
        a, b, c = (1, 1), (1, 2), (1, 3)
        alias_equal(vm, a, b)
        alias_cross(vm, b, c)
        assert vm.resolve(c) == neg(vm.resolve(a).index)
        assert vm.num_free == 1

    def test_alias_then_fix_propagates(self):
        vm = VarMap(Board(2, 2))
        vm.alias_equal((1, 1), (1, 2))
        vm.fix((1, 1), 1)
        assert vm.resolve((1, 2)) == CONST1

    def test_cross_with_fixed_zero(self):
        vm = VarMap(Board(2, 2))
        vm.fix((1, 1), 0)
        vm.alias_cross((1, 1), (2, 1))
        assert vm.resolve((2, 1)) == CONST1

    def test_contradiction_recorded(self):
        vm = VarMap(Board(1, 2))
        vm.alias_equal((1, 1), (1, 2))
        vm.alias_cross((1, 1), (1, 2))
        assert vm.conflict is not None
        with pytest.raises(InfeasibleError):
            vm.resolve((1, 1))

    def test_fix_conflict(self):
        vm = VarMap(Board(1, 2))
        vm.fix((1, 1), 1)
        vm.fix((1, 1), 0, rule="regularity")
        assert vm.conflict.rule == "regularity"
        with pytest.raises(InfeasibleError, match="regularity"):
            vm.expand([0])

    def test_root_is_leftmost(self):
        vm = VarMap(Board(3, 3))
        vm.alias_equal((3, 3), (1, 2))
        assert vm.find((3, 3))[0] == (1, 2)
        assert vm.state((3, 3))[0] == "alias"

    def test_inactive_fixed_zero(self):
        vm = VarMap(Board(2, 2, inactive={(1, 1)}))
        assert vm.resolve((1, 1)) == CONST0
        assert vm.summary() == {"free": 3, "fixed": 0, "aliased": 0, "inactive": 1}

    def test_expand_and_project(self):
        vm = VarMap(Board(2, 2))
        vm.alias_cross((1, 1), (1, 2))
        vm.fix((2, 2), 1)
        board = vm.expand([1, 0])
        assert board.tolist() == [[1, 0], [0, 1]]
        assert vm.project(board).tolist() == [1, 0]
        assert vm.project(np.array([[1, 1], [0, 1]])) is None

    def test_copy_is_independent(self):
        vm = VarMap(Board(1, 2))
        other = vm.copy()
        other.fix((1, 1), 1)
        assert vm.num_free == 2 and other.num_free == 1

    def test_self_alias_rejected(self):
        with pytest.raises(ValueError):
            VarMap(Board(1, 2)).alias_equal((1, 1), (1, 1))

    def test_out_of_board(self):
        with pytest.raises(ValueError):
            VarMap(Board(1, 2)).fix((2, 2), 1)
