import io
from pathlib import Path

import numpy as np
import pytest

from puzzlequbo import import_qubo
from puzzlequbo.cli import run
from puzzlequbo.pipeline import compile_problem
from puzzlequbo.problems import (
    ColouredPiecesProblem,
    MaxPiecesProblem,
    QueensProblem,
    TakuzuProblem,
    TentsTreesProblem,
)
from puzzlequbo.puzzlefile import ParseError, format_board, parse, parse_solution

PUZZLES = Path(__file__).resolve().parent.parent / "puzzles"

QUEENS4 = """\
type: nqueens
rows: 4
cols: 4
grid:
. . . .
. . . .
. . . .
. . . .
"""

QUEENS2 = "type: nqueens\nrows: 2\ncols: 2\ngrid:\n. .\n. .\n"


def write(tmp_path, text, name="p.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


class TestParse:
    def test_minimal_nqueens(self):
        puzzle = parse(QUEENS4)
        assert isinstance(puzzle.problem, QueensProblem)
        assert puzzle.problem.board.shape == (4, 4) and puzzle.problem.family == "nqueens"

    def test_symbol_line(self):
        text = "type: takuzu\nrows: 2\ncols: 2\ngrid:\n. .\n. .\nsymbols:\n= 1 1 1 2\n"
        p = parse(text).problem
        assert isinstance(p, TakuzuProblem) and len(p.symbols) == 1
        assert p.symbols[0].kind == "equal"

    def test_token_count_names_line(self):
        bad = QUEENS4.replace(". . . .\n. . . .\n. . . .\n. . . .", ". . . .\n. . .\n. . . .\n. . . .")
        with pytest.raises(ParseError) as err:
            parse(bad, source="q.txt")
        assert err.value.line == 6
        assert "q.txt:6" in str(err.value)

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("type: nqueens\nrows: 2\ncols: 2\n", "missing required key 'grid'"),
            ("type: sudoku\nrows: 1\ncols: 1\ngrid:\n.\n", "unknown puzzle type"),
            ("colour: red\n", "unknown key"),
            ("type: nqueens\nrows: x\ncols: 2\ngrid:\n. .\n. .\n", "integer"),
            ("type: nqueens\ntype: nqueens\n", "duplicate key"),
            ("stray\n", "before the first key"),
            ("type: nqueens\nrows: 2\ncols: 2\ngrid:\n. .\n", "grid has 1 lines"),
            ("type: takuzu\nrows: 2\ncols: 2\ngrid:\n. 2\n. .\n", "unexpected grid token"),
            ("type: takuzu\nrows: 2\ncols: 2\ngrid:\n. .\n. .\nsymbols:\n= 1 1 3 3\n", "outside"),
            ("type: takuzu\nrows: 2\ncols: 2\ngrid:\n. .\n. .\nsymbols:\n~ 1 1 1 2\n", "symbol lines"),
            ("type: tents\nrows: 2\ncols: 2\ngrid:\nT .\n. .\n", "counts-rows"),
            ("type: nqueens\nrows: 2\ncols: 2\ntoroidal: sideways\ngrid:\n. .\n. .\n", "toroidal"),
            ("type: general-queens\nrows: 2\ncols: 2\ngrid:\na a\nb b\nregions:\n1 1\n", "before any"),
            ("type: tents\nrows: 2\ncols: 2\ngrid:\nT .\n. .\ncounts-rows: 1 0\ncounts-cols: 0 0\n", "inconsistent"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(ParseError, match=fragment):
            parse(text)

    def test_comments_outside_grid(self):
        text = "# a comment\n" + QUEENS4.replace("grid:", "# another\ngrid:")
        assert parse(text).problem.board.shape == (4, 4)

    def test_inactive_cells_in_grid(self):
        p = parse("type: nqueens\nrows: 3\ncols: 3\ngrid:\n# . .\n. . .\n. . #\n").problem
        assert p.board.inactive == {(1, 1), (3, 3)}

    def test_lqueens_regions(self):
        p = parse((PUZZLES / "lqueens6.txt").read_text()).problem
        assert p.family == "lqueens" and len(p.regions) == 6

    def test_general_queens_region_overrides(self):
        text = (
            "type: general-queens\nrows: 2\ncols: 3\ngrid:\na a b\na b b\n"
            "regions:\nRa 0 1\nRz 1 0\n2 1\ndiagonal: inf\ncounts-rows: 1 1\ntoroidal: cols\n"
        )
        p = parse(text).problem
        regs = {r.id: r for r in p.regions}
        assert (regs["a"].q, regs["a"].t) == (0, 1)
        assert regs["z"].cells == {(2, 1)}
        assert p.diag_distance is None and p.board.wrap_cols and not p.board.wrap_rows
        assert p.row_targets == (1, 1)

    def test_tents(self):
        p = parse((PUZZLES / "tents.txt").read_text()).problem
        assert isinstance(p, TentsTreesProblem) and len(p.trees) == 3

    def test_pieces(self):
        text = "type: pieces-max\nrows: 1\ncols: 2\ngrid:\nR K\nweights:\nK 3\nlambda: 7\n"
        p = parse(text).problem
        assert isinstance(p, MaxPiecesProblem) and p.lam == 7 and p.weight((1, 2)) == 3
        text = "type: pieces-coloured\nrows: 1\ncols: 2\ngrid:\nN N\nregions:\nR1\n1 1\n1 2\ninitial:\nQ 1 1\n"
        p = parse(text).problem
        assert isinstance(p, ColouredPiecesProblem) and p.initial == {(1, 1)}

    def test_takuzu_extras(self):
        text = (
            "type: takuzu\nrows: 3\ncols: 4\ngrid:\n1 . . .\n. . . .\n. . . 0\n"
            "counts-rows: 2 2 2\ncounts-cols: 1 2 1 2\ninitial:\n0 2 2\nregions:\nR1 2\n1 2\n2 3\n"
            "diagonal-repetition: yes\nunique-lines: no\n"
        )
        p = parse(text).problem
        assert p.ones == {(1, 1)} and p.zeros == {(3, 4), (2, 2)}
        assert p.regions == ((frozenset({(1, 2), (2, 3)}), 2),)
        assert p.diagonal_repetition and not p.unique_lines


class TestBoards:
    def test_round_trip(self):
        puzzle = parse((PUZZLES / "tents.txt").read_text())
        values = np.zeros((4, 4), dtype=np.int8)
        values[0, 0] = 1
        rows = format_board(puzzle, values)
        assert rows[0] == "A T . ."
        assert np.array_equal(parse_solution(puzzle, "\n".join(rows)), values)

    def test_bad_solution(self):
        puzzle = parse(QUEENS4)
        with pytest.raises(ParseError, match="rows"):
            parse_solution(puzzle, "Q . . .\n")
        with pytest.raises(ParseError, match="token"):
            parse_solution(puzzle, "Q . . .\n. . X .\n. . . .\n. . . .\n")


class TestCommands:
    def test_solve_four_queens(self, tmp_path):
        code, out = invoke("solve", write(tmp_path, QUEENS4))
        assert code == 0
        assert out.count("Q") == 4
        assert "energy: 0" in out and "verifier: ok" in out

    def test_solve_two_queens_infeasible(self, tmp_path):
        code, out = invoke("solve", write(tmp_path, QUEENS2))
        assert code == 1
        assert "infeasible: exhaustive minimum 1 > floor 0" in out

    def test_parse_error_exit(self, tmp_path, capsys):
        code, _ = invoke("build", write(tmp_path, "type: nqueens\n"))
        assert code == 2
        assert "missing required key" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert invoke("build", str(tmp_path / "nope.txt"))[0] == 2

    def test_build(self, tmp_path):
        code, out = invoke("build", write(tmp_path, QUEENS4), "--machine")
        assert code == 0
        fields = dict(line.split("=", 1) for line in out.splitlines())
        assert list(fields) == ["family", "variables", "linear_terms", "quadratic_terms", "offset", "floor"]
        assert fields["variables"] == "16" and fields["quadratic_terms"] == "76"

    def test_reduce_tango(self):
        code, out = invoke("reduce", str(PUZZLES / "tango6.txt"))
        assert code == 0
        fields = dict(line.split(": ", 1) for line in out.splitlines())
        assert int(fields["free"]) <= 36 - 8 - 6 == int(fields["bound"])
        assert int(fields["aliased"]) == 6

    def test_reduce_infeasible(self, tmp_path):
        text = "type: takuzu\nrows: 4\ncols: 4\ngrid:\n1 1 1 .\n. . . .\n. . . .\n. . . .\n"
        code, out = invoke("reduce", write(tmp_path, text))
        assert code == 1 and "infeasible" in out

    def test_solve_anneal_tango(self):
        code, out = invoke("solve", str(PUZZLES / "tango6.txt"), "--method", "anneal", "--machine")
        assert code == 0
        fields = dict(line.split("=", 1) for line in out.splitlines())
        assert fields["energy"] == "12" == fields["floor"]
        assert fields["verifier"] == "ok" and fields["status"] == "solved"
        assert sum(1 for k in fields if k.startswith("grid.")) == 6

    def test_anneal_gives_up(self, tmp_path):
        code, out = invoke("solve", str(PUZZLES / "tango6.txt"), "--method", "anneal",
                           "--restarts", "1", "--sweeps", "1", "--seed", "3")
        assert code == 3 and "gave up" in out

    def test_takuzu_uniqueness_screened(self, tmp_path):
        text = "type: takuzu\nrows: 4\ncols: 4\ngrid:\n0 1 1 0\n. . . .\n. . . .\n. . . .\n"
        code, out = invoke("solve", write(tmp_path, text), "--method", "exhaustive")
        assert code == 0
        rows = out.splitlines()[:4]
        assert len(set(rows)) == 4

    def test_max_pieces(self):
        code, out = invoke("solve", str(PUZZLES / "knights.txt"))
        assert code == 0 and "energy: -5" in out and "weight: 5" in out

    def test_verify(self, tmp_path):
        puzzle = write(tmp_path, QUEENS4)
        good = write(tmp_path, ". Q . .\n. . . Q\nQ . . .\n. . Q .\n", "good.txt")
        bad = write(tmp_path, "Q . . .\n. . Q .\n. Q . .\n. . . Q\n", "bad.txt")
        assert invoke("verify", puzzle, "--solution", good)[0] == 0
        code, out = invoke("verify", puzzle, "--solution", bad)
        assert code == 1 and "diagonal" in out

    def test_count(self):
        code, out = invoke("count", str(PUZZLES / "queens8.txt"), "--cap", "10")
        assert code == 0
        assert "solutions: 10" in out and "capped: yes" in out

    def test_export_round_trip(self, tmp_path):
        path = write(tmp_path, (PUZZLES / "lqueens6.txt").read_text())
        target = tmp_path / "model.qubo"
        assert invoke("export", path, "--output", str(target))[0] == 0
        expected = compile_problem(parse((PUZZLES / "lqueens6.txt").read_text()).problem).qubo
        assert import_qubo(target.read_text()) == expected

    def test_export_stdout(self, tmp_path):
        code, out = invoke("export", write(tmp_path, QUEENS2))
        assert code == 0 and out.startswith("QUBO 4\nC 16\n")

    @pytest.mark.parametrize("name", ["queens4", "lqueens6", "tents", "tango6", "rooks", "knights"])
    def test_sample_puzzles_solve(self, name):
        assert invoke("solve", str(PUZZLES / f"{name}.txt"))[0] == 0
