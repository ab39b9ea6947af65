"""Tests for CLI module.

This module tests the plankforge CLI commands and their exit codes.

Uses Click's CliRunner for CLI testing.
"""

import json
import math
from pathlib import Path
from typing import Any, Callable

import pytest
from click.testing import CliRunner

from plankforge import __version__
from plankforge.cli import cli
from tests.conftest import PYRAMID_VERTICES, SQUARE_VERTICES, TRIANGLE_VERTICES

BodyFile = Callable[[dict[str, Any], str], Path]

SQUARE = {"dim": 2, "type": "polygon", "vertices": SQUARE_VERTICES}
TRIANGLE = {"dim": 2, "type": "polygon", "vertices": TRIANGLE_VERTICES}
PYRAMID = {"dim": 3, "type": "polytope", "vertices": PYRAMID_VERTICES}


def _cover(runner: CliRunner, body: Path, tmp_path: Path, *extra: str) -> Path:
    output = tmp_path / "cover.json"
    result = runner.invoke(cli, ["cover", str(body), "--eps", "0.5", "-o", str(output), *extra])
    assert result.exit_code == 0, result.output
    return output


# =============================================================================
# A. Command Structure Tests
# =============================================================================


@pytest.mark.unit
class TestCommandStructure:
    """Tests for CLI command structure and options."""

    def test_cli_version_option(self, runner: CliRunner) -> None:
        """Test that --version option shows correct version."""
        result = runner.invoke(cli, ["--version"])

        assert result.exit_code == 0
        assert __version__ in result.output
        assert "plankforge" in result.output

    def test_cli_help_lists_commands(self, runner: CliRunner) -> None:
        """Test that --help lists every subcommand."""
        result = runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        for command in ("width", "spiky", "cover", "verify", "render"):
            assert command in result.output

    def test_cli_help_mentions_tolerance(self, runner: CliRunner) -> None:
        """Test that help text documents the tolerance override."""
        result = runner.invoke(cli, ["--help"])

        assert "--tol" in result.output
        assert "PLANKFORGE_TOL" in result.output

    def test_tolerance_out_of_range(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that --tol rejects values outside (0, 1e-2)."""
        result = runner.invoke(cli, ["--tol", "0.5", "width", str(body_file(SQUARE, "square.json"))])

        assert result.exit_code == 2


# =============================================================================
# B. Query Commands
# =============================================================================


@pytest.mark.unit
class TestQueryCommands:
    """Tests for width and spiky."""

    def test_width_of_square(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that the unit square has minimal width 1."""
        result = runner.invoke(cli, ["width", str(body_file(SQUARE, "square.json"))])
        document = json.loads(result.stdout)

        assert result.exit_code == 0
        assert document["w"] == pytest.approx(1.0)
        assert len(document["u_star"]) == 2

    def test_width_of_triangle(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that the unit triangle has its altitude as minimal width."""
        result = runner.invoke(cli, ["width", str(body_file(TRIANGLE, "triangle.json"))])

        assert json.loads(result.stdout)["w"] == pytest.approx(math.sqrt(3.0) / 2.0)

    def test_square_is_not_spiky(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that spiky reports no witness for the square."""
        result = runner.invoke(cli, ["spiky", str(body_file(SQUARE, "square.json"))])

        assert result.exit_code == 0
        assert json.loads(result.stdout) == {"schema_version": 1, "spiky": False, "witness": None}

    def test_pyramid_is_spiky(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that spiky finds the pyramid apex."""
        result = runner.invoke(cli, ["spiky", str(body_file(PYRAMID, "pyramid.json"))])
        witness = json.loads(result.stdout)["witness"]

        assert witness["apex"] == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
        assert witness["direction"] == pytest.approx([0.0, 0.0, -1.0])


# =============================================================================
# C. Cover, Verify and Render
# =============================================================================


@pytest.mark.unit
class TestCoverCommand:
    """Tests for cover."""

    def test_triangle(self, runner: CliRunner, body_file: BodyFile, tmp_path: Path) -> None:
        """Test that a covering document is written."""
        output = _cover(runner, body_file(TRIANGLE, "triangle.json"), tmp_path)
        document = json.loads(output.read_text(encoding="utf-8"))

        assert document["margin"] > 0.0
        assert document["params"]["epsilon"] == 0.5

    def test_stdout_when_no_output(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that the covering goes to stdout without -o."""
        result = runner.invoke(cli, ["cover", str(body_file(TRIANGLE, "triangle.json")), "--eps", "0.5"])

        assert result.exit_code == 0
        assert json.loads(result.stdout)["schema_version"] == 1

    def test_square_exits_not_spiky(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that a non-spiky body exits with status 4."""
        result = runner.invoke(cli, ["cover", str(body_file(SQUARE, "square.json")), "--eps", "0.5"])

        assert result.exit_code == 4
        assert "Error:" in result.output

    def test_missing_file_exits_input_error(self, runner: CliRunner, tmp_path: Path) -> None:
        """Test that an unreadable body exits with status 3."""
        result = runner.invoke(cli, ["cover", str(tmp_path / "absent.json"), "--eps", "0.5"])

        assert result.exit_code == 3

    def test_invalid_body_exits_input_error(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that a degenerate polygon exits with status 3."""
        path = body_file({"dim": 2, "type": "polygon", "vertices": [[0, 0], [1, 0], [2, 0]]}, "flat.json")
        result = runner.invoke(cli, ["cover", str(path), "--eps", "0.5"])

        assert result.exit_code == 3

    def test_wrong_strategy_exits_input_error(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that a planar body rejects the walk strategy for solids."""
        path = body_file(TRIANGLE, "triangle.json")
        result = runner.invoke(cli, ["cover", str(path), "--eps", "0.5", "--strategy", "lemma2-3D"])

        assert result.exit_code == 3

    def test_eps_out_of_range_is_usage_error(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that --eps outside (0, 1) is rejected by option parsing."""
        result = runner.invoke(cli, ["cover", str(body_file(TRIANGLE, "triangle.json")), "--eps", "1.5"])

        assert result.exit_code == 2

    def test_seed_leaves_covering_unchanged(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that the seed only feeds the cross-check, not the planks."""
        path = str(body_file(PYRAMID, "pyramid.json"))
        first = runner.invoke(cli, ["cover", path, "--eps", "0.5", "--strategy", "lemma2-3D"])
        second = runner.invoke(cli, ["cover", path, "--eps", "0.5", "--strategy", "lemma2-3D", "--seed", "9"])

        assert first.exit_code == second.exit_code == 0
        assert first.stdout == second.stdout

    def test_negative_seed_is_usage_error(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that seeds must be non-negative."""
        path = str(body_file(TRIANGLE, "triangle.json"))
        result = runner.invoke(cli, ["cover", path, "--eps", "0.5", "--seed", "-1"])

        assert result.exit_code == 2


@pytest.mark.unit
class TestVerifyCommand:
    """Tests for verify."""

    def test_round_trip_is_certified(self, runner: CliRunner, body_file: BodyFile, tmp_path: Path) -> None:
        """Test that cover followed by verify certifies."""
        body = body_file(TRIANGLE, "triangle.json")
        cover = _cover(runner, body, tmp_path)
        report = tmp_path / "report.json"

        result = runner.invoke(cli, ["verify", str(body), str(cover), "--samples", "5000", "-o", str(report)])

        assert result.exit_code == 0, result.output
        assert json.loads(report.read_text(encoding="utf-8"))["verdict"] == "certified-by-sampling"

    def test_forged_cover_is_refuted(self, runner: CliRunner, body_file: BodyFile, tmp_path: Path) -> None:
        """Test that dropping a plank refutes the covering."""
        body = body_file(TRIANGLE, "triangle.json")
        cover = _cover(runner, body, tmp_path)
        document = json.loads(cover.read_text(encoding="utf-8"))
        document["planks"] = document["planks"][1:]
        cover.write_text(json.dumps(document), encoding="utf-8")
        report = tmp_path / "report.json"

        result = runner.invoke(cli, ["verify", str(body), str(cover), "--samples", "5000", "-o", str(report)])

        assert result.exit_code == 1
        assert json.loads(report.read_text(encoding="utf-8"))["uncovered"]

    def test_dimension_mismatch(self, runner: CliRunner, body_file: BodyFile, tmp_path: Path) -> None:
        """Test that a planar covering cannot be checked against a solid."""
        cover = _cover(runner, body_file(TRIANGLE, "triangle.json"), tmp_path)
        result = runner.invoke(cli, ["verify", str(body_file(PYRAMID, "pyramid.json")), str(cover)])

        assert result.exit_code == 3

    def test_malformed_cover(self, runner: CliRunner, body_file: BodyFile) -> None:
        """Test that a cover document with the wrong version exits with status 3."""
        body = body_file(TRIANGLE, "triangle.json")
        cover = body_file({"schema_version": 99}, "cover.json")
        result = runner.invoke(cli, ["verify", str(body), str(cover)])

        assert result.exit_code == 3


@pytest.mark.unit
class TestRenderCommand:
    """Tests for render."""

    def test_body_with_cover(self, runner: CliRunner, body_file: BodyFile, tmp_path: Path) -> None:
        """Test that an SVG file is written."""
        body = body_file(TRIANGLE, "triangle.json")
        cover = _cover(runner, body, tmp_path)
        svg = tmp_path / "cover.svg"

        result = runner.invoke(cli, ["render", str(body), "--cover", str(cover), "-o", str(svg)])

        assert result.exit_code == 0
        assert svg.read_text(encoding="utf-8").startswith("<svg")

    def test_solid_body_exits_input_error(self, runner: CliRunner, body_file: BodyFile, tmp_path: Path) -> None:
        """Test that solids cannot be rendered."""
        path = body_file(PYRAMID, "pyramid.json")
        result = runner.invoke(cli, ["render", str(path), "-o", str(tmp_path / "out.svg")])

        assert result.exit_code == 3
