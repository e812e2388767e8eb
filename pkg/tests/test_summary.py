"""Tests for the summary module."""

from pathlib import Path

import pytest

from memfactor.metrics import Metrics
from memfactor.summary import (
    SummaryContext,
    SummaryOptions,
    _get_output_path,
    _version_existing_summary,
    generate_summary,
    write_summary,
)


@pytest.fixture
def sample_metrics() -> Metrics:
    """Metrics from a small inpainting run."""
    return Metrics(mse=0.00125, l1_total=12.0, l1_per_pixel_channel=0.25, perfect_restore=False, iterations=42.0)


@pytest.fixture
def sample_context(sample_metrics: Metrics, tmp_path: Path) -> SummaryContext:
    """Create a sample summary context for testing."""
    out = tmp_path / "out"
    return SummaryContext(
        command="infer",
        task="inpaint",
        output_dir=out,
        metrics=sample_metrics,
        artifacts=[out / "reconstruction.ppm", out / "metrics.csv"],
        notes=["64 masked pixels"],
        duration_seconds=12.5,
        seed=7,
        schedule="simul:0.1",
        converged=True,
    )


class TestGenerateSummary:
    """Tests for generate_summary function."""

    def test_basic_summary(self, sample_context: SummaryContext) -> None:
        """Test basic summary generation without metadata."""
        summary = generate_summary(sample_context, SummaryOptions())

        assert "# Run Summary: infer" in summary
        assert "**Task**: inpaint" in summary
        assert "## Status\nConverged" in summary
        assert "## Outputs (2)" in summary
        assert "- 64 masked pixels" in summary
        assert "## Metadata" not in summary

    def test_metrics_table(self, sample_context: SummaryContext) -> None:
        """Floats are printed with six significant digits."""
        summary = generate_summary(sample_context, SummaryOptions())

        assert "| metric | value |" in summary
        assert "| mse | 0.00125 |" in summary
        assert "| iterations | 42 |" in summary
        assert "| perfect_restore | False |" in summary

    @pytest.mark.parametrize(
        ("converged", "expected"),
        [(None, "Done"), (True, "Converged"), (False, "Not converged (best votes reported)")],
        ids=["no-run", "converged", "non-converged"],
    )
    def test_status(self, sample_context: SummaryContext, converged: bool | None, expected: str) -> None:
        sample_context.converged = converged
        assert f"## Status\n{expected}\n" in generate_summary(sample_context, SummaryOptions())

    def test_summary_without_metrics_or_notes(self, tmp_path: Path) -> None:
        """Train runs have no metrics; an empty notes list prints (none)."""
        ctx = SummaryContext(command="train", task="music_gap", output_dir=tmp_path)
        summary = generate_summary(ctx, SummaryOptions())

        assert "## Metrics" not in summary
        assert "## Outputs" not in summary
        assert "## Notes\n(none)" in summary

    def test_summary_with_metadata(self, sample_context: SummaryContext) -> None:
        """Test summary generation with metadata included."""
        summary = generate_summary(sample_context, SummaryOptions(include_metadata=True))

        assert "## Metadata" in summary
        assert "**Generated**:" in summary
        assert "**Duration**: 12.5s" in summary
        assert "**Seed**: 7" in summary
        assert "**Schedule**: simul:0.1" in summary

    def test_metadata_without_seed(self, tmp_path: Path) -> None:
        ctx = SummaryContext(command="eval", task="eval", output_dir=tmp_path)
        summary = generate_summary(ctx, SummaryOptions(include_metadata=True))

        assert "**Seed**:" not in summary
        assert "**Schedule**:" not in summary

    def test_summary_relative_paths(self, sample_context: SummaryContext) -> None:
        """Test that artifact paths are made relative to the output directory."""
        summary = generate_summary(sample_context, SummaryOptions())

        assert "- reconstruction.ppm" in summary
        assert "- metrics.csv" in summary
        assert str(sample_context.output_dir) not in summary


class TestVersionExistingSummary:
    """Tests for _version_existing_summary function."""

    def test_no_existing_file(self, tmp_path: Path) -> None:
        """Test versioning when file doesn't exist."""
        summary_path = tmp_path / "RUN_SUMMARY.md"
        # Should not raise
        _version_existing_summary(summary_path)
        assert not summary_path.exists()

    def test_version_first_existing(self, tmp_path: Path) -> None:
        """Test versioning first existing file."""
        summary_path = tmp_path / "RUN_SUMMARY.md"
        summary_path.write_text("Original content")

        _version_existing_summary(summary_path)

        assert not summary_path.exists()
        versioned = tmp_path / "RUN_SUMMARY.1.md"
        assert versioned.exists()
        assert versioned.read_text() == "Original content"

    def test_version_multiple_existing(self, tmp_path: Path) -> None:
        """Test versioning with multiple existing versions."""
        summary_path = tmp_path / "RUN_SUMMARY.md"
        summary_path.write_text("Current")
        (tmp_path / "RUN_SUMMARY.1.md").write_text("Version 1")
        (tmp_path / "RUN_SUMMARY.2.md").write_text("Version 2")

        _version_existing_summary(summary_path)

        assert not summary_path.exists()
        assert (tmp_path / "RUN_SUMMARY.3.md").read_text() == "Current"


class TestGetOutputPath:
    """Tests for _get_output_path function."""

    def test_explicit_path(self, sample_context: SummaryContext) -> None:
        explicit = Path("/custom/path/summary.md")
        assert _get_output_path(sample_context, SummaryOptions(output_path=explicit)) == explicit

    def test_default_output_dir(self, sample_context: SummaryContext) -> None:
        expected = sample_context.output_dir / "RUN_SUMMARY.md"
        assert _get_output_path(sample_context, SummaryOptions()) == expected


class TestWriteSummary:
    """Tests for write_summary function."""

    def test_write_to_default_location(self, sample_context: SummaryContext) -> None:
        """Creates the output directory and writes RUN_SUMMARY.md there."""
        result = write_summary(sample_context, SummaryOptions())

        assert result == sample_context.output_dir / "RUN_SUMMARY.md"
        assert "# Run Summary: infer" in result.read_text()

    def test_overwrite_without_versioning(self, sample_context: SummaryContext) -> None:
        write_summary(sample_context, SummaryOptions())
        sample_context.command = "benchmark"
        result = write_summary(sample_context, SummaryOptions())

        assert "benchmark" in result.read_text()
        assert not (result.parent / "RUN_SUMMARY.1.md").exists()

    def test_versioned(self, sample_context: SummaryContext) -> None:
        """A second versioned write keeps the first as RUN_SUMMARY.1.md."""
        path1 = write_summary(sample_context, SummaryOptions(versioned=True))
        path2 = write_summary(sample_context, SummaryOptions(versioned=True))

        assert path1 == path2
        assert (path2.parent / "RUN_SUMMARY.1.md").exists()

    def test_write_creates_parent_directories(self, sample_context: SummaryContext, tmp_path: Path) -> None:
        """Test that parent directories are created."""
        deep_path = tmp_path / "a" / "b" / "c" / "summary.md"
        result = write_summary(sample_context, SummaryOptions(output_path=deep_path))

        assert result == deep_path
        assert result.exists()
