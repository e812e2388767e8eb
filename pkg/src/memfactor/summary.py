"""Run summary markdown generation."""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from memfactor.metrics import Metrics

SUMMARY_NAME = "RUN_SUMMARY.md"


@dataclass
class SummaryOptions:
    """Options for summary generation."""

    include_metadata: bool = False
    output_path: Path | None = None  # None = output directory
    versioned: bool = False


@dataclass
class SummaryContext:
    """Context for summary generation."""

    command: str
    task: str
    output_dir: Path
    metrics: Metrics | None = None
    artifacts: list[Path] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    duration_seconds: float = 0.0
    seed: int | None = None
    schedule: str | None = None
    converged: bool | None = None


def _format_value(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def generate_summary(ctx: SummaryContext, options: SummaryOptions) -> str:
    """Generate markdown summary content.

    Args:
        ctx: Command, task, metrics and produced files.
        options: Options controlling summary content.

    Returns:
        Markdown string with the summary content.
    """
    lines: list[str] = []

    lines.append(f"# Run Summary: {ctx.command}")
    lines.append("")
    lines.append(f"**Task**: {ctx.task}")
    lines.append("")

    lines.append("## Status")
    if ctx.converged is None:
        lines.append("Done")
    elif ctx.converged:
        lines.append("Converged")
    else:
        lines.append("Not converged (best votes reported)")
    lines.append("")

    if ctx.metrics is not None:
        lines.append("## Metrics")
        lines.append("| metric | value |")
        lines.append("| --- | --- |")
        for name, value in ctx.metrics.rows():
            lines.append(f"| {name} | {_format_value(value)} |")
        lines.append("")

    if ctx.artifacts:
        lines.append(f"## Outputs ({len(ctx.artifacts)})")
        out_str = str(ctx.output_dir)
        for path in ctx.artifacts:
            rel = str(path)
            if rel.startswith(out_str):
                rel = rel[len(out_str) :].lstrip("/")
            lines.append(f"- {rel}")
        lines.append("")

    lines.append("## Notes")
    if ctx.notes:
        for note in ctx.notes:
            lines.append(f"- {note}")
    else:
        lines.append("(none)")
    lines.append("")

    if options.include_metadata:
        lines.append("---")
        lines.append("## Metadata")
        timestamp = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S UTC")
        lines.append(f"- **Generated**: {timestamp}")
        lines.append(f"- **Duration**: {ctx.duration_seconds:.1f}s")
        lines.append(f"- **Output Directory**: {ctx.output_dir}")
        if ctx.seed is not None:
            lines.append(f"- **Seed**: {ctx.seed}")
        if ctx.schedule:
            lines.append(f"- **Schedule**: {ctx.schedule}")
        lines.append("")

    return "\n".join(lines)


def _version_existing_summary(path: Path) -> None:
    """Rename an existing summary to RUN_SUMMARY.1.md (or .2.md, etc)."""
    if not path.exists():
        return

    version = 1
    while True:
        versioned_path = path.parent / f"{path.stem}.{version}{path.suffix}"
        if not versioned_path.exists():
            break
        version += 1

    path.rename(versioned_path)


def _get_output_path(ctx: SummaryContext, options: SummaryOptions) -> Path:
    if options.output_path:
        return options.output_path
    return ctx.output_dir / SUMMARY_NAME


def write_summary(ctx: SummaryContext, options: SummaryOptions) -> Path:
    """Write the summary, versioning a previous one first if asked to.

    Returns:
        Path where the summary was written.
    """
    output_path = _get_output_path(ctx, options)

    if options.versioned:
        _version_existing_summary(output_path)

    content = generate_summary(ctx, options)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(content)

    return output_path
