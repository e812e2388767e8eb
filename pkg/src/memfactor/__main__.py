"""CLI entry point."""

import sys
import time
from pathlib import Path
from typing import Any

import numpy as np
import tyro

from memfactor import datasets, tasks
from memfactor.cli import Args, BenchmarkArgs, ClassifyArgs, EvalArgs, InferArgs, RunFlags, SynthArgs, TrainArgs
from memfactor.config import RunConfig, Settings, load_config, validate_config
from memfactor.engine import RunResult, TraceRecorder
from memfactor.graph.network import Network
from memfactor.io import (
    ImageBuffer,
    load_model,
    load_spectrogram,
    read_image,
    read_labels,
    save_model,
    save_spectrogram,
    write_csv_rows,
    write_image,
    write_labels,
    write_magnitude_csv,
)
from memfactor.io.images import image_extension
from memfactor.io.models import MANIFEST_NAME
from memfactor.layouts import (
    ImageLayout,
    ImageLayoutSpec,
    SpectrogramLayout,
    build_combined_color_layout,
    build_image_layout,
    build_mnist_hierarchy,
    build_spectrogram_layout,
)
from memfactor.layouts.hierarchy import DIGIT_SIDE
from memfactor.log import configure, log, print  # noqa: A004
from memfactor.metrics import Metrics, image_metrics, write_metrics_csv
from memfactor.signal import Spectrogram, read_wav, spectrogram_of, unbin_magnitude_mse, write_wav
from memfactor.summary import SummaryContext, SummaryOptions, write_summary
from memfactor.tasks.images import BENCHMARK_BLOB_PIXELS
from memfactor.training import count_payloads
from memfactor.validation import FormatError, LayoutError, NonConvergedError, ValidationError, parse_schedule

EXIT_VALIDATION = 2
EXIT_NON_CONVERGED = 3
EXIT_IO = 4

IMAGE_TASKS = ("inpaint", "drop", "noise", "colorize", "restore")
MUSIC_TASKS = ("music_gap", "music_denoise")
DEFAULT_NOISE_SIGMA = {"noise": 20.0, "music_denoise": 20.0, "restore": 40.0}
SYNTH_MUSIC_RATE = 16000
"""Lowest convenient rate whose 50 ms frames give at least 400 frequencies."""


# --- Configuration ---


def resolve_config(flags: RunFlags, **overrides: Any) -> RunConfig:
    """Run-config from --config (or the defaults) with command-line flags applied on top.

    Raises:
        ConfigError: If the merged config is invalid; the message names the key.
    """
    base = load_config(flags.config) if flags.config is not None else RunConfig()
    data = base.model_dump()
    data.update({key: value for key, value in overrides.items() if value is not None})
    if flags.output_dir is not None:
        data["output_dir"] = flags.output_dir
    if flags.seed is not None:
        data["seed"] = flags.seed
        data["schedule"]["seed"] = flags.seed
    if flags.evidence_weight is not None:
        data["weights"]["evidence"] = flags.evidence_weight
    if flags.factor_weight is not None:
        data["weights"]["factor"] = flags.factor_weight
    if flags.schedule is not None:
        mode, fraction = parse_schedule(flags.schedule)
        data["schedule"]["mode"] = mode
        if mode == "simultaneous":
            data["schedule"]["fraction"] = fraction
    if flags.no_rollback:
        data["schedule"]["rollback"] = False
    if flags.max_iterations is not None:
        data["schedule"]["max_iterations"] = flags.max_iterations
    for name in ("lam", "alpha", "hidden_p"):
        value = getattr(flags, name)
        if value is not None:
            data["factor"][name] = value
    if data["task"] == "colorize" and data["image"]["channels"] == "rgb":
        log.info("colorize: switching to the rgb+gray channel layout")
        data["image"]["channels"] = "rgb+gray"
    return validate_config(data, str(flags.config or "<flags>"))


def thread_split(settings: Settings, jobs: int) -> tuple[int, int]:
    """(parallel jobs, PMP workers per job), both within MFN_THREADS."""
    capped = max(1, min(jobs, settings.threads))
    if capped < jobs:
        log.info(f"--jobs {jobs} capped to MFN_THREADS={settings.threads}")
    return capped, max(1, settings.threads // capped)


def _required_dir(path: Path | None, what: str, flag: str) -> Path:
    if path is None:
        raise ValidationError(f"No {what}: pass {flag} or set it in the run-config")
    return path


def _task_kind(task: str) -> str:
    if task in IMAGE_TASKS:
        return "image"
    if task in MUSIC_TASKS:
        return "spectrogram"
    return "hierarchy"


def _schedule_label(cfg: RunConfig) -> str:
    s = cfg.schedule
    if s.mode == "serial":
        return "serial"
    return f"simul:{s.fraction:g}" + ("" if s.rollback else " (no rollback)")


# --- Layouts and models ---


def image_layout(cfg: RunConfig) -> ImageLayout:
    s = cfg.image
    spec = ImageLayoutSpec(s.width, s.height, s.channels, s.patch, s.stride, s.linked_patch, s.roi, cfg.weights.factor)
    return build_combined_color_layout(spec) if s.combined else build_image_layout(spec)


def music_layout(cfg: RunConfig, n_frames: int) -> SpectrogramLayout:
    s = cfg.spectrogram
    return build_spectrogram_layout(s.n_bins, n_frames, s.factor_width, s.shared, cfg.weights.factor)


def _layout_record(cfg: RunConfig, kind: str, **extra: Any) -> dict[str, Any]:
    record: dict[str, Any] = {"kind": kind}
    if kind == "image":
        record.update(cfg.image.model_dump(mode="json"))
    elif kind == "spectrogram":
        record.update(cfg.spectrogram.model_dump(mode="json"))
    record.update(extra)
    return record


def load_bound(cfg: RunConfig, model_dir: Path, network: Network, kind: str) -> tuple[Network, dict[str, Any]]:
    """Bind `network` to the payloads in `model_dir`; returns the trained layout record too.

    Raises:
        ValidationError: If the model was trained for another kind of layout.
    """
    payloads, manifest = load_model(model_dir, tasks.subspace_config(cfg.factor))
    trained = manifest.layout.get("kind")
    if trained != kind:
        raise ValidationError(f"{model_dir}: model was trained for a {trained} layout, task '{cfg.task}' needs {kind}")
    return network.bind(payloads), manifest.layout


# --- Data loading ---


def _files(directory: Path, pattern: str) -> list[Path]:
    if not directory.is_dir():
        raise FileNotFoundError(f"Directory not found: {directory}")
    files = sorted(directory.glob(pattern))
    if not files:
        raise ValidationError(f"No {pattern} files in {directory}")
    return files


def read_float_image(path: Path, cfg: RunConfig) -> np.ndarray:
    """H x W x C floats in [0, 1]: gray for mono layouts, RGB otherwise."""
    buf = read_image(path)
    img = buf.gray().floats() if cfg.image.channels == "mono" else buf.rgb().floats()
    if img.shape[:2] != (cfg.image.height, cfg.image.width):
        raise LayoutError(
            f"{path}: image is {buf.width}x{buf.height}, the run-config expects {cfg.image.width}x{cfg.image.height}"
        )
    return img


def read_mask(path: Path) -> np.ndarray:
    """H x W mask; nonzero pixels are missing."""
    return read_image(path).data[..., 0] != 0


def load_digits(directory: Path, require_labels: bool) -> tuple[list[Path], np.ndarray, np.ndarray | None]:
    """28x28 *.pgm digits in name order and, when present, their labels.csv labels."""
    files = _files(directory, "*.pgm")
    images = []
    for path in files:
        data = read_image(path).gray().data[..., 0]
        if data.shape != (DIGIT_SIDE, DIGIT_SIDE):
            raise LayoutError(f"{path}: digits must be {DIGIT_SIDE}x{DIGIT_SIDE}, got {data.shape}")
        images.append(data)
    labels_path = directory / "labels.csv"
    if not labels_path.exists():
        if require_labels:
            raise FileNotFoundError(f"Labels file not found: {labels_path}")
        return files, np.stack(images), None
    table = read_labels(labels_path)
    unlabeled = [p.name for p in files if p.name not in table]
    if unlabeled:
        raise ValidationError(f"{labels_path}: no label for {unlabeled[:5]}")
    return files, np.stack(images), np.array([table[p.name] for p in files], dtype=np.int64)


def wav_spectrogram(cfg: RunConfig, rate: int, samples: np.ndarray) -> Spectrogram:
    s = cfg.spectrogram
    return spectrogram_of(samples, rate, s.n_bins, s.frame_ms, s.hop_ms)


def _write_float_image(stem: Path, values: np.ndarray) -> Path:
    arr = np.asarray(values)
    buf = ImageBuffer.from_floats(arr[..., :3] if arr.shape[2] >= 3 else arr)
    return write_image(stem.with_suffix(image_extension(buf)), buf)


def _print_metrics(metrics: Metrics) -> None:
    for name, value in metrics.rows():
        print(f"  {name}: {value:.6g}" if isinstance(value, float) else f"  {name}: {value}")


def _finish(
    command: str,
    cfg: RunConfig,
    versioned: bool,
    metrics: Metrics | None,
    artifacts: list[Path],
    notes: list[str],
    started: float,
    converged: bool | None = None,
) -> None:
    """Write metrics.csv (when there are metrics) and RUN_SUMMARY.md."""
    if metrics is not None:
        artifacts.append(write_metrics_csv(cfg.output_dir / "metrics.csv", metrics))
    ctx = SummaryContext(
        command=command,
        task=cfg.task,
        output_dir=cfg.output_dir,
        metrics=metrics,
        artifacts=artifacts,
        notes=notes,
        duration_seconds=time.monotonic() - started,
        seed=cfg.seed,
        schedule=_schedule_label(cfg),
        converged=converged,
    )
    path = write_summary(ctx, SummaryOptions(versioned=versioned))
    print(f"\nSummary written to: {path}")


# --- Command Handlers ---


def cmd_train(settings: Settings, args: TrainArgs) -> None:
    """Train payloads for the configured task and write the model directory."""
    started = time.monotonic()
    cfg = resolve_config(
        args, task=args.task, trainer=args.trainer, train_dir=args.train_dir, model_dir=args.model_dir
    )
    train_dir = _required_dir(cfg.train_dir, "training directory", "--train-dir")
    model_dir = _required_dir(cfg.model_dir, "model directory", "--model-dir")
    spec = tasks.trainer_spec(cfg)
    kind = _task_kind(cfg.task)

    print(f"\nTraining {cfg.trainer} payloads for {cfg.task} from {train_dir}\n")
    match kind:
        case "image":
            images = np.stack([read_float_image(p, cfg) for p in _files(train_dir, "*.ppm")])
            payloads, reports = tasks.train_image_model(image_layout(cfg), images, spec)
            record = _layout_record(cfg, "image")
        case "spectrogram":
            specs = [wav_spectrogram(cfg, *read_wav(p)) for p in _files(train_dir, "*.wav")]
            n_frames = min(s.n_frames for s in specs)
            payloads, reports = tasks.train_music_model(music_layout(cfg, n_frames), specs, spec)
            record = _layout_record(cfg, "spectrogram", n_frames=n_frames)
        case _:
            if cfg.trainer != "table":
                raise ValidationError("Digit hierarchies are trained as memory tables (trainer 'table')")
            _, digits, labels = load_digits(train_dir, require_labels=True)
            assert labels is not None
            payloads, reports = tasks.train_hierarchy(build_mnist_hierarchy(), digits, labels, spec)
            record = {"kind": "hierarchy"}

    save_model(model_dir, payloads, cfg.task, record, cfg.trainer, {r.key: r.residual for r in reports})
    for r in reports:
        residual = f", residual {r.residual:.4g}" if r.residual is not None else ""
        print(f"  {r.key}: {r.trainer} from {r.n_exemplars} exemplars, size {r.size}{residual}")
    print(f"\n{count_payloads(payloads)} payload files for {len(payloads)} factor keys in {model_dir}")

    artifacts = [model_dir / MANIFEST_NAME]
    traced = [r for r in reports if r.trace]
    if traced:
        rows = [(r.key, i, float(v)) for r in traced for i, v in enumerate(r.trace)]
        artifacts.append(write_csv_rows(cfg.output_dir / "nmf_trace.csv", ["key", "iteration", "objective"], rows))
    notes = [f"{len(payloads)} payload keys, {count_payloads(payloads)} distinct payloads"]
    _finish("train", cfg, args.summary_versioned, None, artifacts, notes, started)


def _infer_image(
    cfg: RunConfig, args: InferArgs, trace: TraceRecorder | None, workers: int
) -> tuple[RunResult, Metrics, list[Path], list[str]]:
    layout = image_layout(cfg)
    model_dir = _required_dir(cfg.model_dir, "model directory", "--model-dir")
    bound, _ = load_bound(cfg, model_dir, layout.network, "image")
    image = read_float_image(args.input, cfg)
    weight = tasks.evidence_weight(cfg)
    schedule = tasks.build_schedule(cfg.schedule, track_cost=trace is not None)
    sigma = args.noise_sigma if args.noise_sigma is not None else DEFAULT_NOISE_SIGMA.get(cfg.task, 0.0)
    out_dir = cfg.output_dir
    artifacts: list[Path] = []
    notes: list[str] = [f"evidence weight {weight:g}, factor weight {cfg.weights.factor:g}"]

    match cfg.task:
        case "inpaint":
            if args.mask is not None:
                mask = read_mask(args.mask)
            elif args.mask_rect is not None:
                mask = tasks.rect_mask(cfg.image.height, cfg.image.width, *args.mask_rect)
            else:
                raise ValidationError("inpaint needs --mask or --mask-rect")
            result = tasks.inpaint(layout, bound, image, mask, weight, schedule, workers, trace)
            baseline = image_metrics(image, tasks.mean_fill(image, mask), mask)
            baseline_mse = baseline.mse or 0.0
            result.metrics.extra["baseline_mse"] = baseline_mse
            notes.append(f"{int(mask.sum())} masked pixels; mean-fill baseline MSE {baseline_mse:.6g}")
        case "drop":
            mask = tasks.drop_mask(layout.grid.size, args.drop_fraction, cfg.seed)
            result = tasks.denoise(layout, bound, image, image, mask, weight, schedule, workers, trace)
            notes.append(f"{int(mask.sum())} of {mask.size} variables without evidence")
        case "noise":
            noisy = tasks.add_noise(image, sigma, cfg.seed)
            artifacts.append(_write_float_image(out_dir / "evidence", noisy))
            result = tasks.denoise(layout, bound, image, noisy, None, weight, schedule, workers, trace)
            notes.append(f"noise sigma {sigma:g} (0-255 scale)")
        case "colorize":
            gray = ImageBuffer.from_floats(image).gray().floats()
            artifacts.append(_write_float_image(out_dir / "evidence", gray))
            result = tasks.colorize(layout, bound, image, weight, schedule, workers, trace)
        case _:
            noisy = tasks.add_noise(image, sigma, cfg.seed)
            blob = tasks.erase_blob(cfg.image.height, cfg.image.width, BENCHMARK_BLOB_PIXELS, cfg.seed)
            artifacts.append(_write_float_image(out_dir / "evidence", np.where(blob[..., None], 0.0, noisy)))
            result = tasks.denoise(layout, bound, image, noisy, blob, weight, schedule, workers, trace)
            notes.append(f"noise sigma {sigma:g}, {int(blob.sum())} erased pixels")

    artifacts.append(_write_float_image(out_dir / "reconstruction", result.reconstruction))
    return result.run, result.metrics, artifacts, notes


def _infer_music(
    cfg: RunConfig, args: InferArgs, trace: TraceRecorder | None, workers: int
) -> tuple[RunResult, Metrics, list[Path], list[str]]:
    model_dir = _required_dir(cfg.model_dir, "model directory", "--model-dir")
    clean: Spectrogram | None = None
    if args.input.suffix == ".wav":
        rate, samples = read_wav(args.input)
        spec = clean = wav_spectrogram(cfg, rate, samples)
        if cfg.task == "music_denoise":
            sigma = args.noise_sigma if args.noise_sigma is not None else DEFAULT_NOISE_SIGMA["music_denoise"]
            spec = wav_spectrogram(cfg, rate, tasks.add_audio_noise(samples, sigma, cfg.seed))
    else:
        spec = load_spectrogram(args.input)

    layout = music_layout(cfg, spec.n_frames)
    bound, record = load_bound(cfg, model_dir, layout.network, "spectrogram")
    if not record.get("shared", True) and record.get("n_frames") != spec.n_frames:
        raise LayoutError(f"Per-position model covers {record.get('n_frames')} frames, input has {spec.n_frames}")
    weight = tasks.evidence_weight(cfg)
    schedule = tasks.build_schedule(cfg.schedule, track_cost=trace is not None)
    notes: list[str] = []

    if cfg.task == "music_gap":
        if args.gap is not None:
            gap = args.gap
        else:
            width = max(1, spec.n_frames // 10)
            start = (spec.n_frames - width) // 2
            gap = (start, start + width)
        result = tasks.fill_gap(layout, bound, spec, gap, weight, schedule, workers, trace)
        notes.append(f"gap frames {gap[0]}..{gap[1] - 1}, evidence weight {weight:g}")
    else:
        result = tasks.denoise_two_pass(layout, bound, spec, weight, schedule, clean, workers=workers, trace=trace)
        first = result.passes[0]
        notes.append(f"first pass weight {weight:g}: {first.stats.iterations} iterations ({first.status.value})")
        notes.append(f"second pass weight {tasks.DENOISE_SECOND_PASS_WEIGHT:g}")

    out_dir = cfg.output_dir
    artifacts = [
        save_spectrogram(out_dir / "reconstruction.mfns", result.reconstruction),
        write_magnitude_csv(out_dir / "reconstruction_magnitude.csv", result.reconstruction),
    ]
    return result.run, result.metrics, artifacts, notes


def cmd_infer(settings: Settings, args: InferArgs) -> None:
    """Reconstruct one input; exits with EXIT_NON_CONVERGED after writing outputs if PMP hit its cap."""
    started = time.monotonic()
    cfg = resolve_config(args, task=args.task, model_dir=args.model_dir)
    if cfg.task == "classify":
        raise ValidationError("Use `memfactor classify` for digit classification")
    _, workers = thread_split(settings, 1)

    print(f"\nRunning {cfg.task} on {args.input} ({_schedule_label(cfg)})\n")
    trace = TraceRecorder(cfg.output_dir / "trace.csv") if args.trace else None
    try:
        if _task_kind(cfg.task) == "image":
            run, metrics, artifacts, notes = _infer_image(cfg, args, trace, workers)
        else:
            run, metrics, artifacts, notes = _infer_music(cfg, args, trace, workers)
    finally:
        if trace is not None:
            trace.close()
    if trace is not None:
        artifacts.append(trace.output_path)  # type: ignore[arg-type]

    _print_metrics(metrics)
    _finish("infer", cfg, args.summary_versioned, metrics, artifacts, notes, started, run.converged)
    run.raise_for_status()


def cmd_classify(settings: Settings, args: ClassifyArgs) -> None:
    """Classify a directory of digits and report accuracy when labels are present."""
    started = time.monotonic()
    cfg = resolve_config(args, task="classify", model_dir=args.model_dir)
    jobs, workers = thread_split(settings, args.jobs)
    model_dir = _required_dir(cfg.model_dir, "model directory", "--model-dir")

    layout = build_mnist_hierarchy()
    bound, _ = load_bound(cfg, model_dir, layout.network, "hierarchy")
    files, digits, labels = load_digits(args.input, require_labels=False)
    schedule = tasks.build_schedule(cfg.schedule)
    weight = tasks.evidence_weight(cfg)

    print(f"\nClassifying {len(files)} digits ({_schedule_label(cfg)})\n")
    predicted, metrics = tasks.classify_batch(layout, bound, digits, labels, schedule, weight, jobs, workers)

    out = write_labels(cfg.output_dir / "predictions.csv", [(p.name, label) for p, label in zip(files, predicted, strict=True)])
    _print_metrics(metrics)
    notes = [f"{int(metrics.extra['unknown'])} digits left the top label Unknown"]
    if labels is None:
        notes.append("No labels.csv: accuracy omitted")
    _finish("classify", cfg, args.summary_versioned, metrics, [out], notes, started)


def cmd_benchmark(settings: Settings, args: BenchmarkArgs) -> None:
    """Restore corrupted copies of stored images with a memory-table model."""
    started = time.monotonic()
    cfg = resolve_config(args, task="restore", trainer="table", model_dir=args.model_dir)
    jobs, workers = thread_split(settings, args.jobs)

    if cfg.train_dir is not None:
        stored = np.stack([read_float_image(p, cfg) for p in _files(cfg.train_dir, "*.ppm")])
        source = str(cfg.train_dir)
    else:
        if cfg.image.width != cfg.image.height:
            raise ValidationError("Synthetic stored images are square; set image.width == image.height")
        stored = datasets.faces(args.stored, cfg.image.width, seed=cfg.seed)
        if cfg.image.channels == "mono":
            stored = ImageBuffer.from_floats(stored.reshape(-1, cfg.image.width, 3)).gray().floats()
            stored = stored.reshape(args.stored, cfg.image.height, cfg.image.width, 1)
        source = f"{args.stored} synthetic faces"

    layout = image_layout(cfg)
    if cfg.model_dir is not None:
        bound, _ = load_bound(cfg, cfg.model_dir, layout.network, "image")
    else:
        payloads, _ = tasks.train_image_model(layout, stored, tasks.trainer_spec(cfg))
        bound = layout.network.bind(payloads)

    schedule = tasks.build_schedule(cfg.schedule)
    weight = tasks.evidence_weight(cfg)
    print(f"\nRestoring {args.trials} corrupted images from {source} ({_schedule_label(cfg)})\n")
    summary, trials = tasks.benchmark_restore(
        layout, bound, stored, args.trials, cfg.seed, schedule, args.sigma, args.blob, weight, jobs, workers
    )
    within = sum(m.l1_per_pixel_channel is not None and m.l1_per_pixel_channel <= 1.0 for m in trials) / len(trials)
    summary.extra["fraction_l1_within_1"] = within

    rows = [
        (t, int(m.extra["image_index"]), m.l1_total, m.l1_per_pixel_channel, int(bool(m.perfect_restore)), m.iterations)
        for t, m in enumerate(trials)
    ]
    header = ["trial", "image_index", "l1_total", "l1_per_pixel_channel", "perfect", "iterations"]
    out = write_csv_rows(cfg.output_dir / "trials.csv", header, rows)

    print(f"  restored perfectly: {summary.extra['fraction_perfect']:.1%}")
    print(f"  L1 <= 1.0 per pixel-channel: {within:.1%}")
    print(f"  mean total L1: {summary.l1_total:.1f}")
    if schedule.mode.value == "simultaneous":
        print(f"  rollback rate: {summary.rollback_rate:.2%}")
    notes = [f"noise sigma {args.sigma:g}, {args.blob} erased pixels, evidence weight {weight:g}"]
    _finish("benchmark", cfg, args.summary_versioned, summary, [out], notes, started)


def cmd_eval(settings: Settings, args: EvalArgs) -> None:
    """Compare two images (or two spectrograms) and print the metrics."""
    started = time.monotonic()
    if args.original.suffix == ".mfns":
        metrics = Metrics(mse=unbin_magnitude_mse(load_spectrogram(args.original), load_spectrogram(args.reconstruction)))
    else:
        original = read_image(args.original).floats()
        reconstruction = read_image(args.reconstruction).floats()
        region = read_mask(args.region) if args.region is not None else None
        metrics = image_metrics(original, reconstruction, region)
    _print_metrics(metrics)
    if args.output_dir is not None:
        ctx = SummaryContext(
            command="eval",
            task="eval",
            output_dir=args.output_dir,
            metrics=metrics,
            artifacts=[write_metrics_csv(args.output_dir / "metrics.csv", metrics)],
            notes=[f"{args.reconstruction} against {args.original}"],
            duration_seconds=time.monotonic() - started,
        )
        print(f"\nSummary written to: {write_summary(ctx, SummaryOptions())}")


def cmd_synth(settings: Settings, args: SynthArgs) -> None:
    """Write the synthetic datasets."""
    if args.count < 1:
        raise ValidationError(f"--count must be >= 1, got {args.count}")
    kinds = ("faces", "digits", "music") if args.kind == "all" else (args.kind,)
    for kind in kinds:
        directory = args.output / kind
        match kind:
            case "faces":
                for k, img in enumerate(datasets.faces(args.count, args.size, seed=args.seed)):
                    write_image(directory / f"face_{k:03d}.ppm", ImageBuffer.from_floats(img))
            case "digits":
                digits, labels = datasets.stroke_digits(args.count, seed=args.seed)
                names = [f"digit_{k:03d}.pgm" for k in range(args.count)]
                for name, img in zip(names, digits, strict=True):
                    write_image(directory / name, ImageBuffer(img[..., None]))
                write_labels(directory / "labels.csv", [(n, int(lab)) for n, lab in zip(names, labels, strict=True)])
            case _:
                for k in range(args.count):
                    samples = datasets.tone_grid_music(rate=SYNTH_MUSIC_RATE, seed=args.seed + k)
                    write_wav(directory / f"clip_{k:03d}.wav", SYNTH_MUSIC_RATE, samples)
        print(f"Wrote {args.count} {kind} to {directory}")


# --- Main Entry Point ---


def _fail(code: int, err: Exception) -> None:
    sys.stderr.write(f"Error: {err}\n")
    sys.exit(code)


def main() -> None:
    """Main entry point."""
    args = tyro.cli(
        Args,
        prog="memfactor",
        description="Memory factor networks with proactive message passing: train, reconstruct, classify.",
    )
    settings = Settings.from_env()
    configure(settings.log_level, settings.log_file)
    if getattr(args, "verbose", False):
        log.set_level("DEBUG")

    # Dispatch to appropriate handler based on args type
    try:
        match args:
            case TrainArgs():
                cmd_train(settings, args)
            case InferArgs():
                cmd_infer(settings, args)
            case ClassifyArgs():
                cmd_classify(settings, args)
            case BenchmarkArgs():
                cmd_benchmark(settings, args)
            case EvalArgs():
                cmd_eval(settings, args)
            case SynthArgs():
                cmd_synth(settings, args)
            case _:
                sys.exit(f"Unknown command type: {type(args)}")
    except NonConvergedError as e:
        _fail(EXIT_NON_CONVERGED, e)
    except ValidationError as e:
        _fail(EXIT_VALIDATION, e)
    except (FormatError, OSError) as e:
        _fail(EXIT_IO, e)


if __name__ == "__main__":
    main()
