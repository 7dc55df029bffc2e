"""Command-line interface for manifold MLS approximation and experiments."""

from __future__ import annotations

import functools
import json
from pathlib import Path
from typing import Any, Callable, Optional, Tuple

import typer
from dotenv import load_dotenv

from .approximator import BatchResult
from .config import RunConfig, RuntimeConfig, configure_logging, load_from_env
from .errors import ConfigurationError, NumericalError, SampleFileError
from .pipeline import ExperimentRunner, run_from_config
from .sample_io import read_queries, read_samples, write_samples

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

app = typer.Typer(add_completion=False, help="Manifold moving least-squares approximation.")


def _config_option() -> Any:
    return typer.Option(None, "--config", help="Flat key=value run configuration file")


def _seed_option() -> Any:
    return typer.Option(None, "--seed", help="Base seed")


def _out_option() -> Any:
    return typer.Option(None, "--out", help="Output directory")


def _d_option() -> Any:
    return typer.Option(None, "--d", help="Intrinsic dimension")


def _m_option() -> Any:
    return typer.Option(None, "--m", help="Polynomial degree (comma list where a command sweeps degrees)")


def _weight_option() -> Any:
    return typer.Option(None, "--weight", help="truncated_exp, gaussian or interpolatory")


def _k_option() -> Any:
    return typer.Option(None, "--k", help="Support multiplier (or 'auto')")


def _h_option() -> Any:
    return typer.Option(None, "--h", help="Bandwidth (or 'auto')")


def _interpolatory_option() -> Any:
    return typer.Option(None, "--interpolatory/--no-interpolatory", help="Interpolate the samples")


def _setup(
    config: Optional[Path],
    out: Optional[Path],
    **flags: Any,
) -> Tuple[RuntimeConfig, RunConfig]:
    load_dotenv()
    runtime = load_from_env()
    configure_logging(runtime.log_level)
    if out:
        runtime.output_dir = out
    runtime.output_dir.mkdir(parents=True, exist_ok=True)
    base = RunConfig().with_overrides(seed=runtime.seed)
    run = RunConfig.from_file(config, base=base) if config else base
    return runtime, run.with_overrides(**flags)


def _exit_codes(func: Callable[..., None]) -> Callable[..., None]:
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            func(*args, **kwargs)
        except (ConfigurationError, SampleFileError) as exc:
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(EXIT_USAGE) from exc
        except NumericalError as exc:
            typer.echo(f"numerical failure: {exc}", err=True)
            raise typer.Exit(EXIT_NUMERICAL) from exc

    return wrapper


def _check_batch(batch: BatchResult, kind: str) -> None:
    count = batch.values.shape[0]
    typer.echo(f"{kind}: {count - batch.n_failed}/{count} queries ok")
    if count and batch.n_failed == count:
        first = batch.failures[min(batch.failures)]
        raise NumericalError(f"every query failed; first error: {first}")


@app.command("fit-eval", help="Evaluate the approximation at query points.")
@_exit_codes
def fit_eval(
    samples: Path = typer.Option(..., "--samples", help="Sample CSV (x*, f* columns)"),
    queries: Path = typer.Option(..., "--queries", help="Query CSV (x* columns)"),
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    d: Optional[int] = _d_option(),
    m: Optional[str] = _m_option(),
    weight: Optional[str] = _weight_option(),
    k: Optional[str] = _k_option(),
    h: Optional[str] = _h_option(),
    interpolatory: Optional[bool] = _interpolatory_option(),
    dump_frames: Optional[Path] = typer.Option(None, "--dump-frames", help="Write per-query frames to this CSV"),
) -> None:
    runtime, run = _setup(config, out, seed=seed, d=d, m=m, weight=weight, k=k, h=h, interpolatory=interpolatory)
    sample_set = read_samples(samples)
    points = read_queries(queries, sample_set.ambient_dim)
    batch = run_from_config(
        runtime=runtime, run=run, command="fit-eval", samples=sample_set, queries=points, dump_frames=dump_frames
    )
    _check_batch(batch, "fit-eval")


@app.command("project", help="Project query points onto the approximating manifold.")
@_exit_codes
def project(
    samples: Path = typer.Option(..., "--samples", help="Sample CSV (x* columns; f* optional)"),
    queries: Path = typer.Option(..., "--queries", help="Query CSV (x* columns)"),
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    d: Optional[int] = _d_option(),
    m: Optional[str] = _m_option(),
    weight: Optional[str] = _weight_option(),
    k: Optional[str] = _k_option(),
    h: Optional[str] = _h_option(),
    interpolatory: Optional[bool] = _interpolatory_option(),
) -> None:
    runtime, run = _setup(config, out, seed=seed, d=d, m=m, weight=weight, k=k, h=h, interpolatory=interpolatory)
    sample_set = read_samples(samples)
    points = read_queries(queries, sample_set.ambient_dim)
    batch = run_from_config(runtime=runtime, run=run, command="project", samples=sample_set, queries=points)
    _check_batch(batch, "project")


@app.command("convergence", help="Estimate the approximation order on sphere grids.")
@_exit_codes
def convergence(
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    m: Optional[str] = _m_option(),
    weight: Optional[str] = _weight_option(),
    k: Optional[str] = _k_option(),
    h: Optional[str] = _h_option(),
    resolutions: Optional[str] = typer.Option(None, "--resolutions", help="Grid sizes g (N = g*g), comma list"),
) -> None:
    runtime, run = _setup(config, out, seed=seed, m=m, weight=weight, k=k, h=h, resolutions=resolutions)
    reports = run_from_config(runtime=runtime, run=run.with_overrides(d=2), command="convergence")
    for report in reports:
        typer.echo(json.dumps({"m": report.m, "slope": report.slope_fit.model_dump()}))
        if not any(res.usable for res in report.resolutions):
            raise NumericalError(f"every resolution failed for m={report.m}")


@app.command("klein-bench", help="Klein bottle regression benchmark.")
@_exit_codes
def klein_bench(
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    m: Optional[str] = _m_option(),
    weight: Optional[str] = _weight_option(),
    k: Optional[str] = _k_option(),
    h: Optional[str] = _h_option(),
    n_points: Optional[str] = typer.Option(None, "--n-points", help="Training set sizes, comma list"),
    snrdb: Optional[str] = typer.Option(None, "--snrdb", help="Signal-to-noise ratios in dB, comma list"),
    sigma_r: Optional[str] = typer.Option(None, "--sigma-r", help="Location noise levels, comma list"),
    trials: Optional[int] = typer.Option(None, "--trials", help="Trials per configuration"),
) -> None:
    runtime, run = _setup(
        config, out, seed=seed, m=m, weight=weight, k=k, h=h, n_points=n_points, snrdb=snrdb, sigma_r=sigma_r, trials=trials
    )
    report = run_from_config(runtime=runtime, run=run.with_overrides(d=2), command="klein-bench")
    typer.echo(report.rows().to_string(index=False))
    if report.runs and all(not run_report.finite_errors.size for run_report in report.runs):
        raise NumericalError("every Klein trial failed")


@app.command("helix-demo", help="Helix denoising demo with sample and query files.")
@_exit_codes
def helix_demo(
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    m: Optional[str] = _m_option(),
    weight: Optional[str] = _weight_option(),
    k: Optional[str] = _k_option(),
    h: Optional[str] = _h_option(),
) -> None:
    runtime, run = _setup(config, out, seed=seed, m=m, weight=weight, k=k, h=h)
    report = run_from_config(runtime=runtime, run=run, command="helix-demo")
    typer.echo(json.dumps(report.summary()["rmse"]))


@app.command("loo-cv", help="Leave-one-out cross-validation.")
@_exit_codes
def loo_cv(
    samples: Optional[Path] = typer.Option(None, "--samples", help="Sample CSV; the configured dataset when omitted"),
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    d: Optional[int] = _d_option(),
    m: Optional[str] = _m_option(),
    weight: Optional[str] = _weight_option(),
    k: Optional[str] = _k_option(),
    h: Optional[str] = _h_option(),
    interpolatory: Optional[bool] = _interpolatory_option(),
) -> None:
    runtime, run = _setup(config, out, seed=seed, d=d, m=m, weight=weight, k=k, h=h, interpolatory=interpolatory)
    sample_set = read_samples(samples) if samples else None
    report = run_from_config(runtime=runtime, run=run, command="loo-cv", samples=sample_set)
    typer.echo(report.summary()["display"])
    if report.n_trials and not report.finite_errors.size:
        raise NumericalError("every fold failed")


@app.command("scaling", help="Per-query time against the ambient dimension.")
@_exit_codes
def scaling(
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    d: Optional[int] = _d_option(),
    m: Optional[str] = _m_option(),
    k: Optional[str] = _k_option(),
    h: Optional[str] = _h_option(),
    n_list: Optional[str] = typer.Option(None, "--n-list", help="Ambient dimensions, comma list"),
) -> None:
    runtime, run = _setup(config, out, seed=seed, d=d, m=m, k=k, h=h, n_list=n_list)
    report = run_from_config(runtime=runtime, run=run, command="scaling")
    typer.echo(report.tables()["timings"].to_string(index=False))


@app.command("gen", help="Generate a synthetic sample file.")
@_exit_codes
def gen(
    dataset: Optional[str] = typer.Option(None, "--dataset", help="helix, sphere, klein or circle"),
    config: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    out: Optional[Path] = _out_option(),
    n_points: Optional[int] = typer.Option(None, "--n-points", help="Number of samples"),
    sigma_domain: Optional[float] = typer.Option(None, "--sigma-domain", help="Location noise"),
    sigma_target: Optional[float] = typer.Option(None, "--sigma-target", help="Value noise"),
    embed_dim: Optional[int] = typer.Option(None, "--embed-dim", help="Lift to this ambient dimension (0: off)"),
) -> None:
    runtime, run = _setup(
        config,
        out,
        dataset=dataset,
        seed=seed,
        n_points=n_points,
        sigma_domain=sigma_domain,
        sigma_target=sigma_target,
        embed_dim=embed_dim,
    )
    runner = ExperimentRunner(runtime=runtime, run=run)
    path = write_samples(runner.generate(), runtime.output_dir / f"{run.dataset}_samples.csv")
    runner.echo_config()
    typer.echo(str(path))


if __name__ == "__main__":  # pragma: no cover - CLI entrypoint
    app()
