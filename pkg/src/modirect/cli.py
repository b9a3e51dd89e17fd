"""Command-line interface: single runs, strategy comparisons and seed sweeps."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .cases import (BENCHMARK_STRATEGIES, BUILTIN_CASES, compare_strategies,
                    history_csv, make_case, run_case, sweep)
from .errors import InvalidInputError, InvalidStateError, NumericalFailureError

_CASE_CHOICES = sorted(BUILTIN_CASES) + ["custom"]

# CLI flag -> CaseConfig field
_FLAG_FIELDS = {
    "strategy": "strategy",
    "evals": "max_evals",
    "noise": "noise_sigma",
    "seed": "seed",
    "freqs": "q_frequencies",
    "mode": "mode_index",
}


def _case_options(f):
    opts = [
        click.option("--case", "case_id", required=True,
                     type=click.Choice(_CASE_CHOICES), help="Benchmark case id."),
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="JSON file mirroring CaseConfig field names; flags override it."),
        click.option("--strategy", type=click.Choice(BENCHMARK_STRATEGIES), default=None),
        click.option("--evals", type=int, default=None, help="Evaluation budget."),
        click.option("--noise", type=float, default=None, help="Measurement noise sigma."),
        click.option("--seed", type=int, default=None, help="Noise generator seed."),
        click.option("--freqs", type=int, default=None, help="Number of measured frequencies."),
        click.option("--mode", type=int, default=None, help="Measured mode shape index (1-based)."),
        click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
                     help="Output file; stdout when omitted."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _build_config(case_id, config_path, **flags):
    overrides = {}
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise InvalidInputError("config file must contain a JSON object")
        data.pop("case_id", None)
        if "damages" in data:
            data["damages"] = tuple((int(e), float(s)) for e, s in data["damages"])
        if "bounds" in data:
            data["bounds"] = tuple(data["bounds"])
        overrides.update(data)
    for flag, field in _FLAG_FIELDS.items():
        if flags.get(flag) is not None:
            overrides[field] = flags[flag]
    return make_case(case_id, **overrides)


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out_path).write_text(text, encoding="utf-8")


@click.group()
def cli():
    """Multi-objective DIRECT damage identification on the cantilever benchmark."""


@cli.command("run")
@_case_options
def run_cmd(case_id, config_path, out_path, **flags):
    """Run one case and write the JSON report (plus a history CSV)."""
    config = _build_config(case_id, config_path, **flags)
    report = run_case(config)
    _emit(report.to_json(), out_path)
    if out_path is not None:
        Path(out_path).with_suffix(".history.csv").write_text(
            history_csv(report), encoding="utf-8")


@cli.command("compare")
@_case_options
def compare_cmd(case_id, config_path, out_path, **flags):
    """Run all four strategies on one case and write the comparison CSV."""
    config = _build_config(case_id, config_path, **flags)
    result = compare_strategies(config)
    for strategy, message in result.errors.items():
        click.echo(f"strategy {strategy} failed: {message}", err=True)
    _emit(result.to_csv(), out_path)


@cli.command("sweep")
@click.option("--seeds", "n_seeds", type=int, required=True, help="Number of seeds.")
@_case_options
def sweep_cmd(case_id, config_path, out_path, n_seeds, **flags):
    """Repeat a case over consecutive seeds and write per-seed posteriors."""
    config = _build_config(case_id, config_path, **flags)
    reports = sweep(config, n_seeds)
    n = config.n_elements
    lines = ["seed," + ",".join(f"element_{i + 1}" for i in range(n))]
    for report in reports:
        lines.append(str(report.config.seed) + "," +
                     ",".join(repr(float(v)) for v in report.posterior_alpha))
    _emit("\n".join(lines) + "\n", out_path)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except (InvalidInputError, click.ClickException, click.UsageError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (NumericalFailureError, InvalidStateError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 2
    except click.exceptions.Abort:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
