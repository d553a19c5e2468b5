"""
Command line of the package, runnable as `nonstatic-phase` and
`python -m nonstatic_phase`.

Usage:
    nonstatic-phase phases --config wave.cfg --t-end 6 --n-steps 301 --out outputs
    nonstatic-phase figure fig8 --out figures
    nonstatic-phase sweep --grid c1=0.1:5:50 --grid c2=0.1:5:50 --set A0=1
    nonstatic-phase verify random --seed 3

Exit codes: 0 success, 1 failed verification, 2 usage or configuration error.
"""
import logging
import logging.config
from functools import wraps
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence

import click
import dotenv
import yaml

from nonstatic_phase import __version__
from nonstatic_phase.exceptions import ConfigError, NonstaticPhaseError, ParameterError
from nonstatic_phase.runs import FigureRun, PhasesRun, SweepRun, VerifyRun
from nonstatic_phase.sweep import parse_axis
from nonstatic_phase.utils import conf

LOGGING_CONFIG = Path(__file__).parent / "conf" / "logging.yml"
OUT_ENVVAR = "NONSTATIC_PHASE_OUT"


def setup_logging(verbose: bool = True, path: Path = LOGGING_CONFIG) -> None:
    with open(path, encoding="utf-8") as f:
        logging.config.dictConfig(yaml.safe_load(f))
    if not verbose:
        logging.getLogger().setLevel(logging.WARNING)


def parse_assignments(items: Iterable[str], what: str = "--set") -> Dict[str, str]:
    """
    Split ``key=value`` items (last one wins).
    """
    pairs = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise ConfigError(f"{what} expects key=value, got {item!r}")
        pairs[key.strip()] = value.strip()
    return pairs


def parse_overrides(items: Iterable[str]) -> Dict[str, object]:
    overrides = {}
    for key, value in parse_assignments(items).items():
        try:
            overrides[key] = conf.parse_value(value)
        except ValueError as e:
            raise ConfigError(f"--set {key}: {e}") from e
    return overrides


def exit_codes(func):
    """
    Turns library errors into click errors: invalid parameters and
    configuration exit with 2, other failures with 1.
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigError, ParameterError) as e:
            raise click.UsageError(str(e)) from e
        except NonstaticPhaseError as e:
            raise click.ClickException(str(e)) from e

    return wrapper


def run_options(func):
    """
    Flags shared by every command.
    """
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="key = value wave config file."),
        click.option(
            "--out",
            "out_dir",
            type=click.Path(file_okay=False),
            envvar=OUT_ENVVAR,
            default="outputs",
            show_default=True,
            help=f"Output directory (default from ${OUT_ENVVAR}).",
        ),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--jobs", "n_jobs", type=int, default=1, show_default=True, help="Parallel workers."),
        click.option("--set", "settings", multiple=True, metavar="KEY=VALUE", help="Override a config value."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.version_option(__version__, prog_name="nonstatic-phase")
@click.option("--quiet", is_flag=True, default=False, help="Only log warnings and errors.")
@click.pass_context
def cli(ctx, quiet):
    """
    Geometric, dynamical and total phases of nonstatic light waves.
    """
    dotenv.load_dotenv()
    setup_logging(verbose=not quiet)
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = not quiet


@cli.command()
@run_options
@click.option("--t-start", type=float, default=None, help="First time (default t0).")
@click.option("--t-end", type=float, default=10.0, show_default=True)
@click.option("--n-steps", type=int, default=101, show_default=True)
@click.pass_context
@exit_codes
def phases(ctx, config_path, out_dir, seed, n_jobs, settings, t_start, t_end, n_steps):
    """
    Phase trajectory of one configuration (phases.csv).
    """
    PhasesRun(
        t_start=t_start,
        t_end=t_end,
        n_steps=n_steps,
        config_path=config_path,
        out_dir=out_dir,
        verbose=ctx.obj["verbose"],
        overrides=parse_overrides(settings),
    ).run()


@cli.command()
@click.argument("preset")
@run_options
@click.option("--presets", "presets_path", type=click.Path(dir_okay=False), default=None, help="YAML file overriding presets.")
@click.pass_context
@exit_codes
def figure(ctx, preset, config_path, out_dir, seed, n_jobs, settings, presets_path):
    """
    Reproduce a figure preset (fig1 ... fig11): CSV and SVG per panel.
    """
    FigureRun(
        preset=preset,
        presets_path=presets_path,
        n_jobs=n_jobs,
        seed=seed,
        config_path=config_path,
        out_dir=out_dir,
        verbose=ctx.obj["verbose"],
        overrides=parse_overrides(settings),
    ).run()


@cli.command()
@run_options
@click.option("--grid", "grids", multiple=True, metavar="AXIS=SPEC", help="Axis as start:stop:num or a comma list.")
@click.option("--t-span", type=float, default=1.0, show_default=True, help="Evolution time of gamma_G.")
@click.option("--fock-level", "fock_levels", type=int, multiple=True, help="Also report gamma_G,n for this n.")
@click.pass_context
@exit_codes
def sweep(ctx, config_path, out_dir, seed, n_jobs, settings, grids, t_span, fock_levels):
    """
    Sweep over c1, c2, phi, theta, A0 and omega (sweep.csv).
    """
    axes = {name: parse_axis(spec) for name, spec in parse_assignments(grids, "--grid").items()}
    SweepRun(
        axes=axes,
        t_span=t_span,
        fock_levels=fock_levels,
        n_jobs=n_jobs,
        config_path=config_path,
        out_dir=out_dir,
        verbose=ctx.obj["verbose"],
        overrides=parse_overrides(settings),
    ).run()


@cli.command()
@click.argument("source", required=False, default=None)
@run_options
@click.option("--perturb-fddot", type=float, default=None, help="Scale f'' in the Schrodinger check, e.g. 1.01.")
@click.option("--check", "checks", multiple=True, help="Run only these checks.")
@click.pass_context
@exit_codes
def verify(ctx, source, config_path, out_dir, seed, n_jobs, settings, perturb_fddot, checks):
    """
    Run the verification suite on a config, or on a random wave with
    SOURCE = random. Exits with 1 when a check fails.
    """
    if source is not None and source != "random":
        if config_path is not None:
            raise ConfigError("give the config either as SOURCE or with --config")
        config_path, source = source, "config"
    records = VerifyRun(
        source=source or "config",
        seed=seed,
        perturb_fddot=perturb_fddot,
        checks=checks or None,
        n_jobs=n_jobs,
        config_path=config_path,
        out_dir=out_dir,
        verbose=ctx.obj["verbose"],
        overrides=parse_overrides(settings),
    ).run()
    failed = [record for record in records if not record.passed]
    for record in failed:
        click.echo(f"FAIL {record.name}: metric={record.metric:.3e} > tolerance={record.tolerance:.1e}", err=True)
    if failed:
        ctx.exit(1)
    click.echo(f"all {len(records)} checks passed", err=True)


def main(args: Optional[Sequence[str]] = None):
    cli(args=args, prog_name="nonstatic-phase")


if __name__ == "__main__":
    main()
