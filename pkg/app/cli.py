"""Command-line interface.

    carnot-lab group check SPEC
    carnot-lab char trace SCENARIO --init T,XHAT...,Y...
    carnot-lab lagrangian build SCENARIO
    carnot-lab verify SCENARIO [--archive]
    carnot-lab mollify PARAM_DIR --eps 0.1 --eps 0.05
    carnot-lab plotdata REPORT

Exit code 0 when every executed check passes, 1 on failed checks or lab
errors, 2 on usage errors.
"""

from functools import wraps
import logging
from pathlib import Path
import sys
from typing import Optional, Sequence

import click
from flask import has_app_context

from app import __version__, configure_logging, create_app
from app.config import Config
from app.domain.enums import CurveFlavor
from app.domain.exceptions import ConfigError, LabError
from app.domain.rules.lagrangian import attach_wbar
from app.domain.rules.mollification import mollified_phi_and_w
from app.repository.curves_repo import save_characteristic
from app.repository.fields_repo import save_field
from app.repository.params_repo import load_param, save_param
from app.repository.reports_repo import (
    archive_report,
    read_report,
    summary_table,
    write_plotdata,
    write_report,
)
from app.repository.scenarios_repo import load_scenario
from app.services.group_service import check_group_file
from app.services.scenario_service import prepare, run_scenario, trace_characteristic

logger = logging.getLogger(__name__)

PROG_NAME = "carnot-lab"


def lab_errors(fn):
    """Turn a LabError into a one-line click error (exit 1)."""
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LabError as exc:
            raise click.ClickException(f"{type(exc).__name__}: {exc}") from exc
    return wrapper


@click.group()
@click.version_option(__version__, prog_name=PROG_NAME)
@click.option("--output-dir", envvar="CARNOT_LAB_OUTPUT_DIR", default=Config.CARNOT_LAB_OUTPUT_DIR,
              type=click.Path(file_okay=False, path_type=Path), show_default=True,
              help="Directory for reports, curves and parameterizations.")
@click.option("--log-level", envvar="LOG_LEVEL", default=Config.LOG_LEVEL, show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.pass_context
def cli(ctx: click.Context, output_dir: Path, log_level: str) -> None:
    """Numerical lab for intrinsic Lipschitz graphs in step-2 Carnot groups."""
    configure_logging(log_level)
    ctx.obj = {"output_dir": output_dir}


def _output_dir(ctx: click.Context) -> Path:
    return Path(ctx.find_root().obj["output_dir"])


@cli.group()
def group() -> None:
    """Group specifications."""


@group.command("check")
@click.argument("spec_file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--samples", default=10_000, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", envvar="CARNOT_LAB_SEED", default=Config.CARNOT_LAB_SEED, type=int)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the report JSON here.")
@click.pass_context
def group_check(ctx: click.Context, spec_file: Path, samples: int, seed: int, out: Optional[Path]) -> None:
    """Validate SPEC_FILE and run the group-axiom properties."""
    report = check_group_file(spec_file, samples=samples, seed=seed)
    if out is not None:
        write_report(report, out)
    click.echo(summary_table(report), nl=False)
    ctx.exit(0 if report.all_passed else 1)


@cli.group()
def char() -> None:
    """Characteristic curves."""


@char.command("trace")
@click.argument("scenario_file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--init", "init", required=True,
              help="Initial point t,xhat...,y... (comma separated).")
@click.option("--j", "j", type=int, default=None, help="Direction; defaults to the first of the scenario.")
@click.option("--flavor", type=click.Choice([f.value for f in CurveFlavor]), default="plain",
              show_default=True)
@click.option("--until", "t_end", type=float, default=None, help="End time; defaults to the box edge.")
@click.option("--from", "t_start", type=float, default=None,
              help="Start of the interval for extremal curves; defaults to the box edge.")
@click.option("--step", type=float, default=None)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path))
@click.pass_context
@lab_errors
def char_trace(ctx, scenario_file, init, j, flavor, t_end, t_start, step, out) -> None:
    """Integrate one characteristic and write it as CSV."""
    scenario = load_scenario(scenario_file)
    lab = prepare(scenario)
    j = j or scenario.j_list[0]
    values = _parse_floats(init)
    spec = lab.spec
    if len(values) != 1 + (spec.m - 2) + spec.n:
        raise click.BadParameter(
            f"expected {1 + (spec.m - 2) + spec.n} values (t, xhat, y), got {len(values)}",
            param_hint="--init",
        )
    point = (values[0], values[1 : spec.m - 1], values[spec.m - 1 :])
    axis = scenario.domain.axes[j - 2]
    interval = (
        float(axis[0]) if t_start is None else t_start,
        float(axis[-1]) if t_end is None else t_end,
    )
    curve = trace_characteristic(lab, j, point, interval, CurveFlavor(flavor), step)
    out = out or _output_dir(ctx) / f"{scenario.name}_char_j{j}_{flavor}.csv"
    save_characteristic(curve, out)
    click.echo(f"wrote {len(curve.t_samples)} samples to {out}" + (" (truncated)" if curve.truncated else ""))
    ctx.exit(0)


@cli.group()
def lagrangian() -> None:
    """Lagrangian-type parameterizations."""


@lagrangian.command("build")
@click.argument("scenario_file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--j", "j_values", type=int, multiple=True, help="Directions; defaults to the scenario's.")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.pass_context
@lab_errors
def lagrangian_build(ctx, scenario_file, j_values, out) -> None:
    """Build the parameterization of every direction and write one directory per j."""
    scenario = load_scenario(scenario_file)
    lab = prepare(scenario)
    out = out or _output_dir(ctx) / f"{scenario.name}_param"
    for j in j_values or scenario.j_list:
        param = lab.param(j)
        target = save_param(param, out / f"j{j}", scenario.source_path)
        click.echo(f"j={j}: shrinkage {param.meta['shrinkage']:.3f}, written to {target}")
    ctx.exit(0)


@cli.command("verify")
@click.argument("scenario_file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Report JSON path.")
@click.option("--archive", is_flag=True, help="Also store the report in the SQLite archive.")
@click.option("--database", envvar="DATABASE", default=None, type=click.Path(dir_okay=False),
              help="Archive database; defaults to the application setting.")
@click.pass_context
@lab_errors
def verify(ctx, scenario_file, out, archive, database) -> None:
    """Run every check of SCENARIO_FILE and write the report."""
    scenario = load_scenario(scenario_file)
    report = run_scenario(scenario)
    out = out or _output_dir(ctx) / f"{scenario.name}_report.json"
    write_report(report, out)
    click.echo(summary_table(report), nl=False)
    if archive:
        run_id = _archive(report, scenario.name, database)
        click.echo(f"archived as {run_id}")
    click.echo(f"report: {out}")
    ctx.exit(0 if report.all_passed else 1)


@cli.command("mollify")
@click.argument("param_dir", type=click.Path(file_okay=False, path_type=Path))
@click.option("--eps", "eps_values", type=float, multiple=True, required=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.pass_context
@lab_errors
def mollify(ctx, param_dir, eps_values, out) -> None:
    """Write φ^ε and w^ε for each ε from a stored parameterization."""
    param, scenario_path = load_param(param_dir)
    if scenario_path is None:
        raise ConfigError(f"{param_dir} does not record the scenario it was built from")
    lab = prepare(load_scenario(scenario_path))
    if param.reference is not None and param.wbar_lagrangian is None:
        param = attach_wbar(lab.spec, lab.field, param, lab.scenario.tolerances.cauchy)
    out = out or Path(param_dir) / "mollified"
    for eps in eps_values:
        phi_eps, w_eps = mollified_phi_and_w(lab.spec, lab.field, param, eps,
                                             lab.scenario.tolerances.inversion_margin)
        save_field(phi_eps, out / f"phi_eps_{eps:g}.csv")
        save_field(w_eps, out / f"w_eps_{eps:g}.csv")
        click.echo(f"eps={eps:g}: {int(phi_eps.valid_mask.sum())} valid nodes")
    ctx.exit(0)


@cli.command("plotdata")
@click.argument("report_file", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.pass_context
@lab_errors
def plotdata(ctx, report_file, out) -> None:
    """Write CSV series of a report for external plotting."""
    report = read_report(report_file)
    out = out or report_file.with_name(f"{report_file.stem}_plot")
    for path in write_plotdata(report, out):
        click.echo(str(path))
    ctx.exit(0)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None,
                          prog_name=PROG_NAME, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return result if isinstance(result, int) else 0


def _archive(report, scenario_name: str, database: Optional[str]) -> str:
    if has_app_context():
        return archive_report(report, scenario_name)
    app = create_app({"DATABASE": database} if database else None)
    with app.app_context():
        return archive_report(report, scenario_name)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise click.BadParameter(f"{text!r} is not a comma separated list of numbers",
                                 param_hint="--init") from exc


if __name__ == "__main__":
    sys.exit(cli_main())
