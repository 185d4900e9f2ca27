import sys

import click
from loguru import logger
from pydantic import ValidationError

from backend.config import ReportFormat, Settings
from backend.report import emit_report
from backend.suites import SUITES, SuiteConfig, run_suite


def _int_list(ctx, param, value: str | None) -> list[int] | None:
    """Parse a comma separated list such as '3,4,5'; an empty string is an empty grid."""
    if value is None:
        return None
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected a comma separated list of integers, got {value!r}") from exc


@click.command()
@click.option(
    "--suite",
    required=True,
    type=click.Choice(sorted(SUITES) + ["all"]),
    help="Suite to run, or 'all'.",
)
@click.option("--m", "m", callback=_int_list, help="Dimensions, e.g. '3,5'.")
@click.option("--k", "k", callback=_int_list, help="Homogeneity degrees, e.g. '0,1,2'.")
@click.option("--order", callback=_int_list, help="Operator orders (or t for intertwining).")
@click.option("--alpha", callback=_int_list, help="Exponents for prop_c_alpha and the generalized kernels.")
@click.option("--beta", callback=_int_list, help="Exponents for the lemma suite.")
@click.option("--s", "s", callback=_int_list, help="B operator indices.")
@click.option("--seed", type=int, default=None, help="Base seed for random test vectors.")
@click.option("--budget", type=int, default=None, help="Term budget per radial function.")
@click.option("--tolerance", type=float, default=None, help="Relative error tolerance of numeric checks.")
@click.option("--resolution", type=int, default=None, help="Quadrature nodes per axis.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None, help="Write the report here.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice([f.value for f in ReportFormat]),
    default=ReportFormat.JSON.value,
    help="Report format.",
)
@click.option("--jobs", type=int, default=None, help="Worker processes; defaults to VERIFY_JOBS.")
@click.option("--log-level", default=None, help="Loguru level for stderr logging.")
def main(
    suite: str,
    m: list[int] | None,
    k: list[int] | None,
    order: list[int] | None,
    alpha: list[int] | None,
    beta: list[int] | None,
    s: list[int] | None,
    seed: int | None,
    budget: int | None,
    tolerance: float | None,
    resolution: int | None,
    report_path: str | None,
    fmt: str,
    jobs: int | None,
    log_level: str | None,
):
    """Run a verification suite and emit its report; exits 1 if any case fails."""
    settings = Settings()
    logger.remove()
    logger.add(sys.stderr, level=(log_level or settings.log_level).upper())

    grid = {"m": m, "k": k, "order": order, "alpha": alpha, "beta": beta, "s": s}
    try:
        config = SuiteConfig(
            suite=suite,
            seed=settings.seed if seed is None else seed,
            budget=settings.term_budget if budget is None else budget,
            tolerance=settings.tolerance if tolerance is None else tolerance,
            resolution=settings.resolution if resolution is None else resolution,
            **{key: value for key, value in grid.items() if value is not None},
        )
    except ValidationError as exc:
        raise click.BadParameter(str(exc)) from exc

    report = run_suite(config, jobs=settings.jobs if jobs is None else jobs)
    try:
        text = emit_report(report, report_path, ReportFormat(fmt))
    except OSError as exc:
        raise click.UsageError(f"Cannot write report to {report_path}: {exc}") from exc
    if report_path is None:
        click.echo(text)
    logger.info(f"Summary {report.summary}, digest {report.digest()}")
    sys.exit(report.exit_code)


if __name__ == "__main__":
    main()
