#!/usr/bin/env python3
"""
raman-multiplex - Batch Entry Point
Runs one scenario from an experiment document and writes the report and curves.

Exit codes: 0 success, 1 configuration, 2 resource/truncation/I-O,
3 verification failure.
"""
import logging
import sys

import click

import config
from raman_multiplex.errors import RamanModelError, VerificationFailure
from raman_multiplex.experiment_runner import SCENARIOS, load_experiment_config, run
from raman_multiplex.report_writer import write_report

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("scenario", type=click.Choice(SCENARIOS))
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON experiment document (optional for 'verify').")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help=f"Output directory (default: $RAMAN_OUTPUT_DIR or {config.OUTPUT_DIR}).")
@click.option("--strict", is_flag=True, default=config.STRICT_MODE,
              help="Escalate truncation and coherence-bound warnings to errors.")
@click.option("--jobs", type=click.IntRange(min=-1), default=config.DEFAULT_JOBS, show_default=True,
              help="Worker processes for sweeps (-1 = all cores).")
@click.option("--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def cli(ctx, scenario, config_path, out_dir, strict, jobs, verbose):
    """Run SCENARIO and write a JSON report plus CSV curves."""
    setup_logging(verbose)
    try:
        experiment = load_experiment_config(config_path, scenario).with_strict(strict)
        report = run(experiment, jobs=jobs or 1)
        target = out_dir or experiment.output.directory or config.OUTPUT_DIR
        path = write_report(report, target, experiment.output.report_name, experiment.output.csv)
        click.echo(str(path))
        code = 0
        if report.failure is not None:
            logger.error(f"Verification failed: {report.failure}")
            click.echo(f"Verification failed: {report.failure}", err=True)
            code = VerificationFailure.exit_code
    except RamanModelError as e:
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(f"Error: {e}", err=True)
        code = e.exit_code
    ctx.exit(code)


def main(argv=None) -> int:
    """Console-script entry; usage errors count as configuration errors."""
    try:
        return cli.main(args=argv, prog_name="raman-multiplex", standalone_mode=False) or 0
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
