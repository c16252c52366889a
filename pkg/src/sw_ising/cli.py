"""
Command Line Interface for the sw-ising package.
"""

import logging
import sys
import time

import click
import pandas as pd

from .config import settings
from .config.settings import (
    format_provenance_header,
    get_config_summary,
    load_config_with_source,
    save_config,
    validate_config,
)
from .experiments import (
    output_path,
    run_fixedpoint,
    run_generate,
    run_learn,
    run_mix,
    run_reproduce,
    run_sample,
    write_result_csv,
)
from .graph.loaders import write_edge_list

logger = logging.getLogger(__name__)


def _resolve_config(ctx: click.Context) -> dict:
    """Load the configuration and apply the global command-line overrides."""
    options = ctx.obj
    config, source = load_config_with_source(options["config_path"])
    if options["seed"] is not None:
        config["seed"] = options["seed"]
    if options["jobs"] is not None:
        config["jobs"] = options["jobs"]
    if options["out"] is not None:
        config["paths"]["output_dir"] = options["out"]
    if not validate_config(config):
        raise ValueError("invalid configuration (see log for details)")
    if source:
        logger.info(f"Using configuration from: {source}")
    return config


@click.group()
@click.version_option(package_name="sw-ising-analysis")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON config file, or a result file whose header holds a config",
)
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Root seed")
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Parallel worker processes")
@click.option(
    "--out",
    type=click.Path(file_okay=False, dir_okay=True),
    default=None,
    help="Output directory (default: paths.output_dir of the config)",
)
@click.option("--verbose", "-v", is_flag=True, help="Log debug messages")
@click.option("--quiet", "-q", is_flag=True, help="Only log warnings and hide progress bars")
@click.pass_context
def main(ctx, config_path, seed, jobs, out, verbose, quiet):
    """SW-Ising CLI - Swendsen-Wang and Gibbs sampling experiments for Ising models."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    ctx.ensure_object(dict)
    ctx.obj.update(
        {"config_path": config_path, "seed": seed, "jobs": jobs, "out": out, "quiet": quiet}
    )


@main.command()
@click.option("--output", "filename", default="graph.edges", help="File name inside the output directory")
@click.pass_context
def generate(ctx, filename: str):
    """Generate a graph and write its canonical edge list."""
    try:
        config = _resolve_config(ctx)
        graph = run_generate(config)
        header = [line[2:] for line in format_provenance_header("generate", config)]
        path = write_edge_list(graph, output_path(config, filename), comments=header)
        click.echo(f"Vertices: {graph.num_vertices}")
        click.echo(f"Edges: {graph.num_edges}")
        click.echo(f"Graph written to: {path}")

    except Exception as e:
        click.echo(f"Error generating graph: {str(e)}", err=True)
        sys.exit(1)


@main.command()
@click.option("--chain", type=click.Choice(["sw", "gibbs"]), default=None, help="Override sample.chain")
@click.option("--steps", type=click.IntRange(min=0), default=None, help="Override sample.steps")
@click.pass_context
def sample(ctx, chain, steps):
    """Run a chain and write the recorded states and a magnetization/phase summary."""
    try:
        config = _resolve_config(ctx)
        if chain is not None:
            config["sample"]["chain"] = chain
        if steps is not None:
            config["sample"]["steps"] = steps

        states, summary = run_sample(config)
        samples = pd.DataFrame(states, columns=[f"v{i}" for i in range(states.shape[1])])
        samples_path = write_result_csv(samples, output_path(config, "samples.csv"), "sample", config)
        summary_path = write_result_csv(summary, output_path(config, "sample_summary.csv"), "sample", config)

        click.echo(f"Recorded {len(summary)} states")
        click.echo(f"Mean magnetization: {summary['magnetization'].mean():.4f}")
        click.echo(f"Samples written to: {samples_path}")
        click.echo(f"Summary written to: {summary_path}")

    except Exception as e:
        click.echo(f"Error sampling: {str(e)}", err=True)
        sys.exit(1)


@main.command()
@click.pass_context
def mix(ctx):
    """Measure grand-coupling coalescence times over a sweep of graph sizes."""
    try:
        config = _resolve_config(ctx)
        start = time.perf_counter()
        df = run_mix(config, quiet=ctx.obj["quiet"])
        logger.info(f"Mixing sweep finished in {time.perf_counter() - start:.1f}s")
        path = write_result_csv(df, output_path(config, "mix.csv"), "mix", config)

        medians = df.groupby(["n", "chain"], sort=False)["steps"].median()
        for (n, chain), median in medians.items():
            click.echo(f"n={n} {chain}: median {median:g} steps")
        click.echo(f"Coalescence sweep written to: {path}")

    except Exception as e:
        click.echo(f"Error running mixing sweep: {str(e)}", err=True)
        sys.exit(1)


@main.command()
@click.pass_context
def fixedpoint(ctx):
    """Tabulate fixed points of the simplified SW map over a (B, k) grid."""
    try:
        config = _resolve_config(ctx)
        df = run_fixedpoint(config)
        path = write_result_csv(df, output_path(config, "fixedpoint.csv"), "fixedpoint", config)
        click.echo(f"Computed {len(df)} fixed points")
        click.echo(f"Phase diagram written to: {path}")

    except Exception as e:
        click.echo(f"Error computing fixed points: {str(e)}", err=True)
        sys.exit(1)


@main.command()
@click.pass_context
def learn(ctx):
    """Learn a model by contrastive divergence with each configured chain."""
    try:
        config = _resolve_config(ctx)
        start = time.perf_counter()
        df = run_learn(config, quiet=ctx.obj["quiet"])
        logger.info(f"Learning finished in {time.perf_counter() - start:.1f}s")
        path = write_result_csv(df, output_path(config, "learn.csv"), "learn", config)

        final = df.groupby("chain", sort=False).last()
        for chain, row in final.iterrows():
            click.echo(
                f"{chain}: field error {row['field_error']:.4f}, "
                f"coupling error {row['coupling_error']:.4f}"
            )
        click.echo(f"Error trace written to: {path}")

    except Exception as e:
        click.echo(f"Error learning: {str(e)}", err=True)
        sys.exit(1)


@main.command()
@click.pass_context
def reproduce(ctx):
    """Run the full generate/sample/learn pipeline over a sweep and summarize errors."""
    try:
        config = _resolve_config(ctx)
        start = time.perf_counter()
        points, summary = run_reproduce(config, quiet=ctx.obj["quiet"])
        logger.info(f"Reproduce sweep finished in {time.perf_counter() - start:.1f}s")
        points_path = write_result_csv(points, output_path(config, "reproduce_points.csv"), "reproduce", config)
        summary_path = write_result_csv(summary, output_path(config, "reproduce_summary.csv"), "reproduce", config)
        click.echo(f"Points written to: {points_path}")
        click.echo(f"Summary written to: {summary_path}")

    except Exception as e:
        click.echo(f"Error running reproduce pipeline: {str(e)}", err=True)
        sys.exit(1)

    failed = int((points["status"] != "ok").sum())
    if failed:
        click.echo(f"Error: {failed} of {len(points)} point rows failed", err=True)
        sys.exit(1)


@main.command("config-summary")
@click.pass_context
def config_summary(ctx):
    """Display current configuration summary and source file path."""
    try:
        summary = get_config_summary(ctx.obj["config_path"])
        click.echo(summary)

    except Exception as e:
        click.echo(f"Error getting configuration summary: {str(e)}", err=True)
        sys.exit(1)


@main.command("create-config")
@click.option(
    "--output-path",
    "config_file",
    type=click.Path(dir_okay=False, file_okay=True),
    default="sw_ising_config.json",
    help="Output path for configuration file (default: sw_ising_config.json)",
)
def create_config(config_file: str):
    """Create a configuration file holding the defaults."""
    try:
        save_config(settings.DEFAULT_CONFIG, config_file)
        click.echo(f"Configuration file created: {config_file}")
        click.echo("Edit the file or use SW_ISING_* environment variables to override settings.")

    except Exception as e:
        click.echo(f"Error creating configuration: {str(e)}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
