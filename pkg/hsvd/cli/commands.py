import json
import logging

import click
import jsonschema

from hsvd.datagen import SpectrumKind, SpectrumSpec, gen_low_rank
from hsvd.errors import ContractViolation, HsvdError
from hsvd.io import MatrixFormat, load_matrix, save_matrix
from hsvd.kernels import full_svd
from hsvd.models.config import MatConfig
from hsvd.models.report import validate_report
from hsvd.services import BenchmarkService, DecompositionService

logger = logging.getLogger(__name__)

FORMATS = click.Choice([fmt.value for fmt in MatrixFormat])
SIGMA_SHOWN = 10


def parse_grid(value):
    """``"d1xc1,d2xc2"`` -> ``[(d1, c1), (d2, c2)]``"""
    grid = []
    for item in (value or '').split(','):
        item = item.strip().lower()
        if not item:
            continue
        d, sep, c = item.partition('x')
        if not sep or not d.isdigit() or not c.isdigit() or int(d) < 1 or int(c) < 1:
            raise click.BadParameter(f"'{item}' is not of the form DxC", param_hint='--grid')
        grid.append((int(d), int(c)))
    if not grid:
        raise click.BadParameter("grid must list at least one DxC block size", param_hint='--grid')
    return grid


def parse_floats(value, hint):
    try:
        values = [float(item) for item in value.split(',') if item.strip()]
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint=hint) from None
    if not values:
        raise click.BadParameter("at least one value is required", param_hint=hint)
    return values


def _mat_config(state, x, **overrides):
    try:
        return MatConfig.from_config(x.shape, state.config, **overrides)
    except ContractViolation as e:
        raise click.UsageError(str(e)) from None


input_option = click.option('--input', 'input_path', type=click.Path(dir_okay=False), required=True,
                            help="Matrix file (CSV or HSVD1).")
format_option = click.option('--format', 'fmt', type=FORMATS, default=None,
                             help="Matrix format; inferred from the extension by default.")
gamma_option = click.option('--gamma', type=float, default=None, help="Merge/truncate parameter.")
workers_option = click.option('--workers', type=click.IntRange(min=1), default=None,
                              help="Threads for leaf SVDs and same-level merges.")


@click.command('gen')
@click.option('--rows', type=click.IntRange(min=1), required=True)
@click.option('--cols', type=click.IntRange(min=1), required=True)
@click.option('--rank', type=click.IntRange(min=1), default=None,
              help="Number of decaying singular values (implied by explicit spectra).")
@click.option('--decay', default='exp:0.5', show_default=True,
              help="exp:RHO, pow:ALPHA or explicit:S1;S2;...")
@click.option('--noise-floor', type=click.FloatRange(min=0.0), default=0.0, show_default=True)
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@format_option
@click.pass_obj
def gen_command(state, rows, cols, rank, decay, noise_floor, seed, out, fmt):
    """Generate a synthetic low-rank matrix."""
    if rank is None and not decay.startswith(SpectrumKind.EXPLICIT.value):
        raise click.UsageError("--rank is required unless --decay is explicit")
    try:
        spec = SpectrumSpec.parse_decay(decay, rank=rank or 1, noise_floor=noise_floor, seed=seed)
    except ContractViolation as e:
        raise click.BadParameter(str(e), param_hint='--decay') from None
    x, sigma = gen_low_rank(rows, cols, spec)
    save_matrix(x, out, fmt)
    click.echo(f"wrote {rows}x{cols} matrix to {out}")
    click.echo(f"rank: {spec.rank}")
    click.echo(f"sigma: {state.fmt_list(sigma[:SIGMA_SHOWN])}")


@click.command('svd')
@input_option
@format_option
@gamma_option
@click.option('--row-block', 'row_block', type=click.IntRange(min=1), default=None, help="Rows per block (d).")
@click.option('--col-block', 'col_block', type=click.IntRange(min=1), default=None, help="Columns per block (c).")
@click.option('--refine', is_flag=True, help="Run iterative improvement afterwards.")
@click.option('--eps', type=float, default=None, help="Refinement tolerance.")
@click.option('--max-iters', type=click.IntRange(min=1), default=None)
@click.option('--max-rank', type=click.IntRange(min=1), default=None, help="Hard cap on every retained rank.")
@click.option('--transpose', is_flag=True, help="Merge rows first by decomposing the transpose.")
@workers_option
@click.option('--out-prefix', type=click.Path(), default=None,
              help="Write PREFIX_U/_S/_V.hsvd and PREFIX_sigma.csv.")
@click.pass_obj
def svd_command(state, input_path, fmt, gamma, row_block, col_block, refine, eps, max_iters,
                max_rank, transpose, workers, out_prefix):
    """Approximate truncated SVD of a matrix file."""
    x = load_matrix(input_path, fmt)
    shape = x.T.shape if transpose else x.shape
    cfg = _mat_config(
        state, x.T if transpose else x, gamma=gamma,
        row_block_rows=min(row_block, shape[0]) if row_block else None,
        col_block_cols=min(col_block, shape[1]) if col_block else None,
        epsilon=eps, max_iters=max_iters, max_rank=max_rank, workers=workers,
    )
    result = DecompositionService(cfg).decompose(x, refine=refine, transpose=transpose)
    factor = result.factor
    click.echo(f"rank: {factor.rank}")
    if result.refinement is not None:
        click.echo(f"refine iterations: {result.refinement.iterations} "
                   f"(converged: {str(result.refinement.converged).lower()})")
    click.echo(f"sigma: {state.fmt_list(factor.sigma)}")
    if out_prefix:
        save_matrix(factor.u, f"{out_prefix}_U.hsvd", MatrixFormat.HSVD_BINARY.value)
        save_matrix(factor.sigma[:, None], f"{out_prefix}_S.hsvd", MatrixFormat.HSVD_BINARY.value)
        save_matrix(factor.v, f"{out_prefix}_V.hsvd", MatrixFormat.HSVD_BINARY.value)
        save_matrix(factor.sigma[:, None], f"{out_prefix}_sigma.csv", MatrixFormat.CSV.value)
        click.echo(f"wrote factors to {out_prefix}_{{U,S,V}}.hsvd and {out_prefix}_sigma.csv")


def _benchmark_service(state, x, gamma, eps, max_iters, workers, repeats, refine):
    cfg = _mat_config(state, x, gamma=gamma, epsilon=eps, max_iters=max_iters, workers=workers)
    try:
        return BenchmarkService(cfg, repeats=repeats or state.config.BENCH_REPEATS, refine=refine,
                                config_class=state.config)
    except ContractViolation as e:
        raise click.UsageError(str(e)) from None


@click.command('bench')
@input_option
@format_option
@gamma_option
@click.option('--grid', required=True, help='Block sizes as "d1xc1,d2xc2,...".')
@click.option('--repeats', type=click.IntRange(min=1), default=None, help="Runs averaged per grid point.")
@click.option('--refine', is_flag=True, help="Also time each grid point with iterative improvement.")
@click.option('--eps', type=float, default=None)
@click.option('--max-iters', type=click.IntRange(min=1), default=None)
@click.option('--gram', is_flag=True, help="Benchmark the Gram matrix XᵀX instead of X.")
@workers_option
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), default=None, help="Write the report here.")
@click.pass_obj
def bench_command(state, input_path, fmt, gamma, grid, repeats, refine, eps, max_iters, gram, workers, json_path):
    """Speedup and error of the block pipeline over a grid of block sizes."""
    grid = parse_grid(grid)
    x = load_matrix(input_path, fmt)
    service = _benchmark_service(state, x, gamma, eps, max_iters, workers, repeats, refine)
    report = service.run_benchmark(x, grid, gram=gram)
    document = report.to_dict()
    try:
        validate_report(document)
    except jsonschema.ValidationError as e:
        raise HsvdError(f"report failed schema validation: {e.message}") from e
    for entry in report.grid:
        label = f"{entry.block_rows}x{entry.block_cols}"
        if not entry.ok:
            click.echo(f"{label}: error: {entry.error}")
            continue
        line = (f"{label}: rank {entry.recovered_rank}, speedup {state.fmt(entry.speedup)}, "
                f"error {state.fmt(entry.rel_error)}")
        if entry.rel_error_refined is not None:
            line += (f", refined speedup {state.fmt(entry.speedup_refined)}, "
                     f"refined error {state.fmt(entry.rel_error_refined)}")
        click.echo(line)
    failed = [entry for entry in report.grid if not entry.ok]
    if failed:
        logger.warning(f"{len(failed)} of {len(report.grid)} grid points failed")
    if json_path:
        with open(json_path, 'w') as f:
            json.dump(document, f, indent=2)
        click.echo(f"wrote report to {json_path}")


@click.command('compare')
@input_option
@format_option
@gamma_option
@click.option('--d', 'd', type=click.IntRange(min=1), required=True, help="Rows per block.")
@click.option('--c', 'c', type=click.IntRange(min=1), required=True, help="Columns per block.")
@click.option('--repeats', type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_obj
def compare_command(state, input_path, fmt, gamma, d, c, repeats):
    """Block pipeline against full SVD at one block size."""
    x = load_matrix(input_path, fmt)
    service = _benchmark_service(state, x, gamma, None, None, None, repeats, False)
    entry = service.run_benchmark(x, [(d, c)]).grid[0]
    if not entry.ok:
        raise HsvdError(entry.error)
    reference = full_svd(x).sigma
    click.echo(f"rank: {entry.recovered_rank}")
    click.echo(f"rel_error: {state.fmt(entry.rel_error)}")
    click.echo(f"speedup: {state.fmt(entry.speedup)}")
    click.echo(f"sigma mat: {state.fmt_list(entry.sigma_head[:SIGMA_SHOWN])}")
    click.echo(f"sigma full: {state.fmt_list(reference[:SIGMA_SHOWN])}")


@click.command('sweep')
@input_option
@format_option
@click.option('--gammas', required=True, help='Merge parameters as "g1,g2,...".')
@click.option('--grid', required=True, help='Block sizes as "d1xc1,d2xc2,...".')
@click.option('--repeats', type=click.IntRange(min=1), default=None)
@click.pass_obj
def sweep_command(state, input_path, fmt, gammas, grid, repeats):
    """Best speedup per merge parameter over a block-size grid."""
    gammas = parse_floats(gammas, '--gammas')
    grid = parse_grid(grid)
    x = load_matrix(input_path, fmt)
    service = _benchmark_service(state, x, None, None, None, None, repeats, False)
    try:
        rows = service.sweep_gamma(x, gammas, grid)
    except ContractViolation as e:
        raise click.BadParameter(str(e), param_hint='--gammas') from None
    for row in rows:
        if row.best_speedup is None:
            click.echo(f"gamma {state.fmt(row.gamma)}: every grid point failed")
            continue
        click.echo(
            f"gamma {state.fmt(row.gamma)}: speedup {state.fmt(row.best_speedup)} at "
            f"{row.block_rows}x{row.block_cols}, error {state.fmt(row.rel_error)}, rank {row.recovered_rank}"
        )


@click.command('baselines')
@input_option
@format_option
@click.option('--repeats', type=click.IntRange(min=1), default=None)
@click.pass_obj
def baselines_command(state, input_path, fmt, repeats):
    """Full-SVD run time of X, its transpose and its Gram matrix."""
    x = load_matrix(input_path, fmt)
    service = _benchmark_service(state, x, None, None, None, None, repeats, False)
    for name, seconds in service.time_baselines(x).items():
        click.echo(f"{name}: {state.fmt(seconds)} s")
    click.echo(f"kernel threads: {json.dumps(service.kernel_threads)}")


COMMANDS = [gen_command, svd_command, bench_command, compare_command, sweep_command, baselines_command]
