import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hsvd.config import Config
from hsvd.costmodel import estimate_cost
from hsvd.errors import ContractViolation, HsvdError
from hsvd.factorization import rank_k_error, singular_vector_cosines
from hsvd.hierarchy import hierarchical_svd, recover_left_vectors
from hsvd.kernels import full_svd
from hsvd.models.config import MatConfig
from hsvd.models.factor import SvdFactor
from hsvd.models.matrix import as_dense
from hsvd.models.report import SIGMA_HEAD, BenchReport, GammaSweepRow, GridEntry, predicted_dict
from hsvd.refine import RefineResult, refine_factors

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Decomposition:
    factor: SvdFactor
    refinement: Optional[RefineResult] = None


def _mean(values):
    return float(np.mean(values))


class DecompositionService:
    """Run the block pipeline on one matrix"""

    def __init__(self, cfg: MatConfig):
        self.cfg = cfg

    def decompose(self, x, refine: bool = False, transpose: bool = False) -> Decomposition:
        """Full ``(U, S, V)`` of ``x``, optionally refined.

        ``transpose`` runs the pipeline on ``xᵀ`` (row merges first) and
        swaps the factors back.
        """
        target = x.T if transpose else x
        partial = hierarchical_svd(target, self.cfg)
        if refine:
            result = refine_factors(target, partial.v, partial.sigma, self.cfg.epsilon, self.cfg.max_iters)
            factor, refinement = result.factor, result
            logger.info(
                f"refinement finished after {result.iterations} pass(es), "
                f"change {result.final_error:.3e}, converged={result.converged}"
            )
        else:
            factor, refinement = recover_left_vectors(target, partial.v), None
        if transpose:
            factor = factor.transpose()
        return Decomposition(factor=factor, refinement=refinement)


class BenchmarkService:
    """Time the block pipeline against a full SVD over a grid of block sizes"""

    def __init__(self, cfg: MatConfig, repeats: int = Config.BENCH_REPEATS, refine: bool = True,
                 config_class=Config):
        if repeats < 1:
            raise ContractViolation(f"repeats must be >= 1, got {repeats}")
        self.cfg = cfg
        self.repeats = repeats
        self.refine = refine
        self.kernel_threads = dict(config_class.KERNEL_THREADS)

    def run_benchmark(self, x, grid: Sequence[Tuple[int, int]], gram: bool = False) -> BenchReport:
        if not grid:
            raise ContractViolation("benchmark grid is empty")
        if gram:
            x = as_dense(x.T @ x)
        m, n = x.shape
        reference = full_svd(x)
        report = BenchReport(
            matrix_dims=(m, n), gamma=self.cfg.gamma, epsilon=self.cfg.epsilon,
            repeats=self.repeats, refine=self.refine, gram=gram,
            workers=self.cfg.workers, kernel_threads=self.kernel_threads,
        )
        for d, c in grid:
            try:
                entry = self._run_entry(x, reference, d, c)
            except HsvdError as e:
                logger.error(f"grid point ({d}, {c}) failed: {e}")
                entry = GridEntry.failed(d, c, str(e))
            report.grid.append(entry)
        return report

    def _run_entry(self, x, reference: SvdFactor, d: int, c: int) -> GridEntry:
        m, n = x.shape
        cfg = self.cfg.with_blocks(min(d, m), min(c, n))
        mat_times, refined_times, full_times = [], [], []
        refined = None
        for _ in range(self.repeats):
            start = time.perf_counter()
            partial = hierarchical_svd(x, cfg)
            factor = recover_left_vectors(x, partial.v)
            mat_times.append(time.perf_counter() - start)

            if self.refine:
                start = time.perf_counter()
                partial = hierarchical_svd(x, cfg)
                refined = refine_factors(x, partial.v, partial.sigma, cfg.epsilon, cfg.max_iters)
                refined_times.append(time.perf_counter() - start)

            start = time.perf_counter()
            full_svd(x)
            full_times.append(time.perf_counter() - start)

        rank = factor.rank
        full_time = _mean(full_times)
        entry = GridEntry(
            block_rows=d,
            block_cols=c,
            recovered_rank=rank,
            wall_time_mat_s=_mean(mat_times),
            wall_time_full_svd_s=full_time,
            speedup=full_time / _mean(mat_times),
            rel_error=rank_k_error(x, factor, rank, reference=reference),
            u_cosine_min=float(singular_vector_cosines(reference, factor, rank).min()),
            sigma_head=factor.sigma[:SIGMA_HEAD].tolist(),
            predicted=predicted_dict(estimate_cost(m, n, cfg.col_block_cols, rank)),
        )
        if refined is not None:
            entry.wall_time_mat_refined_s = _mean(refined_times)
            entry.speedup_refined = full_time / _mean(refined_times)
            entry.rel_error_refined = rank_k_error(x, refined.factor, min(rank, refined.factor.rank),
                                                   reference=reference)
            entry.refine_iterations = refined.iterations
            entry.refine_converged = refined.converged
            entry.u_cosine_min_refined = float(
                singular_vector_cosines(reference, refined.factor, min(rank, refined.factor.rank)).min()
            )
            entry.sigma_head_refined = refined.factor.sigma[:SIGMA_HEAD].tolist()
        logger.info(
            f"({d}, {c}): rank {rank}, speedup {entry.speedup:.2f}, error {entry.rel_error:.3e}"
        )
        return entry

    def sweep_gamma(self, x, gammas: Sequence[float], grid: Sequence[Tuple[int, int]]) -> List[GammaSweepRow]:
        """Best grid point per merge parameter, by unrefined speedup."""
        rows = []
        for gamma in gammas:
            service = BenchmarkService(replace(self.cfg, gamma=gamma), repeats=self.repeats, refine=False)
            service.kernel_threads = self.kernel_threads
            entries = [e for e in service.run_benchmark(x, grid).grid if e.ok]
            if not entries:
                logger.warning(f"every grid point failed for gamma={gamma}")
                rows.append(GammaSweepRow(gamma, None, None, None, None, None))
                continue
            best = max(entries, key=lambda e: e.speedup)
            rows.append(GammaSweepRow(
                gamma=gamma, best_speedup=best.speedup, block_rows=best.block_rows,
                block_cols=best.block_cols, rel_error=best.rel_error,
                recovered_rank=best.recovered_rank,
            ))
        return rows

    def time_baselines(self, x) -> Dict[str, float]:
        """Mean seconds for SVD(X), SVD(Xᵀ) and the Gram route via XᵀX."""
        timings = {'svd_x': [], 'svd_xt': [], 'svd_gram': []}
        for _ in range(self.repeats):
            start = time.perf_counter()
            full_svd(x)
            timings['svd_x'].append(time.perf_counter() - start)

            start = time.perf_counter()
            full_svd(x.T)
            timings['svd_xt'].append(time.perf_counter() - start)

            start = time.perf_counter()
            _gram_svd(x)
            timings['svd_gram'].append(time.perf_counter() - start)
        return {name: _mean(values) for name, values in timings.items()}


def _gram_svd(x) -> SvdFactor:
    gram = full_svd(x.T @ x)
    sigma = np.sqrt(gram.sigma)
    # squaring halves the usable precision
    keep = max(1, int(np.count_nonzero(sigma > sigma[0] * math.sqrt(np.finfo(np.float64).eps))))
    v = gram.v[:, :keep]
    u = (x @ v) / np.where(sigma[:keep] > 0, sigma[:keep], 1.0)
    return SvdFactor(sigma=sigma[:keep], u=u, v=v)


def run_benchmark(x, cfg: MatConfig, grid, repeats: int, refine: bool = True, gram: bool = False) -> BenchReport:
    return BenchmarkService(cfg, repeats=repeats, refine=refine).run_benchmark(x, grid, gram=gram)
