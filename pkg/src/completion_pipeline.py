"""
Completion Pipeline
Normalize -> (optional) VDT -> solver -> inverse VDT -> denormalize -> compose,
the sequence behind `tt_complete.py complete`.
"""

import time
import logging
from typing import Optional

import numpy as np

from .convergence_log import ConvergenceLog
from .dense_tensor import DenseTensor
from .errors import EmptyObservationError, ShapeMismatchError
from .evaluation import CompletionResult, compose, denormalize, normalize, psnr, rse
from .run_config import RunConfig
from .sgd_solver import run_sgd
from .tensor_io import save_cores, write_tnsr
from .tt_model import TTCores, full_reconstruct
from .vdt import VdtPlan, apply_vdt, invert_vdt, plan_for_dims
from .wopt_solver import run_wopt

logger = logging.getLogger(__name__)

SOLVERS = {"wopt": run_wopt, "sgd": run_sgd}


class CompletionPipeline:
    """Runs one completion job described by a RunConfig"""

    def __init__(self, config: RunConfig, progress: bool = False):
        self.config = config
        self.progress = progress
        self.plan: Optional[VdtPlan] = None
        self.model: Optional[TTCores] = None
        self.log: Optional[ConvergenceLog] = None

    def _resolve_plan(self, dims) -> Optional[VdtPlan]:
        plan_text = self.config.vdt
        if not plan_text or plan_text == "none":
            return None
        plan = plan_for_dims(dims, plan_text)
        logger.info(f"VDT plan: {plan.to_text()} -> output dims {plan.output_dims}")
        return plan

    def _solve(self, y: DenseTensor, w: DenseTensor):
        solver = SOLVERS[self.config.algorithm]
        if self.config.algorithm == "sgd":
            return solver(y, w, self.config.solver, progress=self.progress)
        return solver(y, w, self.config.solver)

    def run(self, y: DenseTensor, w: DenseTensor, truth: Optional[DenseTensor] = None) -> CompletionResult:
        """Complete ``y`` where ``w`` is 0; scores against ``truth`` (or ``y`` itself)"""
        if y.dims != w.dims:
            raise ShapeMismatchError(f"Mask dims {w.dims} != data dims {y.dims}")
        if truth is not None and truth.dims != y.dims:
            raise ShapeMismatchError(f"Truth dims {truth.dims} != data dims {y.dims}")
        if not np.any(w.data == 1):
            raise EmptyObservationError("Mask has no observed entries")

        low, high = None, None
        y_work = y
        if self.config.normalize:
            try:
                y_work, low, high = normalize(y, support=w)
            except ValueError as e:
                logger.warning(f"Skipping normalization: {e}")

        self.plan = self._resolve_plan(y.dims)
        if self.plan is not None:
            y_work, w_work = apply_vdt(y_work, self.plan), apply_vdt(w, self.plan)
        else:
            w_work = w

        start = time.perf_counter()
        self.model, self.log = self._solve(y_work, w_work)
        elapsed = time.perf_counter() - start

        x = full_reconstruct(self.model)
        if self.plan is not None:
            x = invert_vdt(x, self.plan)
        if low is not None:
            x = denormalize(x, low, high)
        z = compose(y, w, x)

        reference = truth if truth is not None else y
        result = CompletionResult(
            Z=z,
            rse=rse(reference, z),
            psnr=psnr(reference, z, self.config.psnr_peak),
            elapsed=elapsed,
            iterations=self.log.iterations,
        )
        logger.info(f"Completion done in {elapsed:.2f}s: RSE={result.rse:.4f} PSNR={result.psnr:.2f}dB")
        return result

    def save(self, result: CompletionResult):
        """Write Z, the convergence log and (optionally) the cores"""
        write_tnsr(result.Z, self.config.output_path)
        if self.config.log_path and self.log is not None:
            self.log.write_csv(self.config.log_path)
        if self.config.cores_path and self.model is not None:
            save_cores(self.model, self.config.cores_path)
