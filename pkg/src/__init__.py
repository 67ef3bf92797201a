"""
TT Completion Toolkit

Tensor-train completion of N-way arrays with a full weighted-gradient solver
and a per-entry stochastic solver, plus visual data tensorization for images.
"""

from .dense_tensor import DenseTensor
from .tt_model import TTCores, full_reconstruct, random_init
from .wopt_solver import run_wopt
from .sgd_solver import run_sgd
from .vdt import VdtPlan, apply_vdt, invert_vdt, plan_vdt
from .evaluation import compose, psnr, rse
from .completion_pipeline import CompletionPipeline

__version__ = "1.0.0"
__author__ = "TT Completion Toolkit"

# Package-level imports
__all__ = [
    'DenseTensor',
    'TTCores',
    'full_reconstruct',
    'random_init',
    'run_wopt',
    'run_sgd',
    'VdtPlan',
    'apply_vdt',
    'invert_vdt',
    'plan_vdt',
    'compose',
    'psnr',
    'rse',
    'CompletionPipeline',
]
