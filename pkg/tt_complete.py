#!/usr/bin/env python3
"""
TT Completion Command-Line Tool
Synthesize tensors, build masks, tensorize images, run TT-WOPT / TT-SGD
completion and score the results.
"""

import os
import sys
import logging
import argparse
from typing import List, Optional

# Add src directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from rich.table import Table

from src.completion_pipeline import CompletionPipeline
from src.errors import ShapeMismatchError
from src.evaluation import MASK_GENERATORS, gen_sin_tensor, gen_tt_tensor, missing_rate_of, psnr, rse
from src.main import EXIT_OK, console, exit_code_for, load_config, setup_logging
from src.run_config import add_solver_args, build_run_config, parse_ranks
from src.tensor_io import read_frames, read_tnsr, write_frames, write_text, write_tnsr
from src.vdt import VdtPlan, apply_vdt, invert_vdt, plan_for_dims

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = ('.ppm', '.pgm', '.pnm')


def parse_dims(text: str) -> tuple:
    """'26,26,26' -> (26, 26, 26)"""
    try:
        dims = tuple(int(p) for p in text.replace('x', ',').split(',') if p.strip())
    except ValueError:
        raise ValueError(f"Cannot parse dims '{text}'")
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"Dims must be positive integers, got '{text}'")
    return dims


def cmd_synth(args) -> int:
    """Write the oscillating-function tensor (or an exact TT-model tensor)"""
    dims = parse_dims(args.dims)
    if args.tt_ranks:
        tensor = gen_tt_tensor(dims, parse_ranks(args.tt_ranks), args.seed, args.scale)
    else:
        tensor = gen_sin_tensor(dims)
    write_tnsr(tensor, args.out)
    logger.info(f"Synthesized tensor {dims} -> {args.out}")
    return EXIT_OK


def cmd_mask(args) -> int:
    if args.like:
        dims = read_tnsr(args.like).dims
    elif args.dims:
        dims = parse_dims(args.dims)
    else:
        raise ValueError("mask needs --dims or --like")
    generator = MASK_GENERATORS[args.pattern]
    mask = generator(dims, args.missing_rate, args.seed)
    write_tnsr(mask, args.out)
    logger.info(f"Mask {args.pattern} dims={dims} missing rate={missing_rate_of(mask):.4f} -> {args.out}")
    return EXIT_OK


def cmd_complete(args, base_config) -> int:
    run_config = build_run_config(args, base_config)
    y = read_tnsr(run_config.input_path)
    w = read_tnsr(run_config.mask_path)
    if y.dims != w.dims:
        raise ShapeMismatchError(f"Mask dims {w.dims} != data dims {y.dims}")
    truth = read_tnsr(run_config.truth_path) if run_config.truth_path else None

    pipeline = CompletionPipeline(run_config, progress=not args.quiet)
    result = pipeline.run(y, w, truth)
    pipeline.save(result)

    table = Table(title="Completion Summary")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Algorithm", run_config.algorithm)
    table.add_row("Dims", str(y.dims))
    table.add_row("Solver dims", str(pipeline.plan.output_dims if pipeline.plan else y.dims))
    table.add_row("TT-ranks", str(pipeline.model.ranks))
    table.add_row("Missing rate", f"{missing_rate_of(w):.4f}")
    table.add_row("Iterations", str(result.iterations))
    table.add_row("Time", f"{result.elapsed:.2f}s")
    table.add_row("RSE", f"{result.rse:.6f}")
    table.add_row("PSNR", f"{result.psnr:.2f} dB")
    table.add_row("Output", run_config.output_path)
    if not args.quiet:
        console.print(table)
    return EXIT_OK


def cmd_eval(args, base_config) -> int:
    truth = read_tnsr(args.truth)
    completed = read_tnsr(args.completed)
    if truth.dims != completed.dims:
        raise ShapeMismatchError(f"Truth dims {truth.dims} != completed dims {completed.dims}")
    peak = args.peak if args.peak is not None else float(base_config.get('data', {}).get('psnr_peak', 1.0))
    metrics = [m.strip() for m in args.metrics.split(',') if m.strip()]
    lines = []
    for metric in metrics:
        if metric == 'rse':
            lines.append(f"rse={rse(truth, completed)}")
        elif metric == 'psnr':
            lines.append(f"psnr={psnr(truth, completed, peak)}")
        else:
            raise ValueError(f"Unknown metric '{metric}' (expected rse, psnr)")
    print("\n".join(lines))
    return EXIT_OK


def cmd_vdt(args) -> int:
    tensor = read_tnsr(args.input)
    if args.invert:
        if args.plan in ('auto', 'flat'):
            raise ValueError("Inverting needs an explicit plan line such as 'u=2,2 v=2,2 trailing=3'")
        plan = VdtPlan.from_text(args.plan)
        result = invert_vdt(tensor, plan)
    else:
        plan = plan_for_dims(tensor.dims, args.plan)
        result = apply_vdt(tensor, plan)
    write_tnsr(result, args.out)
    if args.plan_out:
        write_text(plan.to_text() + "\n", args.plan_out)
    logger.info(f"VDT {'inverse' if args.invert else 'forward'}: {tensor.dims} -> {result.dims} "
                f"(plan '{plan.to_text()}')")
    return EXIT_OK


def cmd_img(args) -> int:
    """PPM/PGM (one image or a frame sequence) <-> TNSR"""
    inputs: List[str] = args.inputs
    if all(p.lower().endswith('.tnsr') for p in inputs):
        if len(inputs) != 1:
            raise ValueError("Convert one TNSR file at a time")
        written = write_frames(read_tnsr(inputs[0]), args.out)
        logger.info(f"Wrote {len(written)} image(s) from {inputs[0]}")
    elif all(p.lower().endswith(IMAGE_SUFFIXES) for p in inputs):
        tensor = read_frames(sorted(inputs) if args.sort else inputs)
        write_tnsr(tensor, args.out)
        logger.info(f"Wrote tensor {tensor.dims} from {len(inputs)} image(s)")
    else:
        raise ValueError("Inputs must be all .tnsr or all .ppm/.pgm files")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Tensor-train completion toolkit')
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    parser.add_argument('--quiet', action='store_true', help='Warnings only, no progress bars')
    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    synth_parser = subparsers.add_parser('synth', help='Write a synthetic tensor')
    synth_parser.add_argument('--dims', required=True, help="Extents such as '26,26,26'")
    synth_parser.add_argument('--out', required=True)
    synth_parser.add_argument('--tt-ranks', help='Generate an exact TT model of these ranks instead')
    synth_parser.add_argument('--seed', type=int, default=0)
    synth_parser.add_argument('--scale', type=float, default=1.0, help='Core scale for --tt-ranks')

    mask_parser = subparsers.add_parser('mask', help='Write a 0/1 observation mask')
    mask_parser.add_argument('--dims', help="Extents such as '256,256,3'")
    mask_parser.add_argument('--like', help='Take dims from this TNSR file')
    mask_parser.add_argument('--missing-rate', type=float, required=True)
    mask_parser.add_argument('--pattern', choices=sorted(MASK_GENERATORS), default='random')
    mask_parser.add_argument('--seed', type=int, default=0)
    mask_parser.add_argument('--out', required=True)

    complete_parser = subparsers.add_parser('complete', help='Run TT completion')
    complete_parser.add_argument('--input', required=True, help='Data tensor (TNSR)')
    complete_parser.add_argument('--mask', required=True, help='Observation mask (TNSR)')
    complete_parser.add_argument('--out', required=True, help='Completed tensor (TNSR)')
    complete_parser.add_argument('--log', help='Convergence log (CSV)')
    complete_parser.add_argument('--truth', help='Ground truth for scoring, if the input is not complete')
    complete_parser.add_argument('--vdt', help="'auto', 'flat', 'none' or a plan line")
    complete_parser.add_argument('--save-cores', help='Manifest path for the fitted TT cores')
    complete_parser.add_argument('--no-normalize', action='store_true', help='Skip [0, 1] normalization')
    complete_parser.add_argument('--quiet', action='store_true', default=argparse.SUPPRESS)
    add_solver_args(complete_parser)

    eval_parser = subparsers.add_parser('eval', help='Score a completed tensor')
    eval_parser.add_argument('--truth', required=True)
    eval_parser.add_argument('--completed', required=True)
    eval_parser.add_argument('--metrics', default='rse,psnr')
    eval_parser.add_argument('--peak', type=float, help='Data range for PSNR (1.0 for [0,1] data)')

    vdt_parser = subparsers.add_parser('vdt', help='Apply or invert visual data tensorization')
    vdt_parser.add_argument('--input', required=True)
    vdt_parser.add_argument('--plan', default='auto', help="'auto', 'flat' or a plan line")
    vdt_parser.add_argument('--invert', action='store_true')
    vdt_parser.add_argument('--plan-out', help='Write the resolved plan line here')
    vdt_parser.add_argument('--out', required=True)

    img_parser = subparsers.add_parser('img', help='Convert PPM/PGM <-> TNSR')
    img_parser.add_argument('inputs', nargs='+', help='Images (stacked as frames) or one TNSR file')
    img_parser.add_argument('--out', required=True, help="Output file; use '{}' for frame numbers")
    img_parser.add_argument('--sort', action='store_true', help='Sort frame files by name')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2

    try:
        base_config = load_config(getattr(args, 'config', None))
        setup_logging(base_config, verbose=args.verbose, quiet=args.quiet)
        if args.command == 'synth':
            return cmd_synth(args)
        if args.command == 'mask':
            return cmd_mask(args)
        if args.command == 'complete':
            return cmd_complete(args, base_config)
        if args.command == 'eval':
            return cmd_eval(args, base_config)
        if args.command == 'vdt':
            return cmd_vdt(args)
        if args.command == 'img':
            return cmd_img(args)
    except Exception as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed: {e}")
        if code == 1:
            import traceback
            traceback.print_exc()
        return code
    return 2


if __name__ == '__main__':
    sys.exit(main())
