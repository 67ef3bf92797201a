#!/usr/bin/env python3
"""
Test Run Configuration
YAML defaults, command-line overrides and validation
"""

import sys
import os
import argparse
import math

# Add src directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pytest

from src.errors import ConfigError
from src.run_config import (DEFAULT_MAX_ITERS, SolverConfig, add_solver_args, build_run_config,
                            load_base_config, parse_ranks, solver_config_from_dict)

PROJECT_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.yaml")


def complete_args(*extra):
    parser = argparse.ArgumentParser()
    parser.add_argument('--input', default='y.tnsr')
    parser.add_argument('--mask', default='w.tnsr')
    parser.add_argument('--out', default='z.tnsr')
    parser.add_argument('--log')
    parser.add_argument('--vdt')
    parser.add_argument('--truth')
    parser.add_argument('--save-cores')
    parser.add_argument('--no-normalize', action='store_true')
    add_solver_args(parser)
    return parser.parse_args(list(extra))


def test_project_config_matches_defaults():
    config = load_base_config(PROJECT_CONFIG)
    wopt = solver_config_from_dict(config["solver"], "wopt")
    sgd = solver_config_from_dict(config["solver"], "sgd")
    assert wopt.max_iters == 500
    assert sgd.max_iters == 100000
    assert (wopt.lr, wopt.beta1, wopt.beta2, wopt.eps, wopt.tol) == (0.001, 0.9, 0.999, 1e-8, 1e-4)
    assert wopt.ranks == 12
    assert wopt.sgd_tol is None


def test_missing_config_file():
    with pytest.raises(FileNotFoundError):
        load_base_config("/nonexistent/config.yaml")


def test_parse_ranks():
    assert parse_ranks("12") == 12
    assert parse_ranks("1,3,3,1") == (1, 3, 3, 1)
    assert parse_ranks(4) == 4
    with pytest.raises(ConfigError):
        parse_ranks("1,a")


def test_max_iters_default_by_algorithm():
    assert solver_config_from_dict({}, "sgd").max_iters == DEFAULT_MAX_ITERS["sgd"]
    assert solver_config_from_dict({"max_iters_wopt": 42}, "wopt").max_iters == 42


def test_scientific_notation_strings_are_numbers():
    config = solver_config_from_dict({"eps": "1e-8", "tol": "1e-4"})
    assert config.eps == 1e-8 and config.tol == 1e-4


@pytest.mark.parametrize("field,value", [
    ("lr", 0.0), ("lr", math.nan), ("beta1", 1.0), ("eps", 0.0), ("tol", -1.0),
    ("max_iters", -1), ("log_every", 0), ("workers", 0),
])
def test_invalid_solver_settings(field, value):
    with pytest.raises(ConfigError):
        SolverConfig(**{field: value}).validate()


def test_command_line_overrides_yaml():
    base = {"solver": {"lr": 0.5, "ranks": 3, "algorithm": "sgd"}, "data": {"normalize": True}}
    run = build_run_config(complete_args("--lr", "0.02", "--no-normalize", "--no-timing"), base)
    assert run.algorithm == "sgd"
    assert run.solver.lr == 0.02
    assert run.solver.ranks == 3
    assert run.solver.max_iters == 100000
    assert run.solver.log_timing is False
    assert run.normalize is False


def test_zero_tolerance_rejected_for_runs():
    with pytest.raises(ConfigError):
        build_run_config(complete_args("--tol", "0"), {})


def test_empty_output_path_rejected():
    with pytest.raises(ConfigError):
        build_run_config(complete_args("--out", ""), {})
