"""Generators, file formats, experiment runners and the CLI."""

from .experiments import ExperimentConfig, build_signal, load_config, run_experiment
from .generators import (gen_ambiguous_pair, gen_band_limited, gen_degenerate, gen_exp_sum,
                         gen_noise)

__all__ = ["ExperimentConfig", "build_signal", "load_config", "run_experiment",
           "gen_ambiguous_pair", "gen_band_limited", "gen_degenerate", "gen_exp_sum", "gen_noise"]
