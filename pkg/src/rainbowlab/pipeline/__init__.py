"""Step-by-step construction of rainbow Hamilton cycles in random coloured graphs."""
from ._common import STAGES, Failure
from .boosters import booster_close
from .expander import rainbow_expander
from .longpath import LongPath, rainbow_long_path
from .matching import StarMatching, star_matching
from .partition import PartitionPlan, Windows, check_plan, partition
from .run import PipelineConfig, PipelineTrace, run_pipeline, run_pipeline_on

__all__ = [
    "STAGES", "Failure", "booster_close", "rainbow_expander", "LongPath", "rainbow_long_path",
    "StarMatching", "star_matching", "PartitionPlan", "Windows", "check_plan", "partition",
    "PipelineConfig", "PipelineTrace", "run_pipeline", "run_pipeline_on",
]
