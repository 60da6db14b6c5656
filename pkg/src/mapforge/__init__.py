"""Joint PE-array sizing and loop-nest mapping search under an area budget."""

from importlib import resources

from .errors import InputError, NoValidDesignError
from .workload import (DIMS, LayerShape, Model, gemm_to_conv, load_model,
                       model_from_dict, total_macs, validate_layer)
from .designspace import (AcceleratorDesign, BufferReq, Genome, GenomeCodec,
                          LevelGene, MappingChromosome, TEMPLATES, TENSORS,
                          TENSOR_DIMS, decode, genome_from_dict,
                          genome_to_dict, load_genome, min_buffer_requirement,
                          random_genome, repair, save_genome,
                          template_mapping, validate_genome)
from .costmodel import (BIG, CostReport, LayerCost, OBJECTIVES, Platform,
                        area_of, boundary_traffic, compute_cycles, evaluate,
                        load_platform, platform_from_dict)
from .oracle import MAC_CAP, ExactCounts, oracle_simulate
from .ga import (GaConfig, SearchResult, TraceRow, ga_config_from_dict,
                 load_ga_config, run_search)
from .baselines import (FIXED_HW_PRESETS, grid_search_hw,
                        mapping_opt_fixed_hw, random_search, std_ga)

__version__ = "0.1.0"

BUILTIN_PLATFORMS = ("edge", "cloud")
BUILTIN_MODELS = ("convnet3", "gemm3", "mixed3")


def builtin_platform(name: str) -> Platform:
    """Load one of the bundled platform profiles by name."""
    if name not in BUILTIN_PLATFORMS:
        raise InputError("unknown platform profile %r (have: %s)"
                         % (name, ", ".join(BUILTIN_PLATFORMS)))
    ref = resources.files(__name__).joinpath("profiles/%s.toml" % name)
    with resources.as_file(ref) as path:
        return load_platform(path)


def builtin_model(name: str) -> Model:
    """Load one of the bundled sample models by name."""
    if name not in BUILTIN_MODELS:
        raise InputError("unknown bundled model %r (have: %s)"
                         % (name, ", ".join(BUILTIN_MODELS)))
    ref = resources.files(__name__).joinpath("models/%s.json" % name)
    with resources.as_file(ref) as path:
        return load_model(path)
