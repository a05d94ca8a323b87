"""Map LIF neurons onto a fixed-point neuromorphic compartment model and measure the fidelity."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    ConfigError,
    DecayRangeError,
    LifmapError,
    MappingError,
    OutputError,
    UndefinedCorrelationError,
)
from .params import (  # noqa: E402
    LoihiParams,
    MappingConfig,
    NeuronParams,
    derive_loihi_params,
    forward_transform,
    inverse_transform,
    quantize_decay,
)
from .network import (  # noqa: E402
    ExternalInput,
    NetworkGraph,
    SpikeTrain,
    StimulusProgram,
    generate_poisson_stimulus,
    translate_network,
)
from .reference import build_propagator, ref_run, ref_step, run_reference_network  # noqa: E402
from .loihi import CompartmentState, assign_cores, loihi_step, run_loihi  # noqa: E402
from .metrics import pearson, rmse  # noqa: E402
from .validation import (  # noqa: E402
    compare_network,
    compare_single_neuron,
    sweep_temporal,
    sweep_voltage,
)
