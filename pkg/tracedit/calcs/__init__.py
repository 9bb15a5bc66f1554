"""
Experiments over a trained base model. All Experiment subclasses imported
here are available in experiment json files through the `calc_type` key.
"""

from .experiment_base import Experiment as _ExperimentBaseClass
from .experiment_base import ExperimentSpec, load_base

from .in_domain import InDomainExperiment
from .out_of_domain import OutOfDomainExperiment
from .layer_ablation import LayerAblation
from .position_ablation import PositionAblation
from .trace import TraceExperiment

def _get_available():

    calc_available = {}

    possible = dict(globals())
    for p in possible:
        this_poss = possible[p]

        # Key every Experiment subclass with a calc_type
        try:
            if issubclass(this_poss,_ExperimentBaseClass):
                if this_poss.calc_type is not None:
                    calc_available[this_poss.calc_type] = this_poss
        except TypeError:
            continue

    return calc_available

# Register experiments available
CALC_AVAILABLE = _get_available()

from .read_json import read_json
from .pipeline import generate_data, train_base_model, train_suite, evaluate_model
