
from tracedit.calcs.experiment_base import Experiment
from tracedit.calcs import CALC_AVAILABLE

def test__get_available():

    # Run on init, populating CALC_AVAILABLE

    assert issubclass(type(CALC_AVAILABLE),dict)
    assert set(CALC_AVAILABLE) == {"trace","in-domain","ood","ablate-layers",
                                   "ablate-positions"}

    for k in CALC_AVAILABLE:
        assert issubclass(type(k),str)
        assert issubclass(CALC_AVAILABLE[k],Experiment)
        assert CALC_AVAILABLE[k].calc_type == k
